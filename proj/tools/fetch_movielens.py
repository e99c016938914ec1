#!/usr/bin/env python3
# Copyright 2026 The RAP Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Places MovieLens-100K u.data and u.user into a directory.

Tries the GroupLens archive first. Without access to it, falls back to the
copy bundled in the recbole wheel on PyPI, whose atomic files carry the same
rows with a header line and tab-separated user records.
"""

import argparse
import io
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
WHEEL = "recbole==1.2.1"
WHEEL_PREFIX = "recbole/dataset_example/ml-100k/"


def from_grouplens(out: pathlib.Path) -> None:
    with urllib.request.urlopen(GROUPLENS_URL, timeout=30) as resp:
        archive = zipfile.ZipFile(io.BytesIO(resp.read()))
    for name in ("u.data", "u.user"):
        (out / name).write_bytes(archive.read(f"ml-100k/{name}"))


def from_wheel(out: pathlib.Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-d", tmp, WHEEL],
            check=True,
            stdout=subprocess.DEVNULL,
        )
        wheel = next(pathlib.Path(tmp).glob("recbole-*.whl"))
        archive = zipfile.ZipFile(wheel)
        inter = archive.read(WHEEL_PREFIX + "ml-100k.inter").decode().splitlines()[1:]
        users = archive.read(WHEEL_PREFIX + "ml-100k.user").decode().splitlines()[1:]
    (out / "u.data").write_text("".join(line + "\n" for line in inter))
    (out / "u.user").write_text("".join(line.replace("\t", "|") + "\n" for line in users))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/ml-100k", type=pathlib.Path)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    try:
        from_grouplens(args.out)
        source = "grouplens"
    except OSError as err:
        print(f"grouplens unavailable ({err}); using the {WHEEL} wheel", file=sys.stderr)
        from_wheel(args.out)
        source = "wheel"
    rows = sum(1 for _ in open(args.out / "u.data"))
    users = sum(1 for _ in open(args.out / "u.user"))
    print(f"{source}: {rows} ratings, {users} users -> {args.out}")
    return 0 if (rows, users) == (100000, 943) else 1


if __name__ == "__main__":
    sys.exit(main())
