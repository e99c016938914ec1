// Copyright 2026 The RAP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rap/nn/parameter_set.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "rap/errors.h"

namespace rap::nn {
namespace {

constexpr char kMagic[8] = {'R', 'A', 'P', 'P', 'A', 'R', 'M', '1'};

template <typename T>
void WriteLe(std::ostream& out, T v) {
  static_assert(std::is_integral_v<T>);
  unsigned char buf[sizeof(T)];
  auto u = static_cast<std::make_unsigned_t<T>>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(u >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T ReadLe(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw ValidationError("truncated checkpoint");
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    u |= static_cast<std::make_unsigned_t<T>>(buf[i]) << (8 * i);
  }
  return static_cast<T>(u);
}

bool HasPrefix(std::string_view name, std::string_view prefix) {
  return name.substr(0, prefix.size()) == prefix;
}

}  // namespace

Tensor& ParameterSet::Add(const std::string& name, Tensor value) {
  auto [it, inserted] = params_.emplace(name, std::move(value));
  if (!inserted) throw ValidationError("duplicate parameter '" + name + "'");
  return it->second;
}

Tensor& ParameterSet::Get(std::string_view name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ValidationError("no parameter '" + std::string(name) + "'");
  return it->second;
}

const Tensor& ParameterSet::Get(std::string_view name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ValidationError("no parameter '" + std::string(name) + "'");
  return it->second;
}

bool ParameterSet::Contains(std::string_view name) const {
  return params_.find(name) != params_.end();
}

std::size_t ParameterSet::NumValues() const {
  std::size_t n = 0;
  for (const auto& [_, t] : params_) n += t.size();
  return n;
}

void ParameterSet::ZeroGrad() {
  for (auto& [_, t] : params_) t.ZeroGrad();
}

double ParameterSet::SquaredNorm(std::string_view prefix) const {
  double total = 0;
  for (const auto& [name, t] : params_) {
    if (!HasPrefix(name, prefix)) continue;
    for (double v : t.values()) total += v * v;
  }
  return total;
}

bool ParameterSet::AllFinite() const {
  for (const auto& [_, t] : params_) {
    for (double v : t.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::uint64_t ParameterSet::Checksum(std::string_view prefix) const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [name, t] : params_) {
    if (!HasPrefix(name, prefix)) continue;
    mix(name.data(), name.size());
    mix(t.data(), t.size() * sizeof(double));
  }
  return h;
}

void ParameterSet::Save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(params_.size()));
  for (const auto& [name, t] : params_) {
    WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) WriteLe<std::uint64_t>(out, d);
  }
  for (const auto& [_, t] : params_) {
    for (double v : t.values()) WriteLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw std::runtime_error("checkpoint write failed");
}

void ParameterSet::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  Save(out);
}

ParameterSet ParameterSet::Load(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError("not a parameter checkpoint");
  }
  const auto count = ReadLe<std::uint32_t>(in);
  std::vector<std::pair<std::string, Shape>> headers;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = ReadLe<std::uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    const auto rank = ReadLe<std::uint32_t>(in);
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(ReadLe<std::uint64_t>(in));
    headers.emplace_back(std::move(name), std::move(shape));
  }
  ParameterSet set;
  for (auto& [name, shape] : headers) {
    Tensor t(shape);
    for (double& v : t.values()) v = std::bit_cast<double>(ReadLe<std::uint64_t>(in));
    set.Add(name, std::move(t));
  }
  return set;
}

ParameterSet ParameterSet::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  return Load(in);
}

void ParameterSet::CopyValuesFrom(const ParameterSet& other, std::string_view prefix) {
  for (auto& [name, t] : params_) {
    if (!HasPrefix(name, prefix) || !other.Contains(name)) continue;
    const Tensor& src = other.Get(name);
    if (src.shape() != t.shape()) {
      throw ShapeError("parameter '" + name + "' shape " + ShapeString(src.shape()) +
                       " vs " + ShapeString(t.shape()));
    }
    std::copy(src.values().begin(), src.values().end(), t.values().begin());
  }
}

bool BitwiseEqual(const ParameterSet& a, const ParameterSet& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.shape() != ib->second.shape()) return false;
    if (std::memcmp(ia->second.data(), ib->second.data(),
                    ia->second.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace rap::nn
