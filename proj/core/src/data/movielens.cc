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

#include "rap/data/movielens.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rap/errors.h"

namespace rap::data {
namespace {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string_view> SplitFields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
bool ParseInt(std::string_view s, T& out) {
  while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Calls fn(line, line_number) for each non-blank line.
template <typename Fn>
void ForEachLine(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line, line_no);
    start = end + 1;
  }
}

}  // namespace

IdMap IdMap::FromRawIds(std::vector<std::int64_t> raw_ids) {
  std::sort(raw_ids.begin(), raw_ids.end());
  raw_ids.erase(std::unique(raw_ids.begin(), raw_ids.end()), raw_ids.end());
  IdMap map;
  map.raw_ = std::move(raw_ids);
  map.index_.reserve(map.raw_.size());
  for (std::size_t i = 0; i < map.raw_.size(); ++i) {
    map.index_.emplace(map.raw_[i], static_cast<std::int32_t>(i));
  }
  return map;
}

IdMap IdMap::Identity(std::size_t n) {
  std::vector<std::int64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::int64_t>(i);
  return FromRawIds(std::move(ids));
}

std::int64_t IdMap::Decode(std::int32_t index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= raw_.size()) {
    throw ValidationError("dense index " + std::to_string(index) +
                          " out of range");
  }
  return raw_[static_cast<std::size_t>(index)];
}

std::int32_t IdMap::Encode(std::int64_t raw) const {
  auto found = Find(raw);
  if (!found) throw ValidationError("unknown id " + std::to_string(raw));
  return *found;
}

std::optional<std::int32_t> IdMap::Find(std::int64_t raw) const {
  auto it = index_.find(raw);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RatingDataset::RatingDataset(std::size_t num_users, std::size_t num_items,
                             std::vector<Rating> ratings, IdMap user_ids,
                             IdMap item_ids)
    : num_users_(num_users),
      num_items_(num_items),
      ratings_(std::move(ratings)),
      by_user_(num_users),
      rated_(num_users),
      user_ids_(user_ids.size() == 0 ? IdMap::Identity(num_users)
                                     : std::move(user_ids)),
      item_ids_(item_ids.size() == 0 ? IdMap::Identity(num_items)
                                     : std::move(item_ids)) {
  if (user_ids_.size() != num_users_ || item_ids_.size() != num_items_) {
    throw ValidationError("id map size does not match dataset dimensions");
  }
  for (const Rating& r : ratings_) {
    if (r.user < 0 || static_cast<std::size_t>(r.user) >= num_users_ ||
        r.item < 0 || static_cast<std::size_t>(r.item) >= num_items_) {
      throw ValidationError("rating (" + std::to_string(r.user) + ", " +
                            std::to_string(r.item) + ") outside " +
                            std::to_string(num_users_) + "x" +
                            std::to_string(num_items_));
    }
    if (r.score < 1 || r.score > 5) {
      throw ValidationError("rating score " + std::to_string(r.score) +
                            " outside 1..5");
    }
    by_user_[static_cast<std::size_t>(r.user)].push_back(r);
  }
  for (std::size_t u = 0; u < num_users_; ++u) {
    auto& list = by_user_[u];
    std::sort(list.begin(), list.end(),
              [](const Rating& a, const Rating& b) { return a.item < b.item; });
    auto& items = rated_[u];
    items.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i > 0 && list[i].item == list[i - 1].item) {
        throw ValidationError("duplicate rating for user " + std::to_string(u) +
                              " item " + std::to_string(list[i].item));
      }
      items.push_back(list[i].item);
    }
  }
}

const std::vector<ItemId>& RatingDataset::RatedItems(UserId user) const {
  return rated_.at(static_cast<std::size_t>(user));
}

const std::vector<Rating>& RatingDataset::UserRatings(UserId user) const {
  return by_user_.at(static_cast<std::size_t>(user));
}

bool RatingDataset::IsRated(UserId user, ItemId item) const {
  const auto& items = RatedItems(user);
  return std::binary_search(items.begin(), items.end(), item);
}

RatingDataset RatingDataset::WithoutItems(
    const std::vector<std::vector<ItemId>>& per_user_removed) const {
  std::vector<Rating> kept;
  kept.reserve(ratings_.size());
  for (std::size_t u = 0; u < num_users_; ++u) {
    std::vector<ItemId> drop;
    if (u < per_user_removed.size()) drop = per_user_removed[u];
    std::sort(drop.begin(), drop.end());
    for (const Rating& r : by_user_[u]) {
      if (!std::binary_search(drop.begin(), drop.end(), r.item)) kept.push_back(r);
    }
  }
  return RatingDataset(num_users_, num_items_, std::move(kept), user_ids_,
                       item_ids_);
}

RatingDataset ParseRatings(std::string_view text) {
  struct RawRating {
    std::int64_t user, item;
    int score;
    std::int64_t ts;
  };
  std::vector<RawRating> raw;
  ForEachLine(text, [&](std::string_view line, std::size_t line_no) {
    auto fields = SplitFields(line, '\t');
    if (fields.size() != 4) {
      throw ParseError("expected 4 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    RawRating r{};
    if (!ParseInt(fields[0], r.user) || !ParseInt(fields[1], r.item) ||
        !ParseInt(fields[2], r.score) || !ParseInt(fields[3], r.ts)) {
      throw ParseError("non-integer field", line_no);
    }
    if (r.score < 1 || r.score > 5) {
      throw ValidationError("line " + std::to_string(line_no) + ": rating " +
                            std::to_string(r.score) + " outside 1..5");
    }
    raw.push_back(r);
  });

  std::vector<std::int64_t> users, items;
  users.reserve(raw.size());
  items.reserve(raw.size());
  for (const auto& r : raw) {
    users.push_back(r.user);
    items.push_back(r.item);
  }
  IdMap user_ids = IdMap::FromRawIds(std::move(users));
  IdMap item_ids = IdMap::FromRawIds(std::move(items));
  std::vector<Rating> ratings;
  ratings.reserve(raw.size());
  for (const auto& r : raw) {
    ratings.push_back(Rating{user_ids.Encode(r.user), item_ids.Encode(r.item),
                             r.score, r.ts});
  }
  const std::size_t n = user_ids.size();
  const std::size_t m = item_ids.size();
  return RatingDataset(n, m, std::move(ratings), std::move(user_ids),
                       std::move(item_ids));
}

RatingDataset LoadRatings(const std::filesystem::path& path) {
  return ParseRatings(ReadFile(path));
}

void WriteRatingsTsv(const RatingDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (std::size_t u = 0; u < ds.num_users(); ++u) {
    for (const Rating& r : ds.UserRatings(static_cast<UserId>(u))) {
      out << ds.user_ids().Decode(r.user) << '\t'
          << ds.item_ids().Decode(r.item) << '\t' << r.score << '\t'
          << r.timestamp << '\n';
    }
  }
}

int NumClasses(Attribute attribute) {
  switch (attribute) {
    case Attribute::kGender:
      return 2;
    case Attribute::kAge:
      return 3;
    case Attribute::kOccupation:
      return 21;
  }
  throw ValidationError("unknown attribute");
}

std::string_view AttributeName(Attribute attribute) {
  switch (attribute) {
    case Attribute::kGender:
      return "gender";
    case Attribute::kAge:
      return "age";
    case Attribute::kOccupation:
      return "occupation";
  }
  throw ValidationError("unknown attribute");
}

Attribute ParseAttribute(std::string_view name) {
  if (name == "gender" || name == "gen") return Attribute::kGender;
  if (name == "age") return Attribute::kAge;
  if (name == "occupation" || name == "occ") return Attribute::kOccupation;
  throw ValidationError("unknown attribute '" + std::string(name) + "'");
}

int AgeBucket(int age) {
  if (age < 1) throw ValidationError("age must be positive, got " + std::to_string(age));
  if (age < 35) return 0;
  if (age < 45) return 1;
  return 2;
}

const std::vector<std::string>& OccupationVocabulary() {
  static const std::vector<std::string> kVocab = {
      "administrator", "artist",    "doctor",    "educator",   "engineer",
      "entertainment", "executive", "healthcare", "homemaker", "lawyer",
      "librarian",     "marketing", "none",      "other",      "programmer",
      "retired",       "salesman",  "scientist", "student",    "technician",
      "writer"};
  return kVocab;
}

AttributeTable::AttributeTable(
    std::vector<std::array<int, kNumAttributes>> labels)
    : labels_(std::move(labels)), hidden_(labels_.size(), false) {
  for (const auto& row : labels_) {
    for (Attribute a : kAllAttributes) {
      int c = row[static_cast<int>(a)];
      if (c < 0 || c >= NumClasses(a)) {
        throw ValidationError("class " + std::to_string(c) + " out of range for " +
                              std::string(AttributeName(a)));
      }
    }
  }
}

int AttributeTable::Label(UserId user, Attribute attribute) const {
  auto u = static_cast<std::size_t>(user);
  if (user < 0 || u >= labels_.size()) {
    throw ValidationError("user " + std::to_string(user) + " not in attribute table");
  }
  if (hidden_[u]) {
    throw LeakageError("read of hidden " + std::string(AttributeName(attribute)) +
                       " label for user " + std::to_string(user));
  }
  return labels_[u][static_cast<int>(attribute)];
}

bool AttributeTable::IsHidden(UserId user) const {
  return hidden_.at(static_cast<std::size_t>(user));
}

AttributeTable AttributeTable::WithHidden(std::span<const UserId> users) const {
  AttributeTable copy = *this;
  for (UserId u : users) copy.hidden_.at(static_cast<std::size_t>(u)) = true;
  return copy;
}

std::vector<std::size_t> AttributeTable::ClassCounts(Attribute attribute) const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(NumClasses(attribute)), 0);
  for (std::size_t u = 0; u < labels_.size(); ++u) {
    if (!hidden_[u]) ++counts[static_cast<std::size_t>(labels_[u][static_cast<int>(attribute)])];
  }
  return counts;
}

AttributeTable ParseUserAttributes(std::string_view text, const IdMap& user_ids) {
  const auto& vocab = OccupationVocabulary();
  std::vector<std::array<int, kNumAttributes>> labels(user_ids.size());
  std::vector<bool> seen(user_ids.size(), false);
  ForEachLine(text, [&](std::string_view line, std::size_t line_no) {
    auto fields = SplitFields(line, '|');
    if (fields.size() != 5) {
      throw ParseError("expected 5 pipe-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    std::int64_t raw_user = 0;
    int age = 0;
    if (!ParseInt(fields[0], raw_user) || !ParseInt(fields[1], age)) {
      throw ParseError("non-integer user id or age", line_no);
    }
    auto user = user_ids.Find(raw_user);
    if (!user) {
      throw ValidationError("line " + std::to_string(line_no) + ": user " +
                            std::to_string(raw_user) + " has no ratings");
    }
    int gender;
    if (fields[2] == "M") {
      gender = 0;
    } else if (fields[2] == "F") {
      gender = 1;
    } else {
      throw ParseError("unknown gender '" + std::string(fields[2]) + "'", line_no);
    }
    auto occ = std::lower_bound(vocab.begin(), vocab.end(), fields[3]);
    if (occ == vocab.end() || *occ != fields[3]) {
      throw ParseError("unknown occupation '" + std::string(fields[3]) + "'", line_no);
    }
    int bucket;
    try {
      bucket = AgeBucket(age);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
    auto u = static_cast<std::size_t>(*user);
    labels[u] = {gender, bucket, static_cast<int>(occ - vocab.begin())};
    seen[u] = true;
  });
  for (std::size_t u = 0; u < seen.size(); ++u) {
    if (!seen[u]) {
      throw ValidationError("no attributes for user " +
                            std::to_string(user_ids.Decode(static_cast<std::int32_t>(u))));
    }
  }
  return AttributeTable(std::move(labels));
}

AttributeTable LoadUserAttributes(const std::filesystem::path& path,
                                  const IdMap& user_ids) {
  return ParseUserAttributes(ReadFile(path), user_ids);
}

}  // namespace rap::data
