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

#ifndef RAP_DATA_MOVIELENS_H_
#define RAP_DATA_MOVIELENS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rap::data {

using UserId = std::int32_t;
using ItemId = std::int32_t;

struct Rating {
  UserId user = 0;
  ItemId item = 0;
  int score = 0;  // 1..5
  std::int64_t timestamp = 0;
};

// Bijection between raw (file) identifiers and dense 0-based indices.
class IdMap {
 public:
  IdMap() = default;
  // Dense indices follow ascending raw-id order.
  static IdMap FromRawIds(std::vector<std::int64_t> raw_ids);
  static IdMap Identity(std::size_t n);

  std::size_t size() const { return raw_.size(); }
  std::int64_t Decode(std::int32_t index) const;
  std::int32_t Encode(std::int64_t raw) const;  // throws ValidationError
  std::optional<std::int32_t> Find(std::int64_t raw) const;
  const std::vector<std::int64_t>& raw_ids() const { return raw_; }

 private:
  std::vector<std::int64_t> raw_;
  std::unordered_map<std::int64_t, std::int32_t> index_;
};

// Sparse user-item ratings. Immutable after construction.
class RatingDataset {
 public:
  RatingDataset() = default;
  // Validates ranges and rejects duplicate (user, item) pairs.
  RatingDataset(std::size_t num_users, std::size_t num_items,
                std::vector<Rating> ratings, IdMap user_ids = {},
                IdMap item_ids = {});

  std::size_t num_users() const { return num_users_; }
  std::size_t num_items() const { return num_items_; }
  std::size_t num_ratings() const { return ratings_.size(); }
  const std::vector<Rating>& ratings() const { return ratings_; }

  // I_h, ascending item order.
  const std::vector<ItemId>& RatedItems(UserId user) const;
  // Ratings of one user, ascending item order.
  const std::vector<Rating>& UserRatings(UserId user) const;
  bool IsRated(UserId user, ItemId item) const;

  const IdMap& user_ids() const { return user_ids_; }
  const IdMap& item_ids() const { return item_ids_; }

  // Copy with the given (user, item) pairs dropped.
  RatingDataset WithoutItems(
      const std::vector<std::vector<ItemId>>& per_user_removed) const;

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::vector<Rating> ratings_;
  std::vector<std::vector<Rating>> by_user_;
  std::vector<std::vector<ItemId>> rated_;
  IdMap user_ids_;
  IdMap item_ids_;
};

// MovieLens u.data: user \t item \t rating \t timestamp, 1-based ids.
RatingDataset LoadRatings(const std::filesystem::path& path);
RatingDataset ParseRatings(std::string_view text);

// Writes the dataset back in u.data layout using the raw ids.
void WriteRatingsTsv(const RatingDataset& ds, const std::filesystem::path& path);

enum class Attribute : int { kGender = 0, kAge = 1, kOccupation = 2 };
inline constexpr int kNumAttributes = 3;
inline constexpr std::array<Attribute, 3> kAllAttributes = {
    Attribute::kGender, Attribute::kAge, Attribute::kOccupation};

int NumClasses(Attribute attribute);
std::string_view AttributeName(Attribute attribute);
// Accepts "gender"/"gen", "age", "occupation"/"occ".
Attribute ParseAttribute(std::string_view name);

// Under 35 -> 0, [35, 45) -> 1, 45 and over -> 2.
int AgeBucket(int age);

// The 21 MovieLens-100K occupations in sorted order.
const std::vector<std::string>& OccupationVocabulary();

// Per-user private attributes as class indices. Rows can be hidden; reading a
// hidden row throws LeakageError, which is how test-user labels are kept out
// of every training path.
class AttributeTable {
 public:
  AttributeTable() = default;
  explicit AttributeTable(std::vector<std::array<int, kNumAttributes>> labels);

  std::size_t num_users() const { return labels_.size(); }
  int Label(UserId user, Attribute attribute) const;
  bool IsHidden(UserId user) const;
  bool HasLabels(UserId user) const { return !IsHidden(user); }

  // Copy in which the listed users' labels are inaccessible.
  AttributeTable WithHidden(std::span<const UserId> users) const;
  // Visible-class histogram.
  std::vector<std::size_t> ClassCounts(Attribute attribute) const;

 private:
  std::vector<std::array<int, kNumAttributes>> labels_;
  std::vector<bool> hidden_;
};

// MovieLens u.user: user|age|gender|occupation|zip.
AttributeTable LoadUserAttributes(const std::filesystem::path& path,
                                  const IdMap& user_ids);
AttributeTable ParseUserAttributes(std::string_view text, const IdMap& user_ids);

}  // namespace rap::data

#endif  // RAP_DATA_MOVIELENS_H_
