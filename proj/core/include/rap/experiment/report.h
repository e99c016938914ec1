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

#ifndef RAP_EXPERIMENT_REPORT_H_
#define RAP_EXPERIMENT_REPORT_H_

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rap/data/movielens.h"

namespace rap::experiment {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// One (method, l, seed) cell. Unmeasured values are NaN.
struct CellResult {
  std::string method;  // row label, e.g. "RAP", "RAPGen", "RAP(a=0.25)"
  int l = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  // Indexed by data::Attribute.
  std::array<double, data::kNumAttributes> auc = {kMissing, kMissing, kMissing};
  double precision = kMissing;       // averaged over all users, excluded users count 0
  double recall = kMissing;
  double precision_eval = kMissing;  // averaged over evaluable users only
  double recall_eval = kMissing;
  std::size_t evaluable_users = 0;
  std::size_t excluded_users = 0;
  std::size_t short_profile_users = 0;
  double seconds = 0.0;

  double Auc(data::Attribute a) const { return auc[static_cast<std::size_t>(a)]; }
};

struct ExperimentReport {
  std::string name;
  std::map<std::string, std::string> config;
  std::vector<CellResult> cells;
  double seconds = 0.0;

  // Mean over seeds per (method, l), in first-appearance order. NaN values
  // stay NaN; seed is 0 and seconds is the total.
  std::vector<CellResult> MeanOverSeeds() const;
  // The averaged row for (method, l), if present.
  std::optional<CellResult> Mean(const std::string& method, int l) const;
  std::vector<CellResult> Cells(const std::string& method, int l) const;
};

std::string CellToJson(const CellResult& cell);
CellResult CellFromJson(const std::string& json);

std::string ReportToJson(const ExperimentReport& report);
ExperimentReport ReportFromJson(const std::string& json);

// Flat CSV with the Table 1 columns: method,l,seed,gen,age,occ,p_at_k,r_at_k
// followed by the bookkeeping columns.
std::string ReportToCsv(const ExperimentReport& report, bool averaged);
ExperimentReport ReportFromCsv(const std::string& csv);

// Human-readable table of the seed means.
std::string FormatTable(const ExperimentReport& report);

}  // namespace rap::experiment

#endif  // RAP_EXPERIMENT_REPORT_H_
