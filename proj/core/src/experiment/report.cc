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

#include "rap/experiment/report.h"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "rap/errors.h"

namespace rap::experiment {

using nlohmann::json;

namespace {

// JSON has no NaN; missing values are written as null.
json Num(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double Num(const json& j) { return j.is_null() ? kMissing : j.get<double>(); }

json CellJson(const CellResult& c) {
  return {{"method", c.method},
          {"l", c.l},
          {"seed", c.seed},
          {"alpha", c.alpha},
          {"auc",
           {{"gender", Num(c.auc[0])}, {"age", Num(c.auc[1])}, {"occupation", Num(c.auc[2])}}},
          {"precision", Num(c.precision)},
          {"recall", Num(c.recall)},
          {"precision_eval", Num(c.precision_eval)},
          {"recall_eval", Num(c.recall_eval)},
          {"evaluable_users", c.evaluable_users},
          {"excluded_users", c.excluded_users},
          {"short_profile_users", c.short_profile_users},
          {"seconds", c.seconds}};
}

CellResult CellFrom(const json& j) {
  CellResult c;
  c.method = j.at("method").get<std::string>();
  c.l = j.at("l").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.alpha = j.at("alpha").get<double>();
  c.auc = {Num(j.at("auc").at("gender")), Num(j.at("auc").at("age")),
           Num(j.at("auc").at("occupation"))};
  c.precision = Num(j.at("precision"));
  c.recall = Num(j.at("recall"));
  c.precision_eval = Num(j.at("precision_eval"));
  c.recall_eval = Num(j.at("recall_eval"));
  c.evaluable_users = j.at("evaluable_users").get<std::size_t>();
  c.excluded_users = j.at("excluded_users").get<std::size_t>();
  c.short_profile_users = j.at("short_profile_users").get<std::size_t>();
  c.seconds = j.at("seconds").get<double>();
  return c;
}

std::string CsvNum(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double CsvParse(const std::string& s) { return s.empty() ? kMissing : std::stod(s); }

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

constexpr const char* kCsvHeader =
    "method,l,seed,alpha,gen,age,occ,p_at_k,r_at_k,p_at_k_eval,r_at_k_eval,"
    "evaluable_users,excluded_users,short_profile_users,seconds";

}  // namespace

std::vector<CellResult> ExperimentReport::MeanOverSeeds() const {
  std::vector<CellResult> out;
  std::vector<std::size_t> counts;
  for (const CellResult& c : cells) {
    std::size_t i = 0;
    while (i < out.size() && !(out[i].method == c.method && out[i].l == c.l)) ++i;
    if (i == out.size()) {
      CellResult zero = c;
      zero.seed = 0;
      zero.auc = {0.0, 0.0, 0.0};
      zero.precision = zero.recall = zero.precision_eval = zero.recall_eval = 0.0;
      zero.evaluable_users = zero.excluded_users = zero.short_profile_users = 0;
      zero.seconds = 0.0;
      out.push_back(zero);
      counts.push_back(0);
    }
    CellResult& m = out[i];
    for (std::size_t a = 0; a < m.auc.size(); ++a) m.auc[a] += c.auc[a];
    m.precision += c.precision;
    m.recall += c.recall;
    m.precision_eval += c.precision_eval;
    m.recall_eval += c.recall_eval;
    m.evaluable_users += c.evaluable_users;
    m.excluded_users += c.excluded_users;
    m.short_profile_users += c.short_profile_users;
    m.seconds += c.seconds;
    ++counts[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double n = static_cast<double>(counts[i]);
    CellResult& m = out[i];
    for (double& a : m.auc) a /= n;
    m.precision /= n;
    m.recall /= n;
    m.precision_eval /= n;
    m.recall_eval /= n;
    m.evaluable_users /= counts[i];
    m.excluded_users /= counts[i];
    m.short_profile_users /= counts[i];
  }
  return out;
}

std::optional<CellResult> ExperimentReport::Mean(const std::string& method, int l) const {
  for (const CellResult& c : MeanOverSeeds()) {
    if (c.method == method && c.l == l) return c;
  }
  return std::nullopt;
}

std::vector<CellResult> ExperimentReport::Cells(const std::string& method, int l) const {
  std::vector<CellResult> out;
  for (const CellResult& c : cells) {
    if (c.method == method && c.l == l) out.push_back(c);
  }
  return out;
}

std::string CellToJson(const CellResult& cell) { return CellJson(cell).dump(); }

CellResult CellFromJson(const std::string& text) {
  try {
    return CellFrom(json::parse(text));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad cell JSON: ") + e.what());
  }
}

std::string ReportToJson(const ExperimentReport& report) {
  json cells = json::array();
  for (const CellResult& c : report.cells) cells.push_back(CellJson(c));
  json means = json::array();
  for (const CellResult& c : report.MeanOverSeeds()) means.push_back(CellJson(c));
  json j = {{"name", report.name},
            {"config", report.config},
            {"seconds", report.seconds},
            {"cells", cells},
            {"mean_over_seeds", means}};
  return j.dump(2);
}

ExperimentReport ReportFromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    ExperimentReport r;
    r.name = j.at("name").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.seconds = j.at("seconds").get<double>();
    for (const json& c : j.at("cells")) r.cells.push_back(CellFrom(c));
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad report JSON: ") + e.what());
  }
}

std::string ReportToCsv(const ExperimentReport& report, bool averaged) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const CellResult& c : averaged ? report.MeanOverSeeds() : report.cells) {
    os << c.method << "," << c.l << "," << c.seed << "," << CsvNum(c.alpha) << ","
       << CsvNum(c.auc[0]) << "," << CsvNum(c.auc[1]) << "," << CsvNum(c.auc[2]) << ","
       << CsvNum(c.precision) << "," << CsvNum(c.recall) << "," << CsvNum(c.precision_eval)
       << "," << CsvNum(c.recall_eval) << "," << c.evaluable_users << "," << c.excluded_users
       << "," << c.short_profile_users << "," << CsvNum(c.seconds) << "\n";
  }
  return os.str();
}

ExperimentReport ReportFromCsv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.substr(0, std::string(kCsvHeader).size()) != kCsvHeader) {
    throw ValidationError("CSV report: unexpected header");
  }
  ExperimentReport r;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = SplitCsvLine(line);
    if (f.size() != 15) throw ParseError("CSV report: expected 15 fields", line_no);
    CellResult c;
    c.method = f[0];
    c.l = std::stoi(f[1]);
    c.seed = std::stoull(f[2]);
    c.alpha = CsvParse(f[3]);
    c.auc = {CsvParse(f[4]), CsvParse(f[5]), CsvParse(f[6])};
    c.precision = CsvParse(f[7]);
    c.recall = CsvParse(f[8]);
    c.precision_eval = CsvParse(f[9]);
    c.recall_eval = CsvParse(f[10]);
    c.evaluable_users = std::stoull(f[11]);
    c.excluded_users = std::stoull(f[12]);
    c.short_profile_users = std::stoull(f[13]);
    c.seconds = CsvParse(f[14]);
    r.cells.push_back(c);
  }
  return r;
}

std::string FormatTable(const ExperimentReport& report) {
  std::ostringstream os;
  auto cell = [](double v) {
    char buf[16];
    if (std::isnan(v)) return std::string("     -");
    std::snprintf(buf, sizeof buf, "%6.4f", v);
    return std::string(buf);
  };
  os << std::left << std::setw(16) << "method" << std::right << std::setw(4) << "l"
     << "     Gen     Age     Occ    P@K     R@K   P@K*\n";
  for (const CellResult& c : report.MeanOverSeeds()) {
    os << std::left << std::setw(16) << c.method << std::right << std::setw(4) << c.l << "  "
       << cell(c.auc[0]) << "  " << cell(c.auc[1]) << "  " << cell(c.auc[2]) << "  "
       << cell(c.precision) << "  " << cell(c.recall) << "  " << cell(c.precision_eval) << "\n";
  }
  os << "P@K* averages evaluable users only; P@K and R@K count excluded users as 0.\n";
  return os.str();
}

}  // namespace rap::experiment
