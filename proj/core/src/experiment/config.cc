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

#include "rap/experiment/config.h"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rap/errors.h"

namespace rap::experiment {

namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> SplitList(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    std::string_view part = Trim(s.substr(0, comma));
    if (!part.empty()) out.push_back(part);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void Bad(std::string_view key, std::string_view value, std::string_view want) {
  throw ValidationError("config key '" + std::string(key) + "': expected " + std::string(want) +
                        ", got '" + std::string(value) + "'");
}

double ToDouble(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(std::string(v), &used);
    if (used != v.size()) Bad(key, v, "a number");
    return d;
  } catch (const std::logic_error&) {
    Bad(key, v, "a number");
  }
}

template <typename Int>
Int ToInt(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) Bad(key, v, "an integer");
  return out;
}

std::string FormatDouble(double d) {
  std::ostringstream os;
  os << std::setprecision(17) << d;
  return os.str();
}

template <typename T, typename F>
std::string Join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt(xs[i]);
  }
  return out;
}

}  // namespace

FlatConfig ParseFlatConfig(std::string_view text) {
  FlatConfig out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    const std::string_view key = Trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line_no);
    out[std::string(key)] = std::string(Trim(line.substr(eq + 1)));
  }
  return out;
}

FlatConfig LoadFlatConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseFlatConfig(ss.str());
}

std::string FormatFlatConfig(const FlatConfig& config) {
  std::string out;
  for (const auto& [k, v] : config) out += k + " = " + v + "\n";
  return out;
}

std::vector<data::Attribute> ParseAttributeList(std::string_view text) {
  std::vector<data::Attribute> out;
  for (std::string_view part : SplitList(text)) out.push_back(data::ParseAttribute(part));
  if (out.empty()) throw ValidationError("empty attribute list");
  return out;
}

std::string FormatAttributeList(const std::vector<data::Attribute>& attributes) {
  return Join(attributes, [](data::Attribute a) { return std::string(data::AttributeName(a)); });
}

const std::vector<std::string>& ExperimentConfig::Keys() {
  static const std::vector<std::string> keys = {
      "data_dir",        "ratings",        "users",          "seeds",
      "l_values",        "methods",        "alpha_values",   "top_k",
      "train_fraction",  "blurme_fraction", "ldp_epsilon",   "alpha",
      "lambda",          "learning_rate",  "batch_size",     "epochs",
      "train_k",         "attributes",     "negatives_per_positive",
      "embed_dim",       "rec_hidden",     "att_hidden",     "max_sequence",
      "attacker_init",   "adversary_hidden", "adversary_epochs",
      "adversary_learning_rate", "adversary_batch_size", "cache_dir", "output_dir"};
  return keys;
}

void ExperimentConfig::Set(std::string_view key, std::string_view value) {
  if (key == "data_dir") {
    ratings_path = std::filesystem::path(value) / "u.data";
    users_path = std::filesystem::path(value) / "u.user";
  } else if (key == "ratings") {
    ratings_path = value;
  } else if (key == "users") {
    users_path = value;
  } else if (key == "seeds") {
    seeds.clear();
    for (auto p : SplitList(value)) seeds.push_back(ToInt<std::uint64_t>(key, p));
  } else if (key == "l_values") {
    l_values.clear();
    for (auto p : SplitList(value)) l_values.push_back(ToInt<int>(key, p));
  } else if (key == "methods") {
    methods.clear();
    for (auto p : SplitList(value)) methods.emplace_back(p);
  } else if (key == "alpha_values") {
    alpha_values.clear();
    for (auto p : SplitList(value)) alpha_values.push_back(ToDouble(key, p));
  } else if (key == "top_k") {
    top_k = ToInt<std::size_t>(key, value);
  } else if (key == "train_fraction") {
    train_fraction = ToDouble(key, value);
  } else if (key == "blurme_fraction") {
    blurme_fraction = ToDouble(key, value);
  } else if (key == "ldp_epsilon") {
    ldp_epsilon = ToDouble(key, value);
  } else if (key == "alpha") {
    train.alpha = ToDouble(key, value);
  } else if (key == "lambda") {
    train.lambda = ToDouble(key, value);
  } else if (key == "learning_rate") {
    train.learning_rate = ToDouble(key, value);
  } else if (key == "batch_size") {
    train.batch_size = ToInt<std::size_t>(key, value);
  } else if (key == "epochs") {
    train.epochs = ToInt<int>(key, value);
  } else if (key == "train_k") {
    train.train_k = ToInt<std::size_t>(key, value);
  } else if (key == "attributes") {
    train.attributes = ParseAttributeList(value);
  } else if (key == "negatives_per_positive") {
    train.negatives_per_positive = ToInt<std::size_t>(key, value);
  } else if (key == "embed_dim") {
    train.embed_dim = ToInt<std::size_t>(key, value);
  } else if (key == "rec_hidden") {
    train.rec_hidden = ToInt<std::size_t>(key, value);
  } else if (key == "att_hidden") {
    train.att_hidden = ToInt<std::size_t>(key, value);
  } else if (key == "max_sequence") {
    train.max_sequence = ToInt<std::size_t>(key, value);
  } else if (key == "attacker_init") {
    if (value == "fan_in_scaled") {
      train.attacker_init = model::AttackerInit::kFanInScaled;
    } else if (value == "unit_uniform") {
      train.attacker_init = model::AttackerInit::kUnitUniform;
    } else {
      Bad(key, value, "fan_in_scaled or unit_uniform");
    }
  } else if (key == "adversary_hidden") {
    adversary.hidden = ToInt<std::size_t>(key, value);
  } else if (key == "adversary_epochs") {
    adversary.epochs = ToInt<int>(key, value);
  } else if (key == "adversary_learning_rate") {
    adversary.learning_rate = ToDouble(key, value);
  } else if (key == "adversary_batch_size") {
    adversary.batch_size = ToInt<std::size_t>(key, value);
  } else if (key == "cache_dir") {
    cache_dir = value;
  } else if (key == "output_dir") {
    output_dir = value;
  } else {
    throw ValidationError("unknown config key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::Apply(const FlatConfig& config) {
  // data_dir first so explicit ratings/users entries win.
  if (auto it = config.find("data_dir"); it != config.end()) Set(it->first, it->second);
  for (const auto& [k, v] : config) {
    if (k != "data_dir") Set(k, v);
  }
}

FlatConfig ExperimentConfig::ToFlat() const {
  FlatConfig f;
  f["ratings"] = ratings_path.string();
  f["users"] = users_path.string();
  f["seeds"] = Join(seeds, [](std::uint64_t s) { return std::to_string(s); });
  f["l_values"] = Join(l_values, [](int l) { return std::to_string(l); });
  f["methods"] = Join(methods, [](const std::string& m) { return m; });
  f["alpha_values"] = Join(alpha_values, FormatDouble);
  f["top_k"] = std::to_string(top_k);
  f["train_fraction"] = FormatDouble(train_fraction);
  f["blurme_fraction"] = FormatDouble(blurme_fraction);
  f["ldp_epsilon"] = FormatDouble(ldp_epsilon);
  f["alpha"] = FormatDouble(train.alpha);
  f["lambda"] = FormatDouble(train.lambda);
  f["learning_rate"] = FormatDouble(train.learning_rate);
  f["batch_size"] = std::to_string(train.batch_size);
  f["epochs"] = std::to_string(train.epochs);
  f["train_k"] = std::to_string(train.train_k);
  f["attributes"] = FormatAttributeList(train.attributes);
  f["negatives_per_positive"] = std::to_string(train.negatives_per_positive);
  f["embed_dim"] = std::to_string(train.embed_dim);
  f["rec_hidden"] = std::to_string(train.rec_hidden);
  f["att_hidden"] = std::to_string(train.att_hidden);
  f["max_sequence"] = std::to_string(train.max_sequence);
  f["attacker_init"] = train.attacker_init == model::AttackerInit::kFanInScaled
                           ? "fan_in_scaled"
                           : "unit_uniform";
  f["adversary_hidden"] = std::to_string(adversary.hidden);
  f["adversary_epochs"] = std::to_string(adversary.epochs);
  f["adversary_learning_rate"] = FormatDouble(adversary.learning_rate);
  f["adversary_batch_size"] = std::to_string(adversary.batch_size);
  f["cache_dir"] = cache_dir.string();
  f["output_dir"] = output_dir.string();
  return f;
}

void ExperimentConfig::Validate() const {
  train.Validate();
  if (seeds.empty()) throw ValidationError("no seeds configured");
  if (l_values.empty()) throw ValidationError("no l values configured");
  for (int l : l_values) {
    if (l <= 0) throw ValidationError("l must be positive");
  }
  for (const auto& m : methods) {
    if (m != "original" && m != "rap" && m != "blurme" && m != "ldp") {
      throw ValidationError("unknown method '" + m + "'");
    }
  }
  if (top_k == 0) throw ValidationError("top_k must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train_fraction must lie in (0, 1)");
  }
  if (!(blurme_fraction >= 0.0)) throw ValidationError("blurme_fraction must be >= 0");
  if (!(ldp_epsilon > 0.0)) throw ValidationError("ldp_epsilon must be > 0");
  for (double a : alpha_values) {
    if (!(a >= 0.0)) throw ValidationError("alpha values must be >= 0");
  }
  if (adversary.epochs < 0 || adversary.hidden == 0 || adversary.batch_size == 0 ||
      !(adversary.learning_rate > 0.0)) {
    throw ValidationError("invalid adversary settings");
  }
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  ExperimentConfig cfg;
  cfg.Apply(LoadFlatConfig(path));
  return cfg;
}

}  // namespace rap::experiment
