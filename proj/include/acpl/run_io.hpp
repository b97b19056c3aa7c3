// acpl-engine — experiment configuration, serialization, run directories
//
// Copyright 2026 the acpl-engine authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "acpl/baselines.hpp"
#include "acpl/common.hpp"
#include "acpl/dataset.hpp"
#include "acpl/trainer.hpp"

namespace acpl {

// ---------------------------------------------------------------------------
// Experiment configuration (flat key-value file; flags override)
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::string algorithm = "acpl";  // acpl | supervised | threshold
  TaskKind task_kind = TaskKind::multiclass;
  double label_fraction = 0.05;
  bool stratified = true;
  double test_fraction = 0.2;
  AcplConfig acpl;
  double threshold_confidence = 0.95;
  std::size_t threshold_stages = 3;

  void validate() const {
    if (algorithm != "acpl" && algorithm != "supervised" && algorithm != "threshold") {
      throw ConfigError("unknown algorithm '" + algorithm +
                        "' (expected acpl, supervised or threshold)");
    }
    if (!(label_fraction > 0.0 && label_fraction <= 1.0)) {
      throw ConfigError("label_fraction must lie in (0,1]");
    }
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
      throw ConfigError("test_fraction must lie in [0,1)");
    }
    if (!(threshold_confidence >= 0.0 && threshold_confidence <= 1.0)) {
      throw ConfigError("threshold_confidence must lie in [0,1]");
    }
    acpl.validate();
  }
};

namespace detail {

inline double parse_double_value(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
}

inline std::size_t parse_size_value(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a non-negative integer");
  }
}

inline std::uint64_t parse_u64_value(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not an unsigned integer");
  }
}

inline bool parse_bool_value(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

inline std::string trim_ws(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

// Applies one `key = value` setting; used for both config files and
// command-line overrides. Unknown keys are rejected by name.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
  using namespace detail;
  if (key == "algorithm") cfg.algorithm = value;
  else if (key == "task_kind") cfg.task_kind = task_kind_from_string(value);
  else if (key == "label_fraction") cfg.label_fraction = parse_double_value(key, value);
  else if (key == "stratified") cfg.stratified = parse_bool_value(key, value);
  else if (key == "test_fraction") cfg.test_fraction = parse_double_value(key, value);
  else if (key == "stages") cfg.acpl.stages = parse_size_value(key, value);
  else if (key == "k") cfg.acpl.k = parse_size_value(key, value);
  else if (key == "asp_k") cfg.acpl.asp_k = parse_size_value(key, value);
  else if (key == "learning_rate") cfg.acpl.train.learning_rate = parse_double_value(key, value);
  else if (key == "batch_size") cfg.acpl.train.batch_size = parse_size_value(key, value);
  else if (key == "warmup_epochs") cfg.acpl.train.warmup_epochs = parse_size_value(key, value);
  else if (key == "stage_epochs") cfg.acpl.train.stage_epochs = parse_size_value(key, value);
  else if (key == "optimizer") cfg.acpl.train.optimizer = optimizer_from_string(value);
  else if (key == "weight_init") cfg.acpl.train.weight_init = weight_init_from_string(value);
  else if (key == "pseudo_strategy") cfg.acpl.strategy.kind = pseudo_kind_from_string(value);
  else if (key == "beta_a") cfg.acpl.strategy.beta_a = parse_double_value(key, value);
  else if (key == "beta_b") cfg.acpl.strategy.beta_b = parse_double_value(key, value);
  else if (key == "info_target") cfg.acpl.info_target = informativeness_from_string(value);
  else if (key == "asp_enabled") cfg.acpl.asp_enabled = parse_bool_value(key, value);
  else if (key == "num_gmm_components") cfg.acpl.gmm.num_components = parse_size_value(key, value);
  else if (key == "gmm_tol") cfg.acpl.gmm.tol = parse_double_value(key, value);
  else if (key == "gmm_max_iter") cfg.acpl.gmm.max_iter = parse_size_value(key, value);
  else if (key == "ema_decay") cfg.acpl.ema_decay = parse_double_value(key, value);
  else if (key == "extractor") cfg.acpl.extractor = extractor_from_string(value);
  else if (key == "hidden_units") cfg.acpl.hidden_units = parse_size_value(key, value);
  else if (key == "feature_dim") cfg.acpl.feature_dim = parse_size_value(key, value);
  else if (key == "seed") cfg.acpl.seed = parse_u64_value(key, value);
  else if (key == "threshold_confidence") cfg.threshold_confidence = parse_double_value(key, value);
  else if (key == "threshold_stages") cfg.threshold_stages = parse_size_value(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

// Flat `key = value` file; '#' starts a comment line, blank lines ignored.
inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim_ws(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = detail::trim_ws(t.substr(0, eq));
    const std::string value = detail::trim_ws(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    apply_config_entry(cfg, key, value);
  }
  return cfg;
}

// Keys that an ablation grid may vary per variant (algorithm knobs only;
// pool construction stays shared so variants see identical data).
inline bool is_variant_override_key(const std::string& key) {
  static const std::set<std::string> keys = {
      "stages", "k", "asp_k", "learning_rate", "batch_size", "warmup_epochs",
      "stage_epochs", "optimizer", "weight_init", "pseudo_strategy", "beta_a",
      "beta_b", "info_target", "asp_enabled", "num_gmm_components", "gmm_tol",
      "gmm_max_iter", "ema_decay", "extractor", "hidden_units", "feature_dim"};
  return keys.count(key) > 0;
}

// ---------------------------------------------------------------------------
// JSON serialization (nlohmann keeps object keys sorted, so dumps are
// deterministic for identical values)
// ---------------------------------------------------------------------------

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["algorithm"] = cfg.algorithm;
  j["task_kind"] = to_string(cfg.task_kind);
  j["label_fraction"] = cfg.label_fraction;
  j["stratified"] = cfg.stratified;
  j["test_fraction"] = cfg.test_fraction;
  j["stages"] = cfg.acpl.stages;
  j["k"] = cfg.acpl.k;
  j["asp_k"] = cfg.acpl.asp_k;
  j["learning_rate"] = cfg.acpl.train.learning_rate;
  j["batch_size"] = cfg.acpl.train.batch_size;
  j["warmup_epochs"] = cfg.acpl.train.warmup_epochs;
  j["stage_epochs"] = cfg.acpl.train.stage_epochs;
  j["optimizer"] = to_string(cfg.acpl.train.optimizer);
  j["weight_init"] = to_string(cfg.acpl.train.weight_init);
  j["pseudo_strategy"] = to_string(cfg.acpl.strategy.kind);
  j["beta_a"] = cfg.acpl.strategy.beta_a;
  j["beta_b"] = cfg.acpl.strategy.beta_b;
  j["info_target"] = to_string(cfg.acpl.info_target);
  j["asp_enabled"] = cfg.acpl.asp_enabled;
  j["num_gmm_components"] = cfg.acpl.gmm.num_components;
  j["gmm_tol"] = cfg.acpl.gmm.tol;
  j["gmm_max_iter"] = cfg.acpl.gmm.max_iter;
  j["ema_decay"] = cfg.acpl.ema_decay;
  j["extractor"] = to_string(cfg.acpl.extractor);
  j["hidden_units"] = cfg.acpl.hidden_units;
  j["feature_dim"] = cfg.acpl.feature_dim;
  j["seed"] = cfg.acpl.seed;
  j["threshold_confidence"] = cfg.threshold_confidence;
  j["threshold_stages"] = cfg.threshold_stages;
  return j;
}

inline nlohmann::json metric_report_to_json(const MetricReport& rep) {
  nlohmann::json j;
  j["evaluated_count"] = rep.evaluated_count;
  if (rep.macro_auc.has_value()) j["macro_auc"] = *rep.macro_auc;
  else j["macro_auc"] = nullptr;
  j["macro_f1"] = rep.macro_f1;
  j["macro_sensitivity"] = rep.macro_sensitivity;
  nlohmann::json per = nlohmann::json::array();
  for (const auto& cm : rep.per_class) {
    nlohmann::json c;
    if (cm.auc.has_value()) c["auc"] = *cm.auc;
    else c["auc"] = nullptr;
    c["f1"] = cm.f1;
    c["sensitivity"] = cm.sensitivity;
    c["degenerate"] = cm.degenerate;
    per.push_back(c);
  }
  j["per_class"] = per;
  return j;
}

inline nlohmann::json stage_record_to_json(const StageRecord& rec) {
  nlohmann::json j;
  j["stage"] = rec.stage;
  j["labelled_size"] = rec.labelled_size;
  j["unlabelled_size"] = rec.unlabelled_size;
  j["pseudo_size"] = rec.pseudo_size;
  j["anchor_size"] = rec.anchor_size;
  j["anchors_added"] = rec.anchors_added;
  j["asp_applied"] = rec.asp_applied;
  j["asp_threshold"] = rec.asp_threshold;
  if (rec.gmm_fitted) {
    nlohmann::json g;
    g["iterations"] = rec.gmm.iterations;
    g["final_log_likelihood"] = rec.gmm.final_log_likelihood;
    g["converged"] = rec.gmm.converged;
    g["means"] = rec.gmm_means;
    g["variances"] = rec.gmm_variances;
    g["weights"] = rec.gmm_weights;
    j["gmm"] = g;
  } else {
    j["gmm"] = nullptr;
  }
  j["pseudo_accuracy"] = rec.pseudo_accuracy;
  j["pseudo_truth_counts"] = rec.pseudo_truth_counts;
  j["pseudo_truth_percent"] = rec.pseudo_truth_percent;
  j["train_loss"] = rec.train_loss;
  j["test"] = metric_report_to_json(rec.test);
  j["early_stop"] = rec.early_stop;
  j["stop_reason"] = rec.stop_reason;
  return j;
}

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::vector<std::string> inputs;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  std::string version = kVersion;
};

inline std::string config_hash_hex(const nlohmann::json& config) {
  const std::uint64_t h = tag(config.dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["inputs"] = m.inputs;
  j["out_dir"] = m.out_dir;
  j["seeds"] = m.seeds;
  j["version"] = m.version;
  return j;
}

// ---------------------------------------------------------------------------
// Run-directory emission
// ---------------------------------------------------------------------------

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);  // binary: no newline translation
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline void write_run_directory(const std::filesystem::path& dir,
                                const nlohmann::json& config_json, const AcplResult& result,
                                const BaseLearner& learner) {
  std::filesystem::create_directories(dir / "histograms");
  write_text_file(dir / "config.json", config_json.dump(2) + "\n");

  std::string stages;
  for (const auto& rec : result.stages) stages += stage_record_to_json(rec).dump() + "\n";
  write_text_file(dir / "stages.jsonl", stages);

  write_text_file(dir / "metrics.json", metric_report_to_json(result.final_test).dump(2) + "\n");
  learner.save_checkpoint((dir / "checkpoint.bin").string());

  for (const auto& rec : result.stages) {
    std::ostringstream csv;
    csv << "class,count,percent\n";
    for (std::size_t c = 0; c < rec.pseudo_truth_counts.size(); ++c) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", rec.pseudo_truth_percent[c]);
      csv << c << ',' << rec.pseudo_truth_counts[c] << ',' << buf << "\n";
    }
    write_text_file(dir / "histograms" /
                        ("stage" + std::to_string(rec.stage) + "_class_dist.csv"),
                    csv.str());
  }

  std::ostringstream per_class;
  per_class << "class,auc,f1,sensitivity,degenerate\n";
  for (std::size_t c = 0; c < result.final_test.per_class.size(); ++c) {
    const auto& cm = result.final_test.per_class[c];
    per_class << c << ',';
    if (cm.auc.has_value()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", *cm.auc);
      per_class << buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,", cm.f1, cm.sensitivity);
    per_class << buf << (cm.degenerate ? "1" : "0") << "\n";
  }
  write_text_file(dir / "per_class_metrics.csv", per_class.str());
}

inline void write_ablation_csv(const std::filesystem::path& path,
                               const std::vector<AblationRow>& rows) {
  std::ostringstream csv;
  csv << "variant,config_delta,mean_auc,std_auc,mean_f1,mean_sensitivity\n";
  for (const auto& row : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f", row.mean_auc, row.std_auc,
                  row.mean_f1, row.mean_sensitivity);
    csv << row.name << ",\"" << row.delta << "\"," << buf << "\n";
  }
  write_text_file(path, csv.str());
}

// ---------------------------------------------------------------------------
// Generator spec (JSON file)
// ---------------------------------------------------------------------------

inline GeneratorSpec parse_generator_spec_json(const nlohmann::json& j) {
  try {
    GeneratorSpec spec;
    if (j.contains("task_kind")) spec.task_kind = task_kind_from_string(j.at("task_kind"));
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (!j.contains("classes") || !j.at("classes").is_array()) {
      throw SpecError("generator spec needs a 'classes' array");
    }
    for (const auto& jc : j.at("classes")) {
      ClassSpec cs;
      cs.count = jc.at("count").get<std::size_t>();
      cs.mean = jc.at("mean").get<std::vector<double>>();
      if (jc.contains("cov")) {
        cs.cov = jc.at("cov").get<std::vector<std::vector<double>>>();
      }
      if (jc.contains("variance")) cs.variance = jc.at("variance").get<double>();
      spec.classes.push_back(std::move(cs));
    }
    if (j.contains("coactivation")) {
      spec.coactivation = j.at("coactivation").get<std::vector<std::vector<double>>>();
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed generator spec: ") + e.what());
  }
}

inline GeneratorSpec load_generator_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open generator spec '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError("generator spec '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_generator_spec_json(j);
}

// ---------------------------------------------------------------------------
// Ablation grids
// ---------------------------------------------------------------------------

inline std::vector<AblationVariant> build_preset_grid(const std::string& name,
                                                      const ExperimentConfig& base) {
  std::vector<AblationVariant> grid;
  auto derive = [&](const std::string& variant_name,
                    const std::vector<std::pair<std::string, std::string>>& overrides) {
    ExperimentConfig cfg = base;
    std::string delta;
    for (const auto& [k, v] : overrides) {
      apply_config_entry(cfg, k, v);
      if (!delta.empty()) delta += ";";
      delta += k + "=" + v;
    }
    grid.push_back({variant_name, delta, cfg.acpl});
  };
  if (name == "informativeness") {
    for (const std::string info : {"high", "medium", "low"}) {
      for (const bool asp : {true, false}) {
        derive(info + (asp ? "_asp" : "_noasp"),
               {{"info_target", info}, {"asp_enabled", asp ? "true" : "false"}});
      }
    }
  } else if (name == "strategies") {
    for (const std::string kind :
         {"informative_mixup", "random_alpha", "model_only", "knn_only"}) {
      derive(kind, {{"pseudo_strategy", kind}});
    }
  } else if (name == "components") {
    for (const std::string n : {"2", "3", "4"}) {
      derive("components_" + n, {{"num_gmm_components", n}});
    }
  } else {
    throw ConfigError("unknown grid preset '" + name +
                      "' (expected informativeness, strategies or components)");
  }
  return grid;
}

// A grid is either a preset name or a JSON file: an array of
// {"name": ..., "overrides": {key: value, ...}} objects. Override keys are
// restricted to per-variant algorithm knobs.
inline std::vector<AblationVariant> load_grid(const std::string& path_or_preset,
                                              const ExperimentConfig& base) {
  if (path_or_preset == "informativeness" || path_or_preset == "strategies" ||
      path_or_preset == "components") {
    return build_preset_grid(path_or_preset, base);
  }
  std::ifstream in(path_or_preset);
  if (!in) throw ConfigError("grid '" + path_or_preset + "' is neither a preset nor a readable file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("grid file '" + path_or_preset + "' is not valid JSON: " + e.what());
  }
  if (!j.is_array() || j.empty()) {
    throw ConfigError("grid file must contain a non-empty JSON array");
  }
  std::vector<AblationVariant> grid;
  for (const auto& jv : j) {
    AblationVariant variant;
    try {
      variant.name = jv.at("name").get<std::string>();
      ExperimentConfig cfg = base;
      std::string delta;
      if (jv.contains("overrides")) {
        for (const auto& [key, value] : jv.at("overrides").items()) {
          if (!is_variant_override_key(key)) {
            throw ConfigError("grid key '" + key + "' cannot vary per variant");
          }
          const std::string v = value.is_string() ? value.get<std::string>() : value.dump();
          apply_config_entry(cfg, key, v);
          if (!delta.empty()) delta += ";";
          delta += key + "=" + v;
        }
      }
      variant.delta = delta;
      variant.config = cfg.acpl;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed grid entry: ") + e.what());
    }
    grid.push_back(std::move(variant));
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Train-command pipeline shared by the CLI and the tests
// ---------------------------------------------------------------------------

struct ExperimentOutcome {
  AcplResult result;
  BaseLearner learner;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

inline ExperimentOutcome run_experiment(const std::vector<Sample>& data,
                                        const ExperimentConfig& cfg) {
  cfg.validate();
  const HoldoutSplit holdout =
      split_holdout(data, cfg.test_fraction, cfg.stratified, cfg.acpl.seed);
  if (holdout.test.empty()) {
    throw ConfigError("test_fraction " + std::to_string(cfg.test_fraction) +
                      " leaves no held-out test data to evaluate on");
  }
  DataPools pools =
      DataPools::split(holdout.train, cfg.label_fraction, cfg.stratified, cfg.acpl.seed);
  if (pools.task_kind() != cfg.task_kind) {
    throw ConfigError("configured task_kind does not match the dataset labels");
  }
  BaseLearner learner = make_learner(cfg.acpl, holdout.train.front().features.size(),
                                     pools.num_classes(), pools.task_kind());
  AcplResult result;
  if (cfg.algorithm == "acpl") {
    result = run_acpl(pools, learner, cfg.acpl, holdout.test);
  } else if (cfg.algorithm == "supervised") {
    result = run_supervised(pools, learner, cfg.acpl, holdout.test);
  } else {
    ThresholdPseudoConfig tp;
    tp.confidence = cfg.threshold_confidence;
    tp.stages = cfg.threshold_stages;
    tp.train = cfg.acpl.train;
    tp.seed = cfg.acpl.seed;
    result = run_threshold_pseudo(pools, learner, tp, holdout.test);
  }
  return {std::move(result), std::move(learner), holdout.train.size(), holdout.test.size()};
}

}  // namespace acpl
