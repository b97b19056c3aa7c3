// acpl-engine — command-line experiment harness
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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "acpl/acpl.hpp"

namespace fs = std::filesystem;

namespace {

void require_readable(const std::string& path, const std::string& what) {
  if (!fs::exists(path)) {
    throw acpl::ConfigError(what + " '" + path + "' does not exist");
  }
}

std::size_t worker_count_from_env() {
  const char* raw = std::getenv("ACPL_WORKERS");
  if (raw == nullptr || *raw == '\0') return 1;
  try {
    const long n = std::stol(raw);
    if (n < 1) throw std::invalid_argument(raw);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw acpl::ConfigError(std::string("ACPL_WORKERS='") + raw +
                            "' is not a positive integer");
  }
}

acpl::ExperimentConfig resolve_config(const std::string& config_path,
                                      const std::vector<std::string>& overrides,
                                      std::optional<double> label_fraction,
                                      std::optional<std::uint64_t> seed) {
  acpl::ExperimentConfig cfg;
  if (!config_path.empty()) {
    require_readable(config_path, "config file");
    cfg = acpl::parse_config_file(config_path);
  }
  for (const auto& entry : overrides) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      throw acpl::ConfigError("--set expects key=value, got '" + entry + "'");
    }
    acpl::apply_config_entry(cfg, entry.substr(0, eq), entry.substr(eq + 1));
  }
  if (label_fraction.has_value()) cfg.label_fraction = *label_fraction;
  if (seed.has_value()) cfg.acpl.seed = *seed;
  cfg.validate();
  return cfg;
}

std::vector<acpl::Sample> load_data(const std::string& path, acpl::TaskKind task) {
  require_readable(path, "data file");
  acpl::CsvSchema schema;
  schema.task_kind = task;
  const acpl::LoadedDataset data = acpl::load_csv(path, schema);
  return data.samples;
}

int cmd_generate(const std::string& spec_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed) {
  require_readable(spec_path, "generator spec");
  acpl::GeneratorSpec spec = acpl::load_generator_spec(spec_path);
  if (seed.has_value()) spec.seed = *seed;

  acpl::RunManifest manifest;
  manifest.command = "generate";
  nlohmann::json spec_json;
  {
    std::ifstream in(spec_path);
    in >> spec_json;
  }
  spec_json["seed"] = spec.seed;
  manifest.config_hash = acpl::config_hash_hex(spec_json);
  manifest.inputs = {spec_path};
  manifest.out_dir = out_path;
  manifest.seeds = {spec.seed};
  acpl::write_text_file(out_path + ".manifest.json", acpl::manifest_to_json(manifest).dump(2) + "\n");

  const std::vector<acpl::Sample> samples = acpl::generate_synthetic(spec);
  acpl::save_csv(out_path, samples, spec.classes.size());
  std::cout << "wrote " << samples.size() << " samples to " << out_path << "\n";
  return 0;
}

int cmd_train(const std::string& data_path, const std::string& config_path,
              const std::vector<std::string>& overrides, std::optional<double> label_fraction,
              std::optional<std::uint64_t> seed, const std::string& out_dir) {
  const acpl::ExperimentConfig cfg =
      resolve_config(config_path, overrides, label_fraction, seed);
  const nlohmann::json config_json = acpl::experiment_config_to_json(cfg);

  fs::create_directories(out_dir);
  acpl::RunManifest manifest;
  manifest.command = "train";
  manifest.config_hash = acpl::config_hash_hex(config_json);
  manifest.inputs = {data_path};
  if (!config_path.empty()) manifest.inputs.push_back(config_path);
  manifest.out_dir = out_dir;
  manifest.seeds = {cfg.acpl.seed};
  acpl::write_text_file(fs::path(out_dir) / "manifest.json",
                        acpl::manifest_to_json(manifest).dump(2) + "\n");

  const std::vector<acpl::Sample> data = load_data(data_path, cfg.task_kind);
  const acpl::ExperimentOutcome outcome = acpl::run_experiment(data, cfg);
  acpl::write_run_directory(out_dir, config_json, outcome.result, outcome.learner);

  std::cout << "algorithm " << cfg.algorithm << ": " << outcome.result.stages.size()
            << " stage(s), test macro AUC ";
  if (outcome.result.final_test.macro_auc.has_value()) {
    std::cout << *outcome.result.final_test.macro_auc;
  } else {
    std::cout << "undefined";
  }
  std::cout << "\n";
  return 0;
}

int cmd_ablate(const std::string& data_path, const std::string& config_path,
               const std::vector<std::string>& overrides, const std::string& grid,
               std::vector<std::uint64_t> seeds, std::optional<double> label_fraction,
               const std::string& out_dir) {
  if (seeds.empty()) throw acpl::ConfigError("--seeds must list at least one seed");
  const acpl::ExperimentConfig base =
      resolve_config(config_path, overrides, label_fraction, std::nullopt);
  if (base.algorithm != "acpl") {
    throw acpl::ConfigError("ablation grids run the acpl algorithm; remove 'algorithm = " +
                            base.algorithm + "' from the config");
  }
  const std::vector<acpl::AblationVariant> grid_variants = acpl::load_grid(grid, base);

  const nlohmann::json base_json = acpl::experiment_config_to_json(base);
  fs::create_directories(out_dir);
  acpl::RunManifest manifest;
  manifest.command = "ablate";
  manifest.config_hash = acpl::config_hash_hex(base_json);
  manifest.inputs = {data_path};
  if (!config_path.empty()) manifest.inputs.push_back(config_path);
  if (fs::exists(grid)) manifest.inputs.push_back(grid);
  manifest.out_dir = out_dir;
  manifest.seeds = seeds;
  acpl::write_text_file(fs::path(out_dir) / "manifest.json",
                        acpl::manifest_to_json(manifest).dump(2) + "\n");

  const std::vector<acpl::Sample> data = load_data(data_path, base.task_kind);
  // The ablation shares one holdout per seed; carve with the first seed so
  // every variant and seed sees the same test set.
  const acpl::HoldoutSplit holdout =
      acpl::split_holdout(data, base.test_fraction, base.stratified, seeds.front());
  if (holdout.test.empty()) {
    throw acpl::ConfigError("test_fraction leaves no held-out test data");
  }

  acpl::AblationOptions opts;
  opts.label_fraction = base.label_fraction;
  opts.stratified = base.stratified;
  opts.workers = worker_count_from_env();

  const auto sink = [&](std::size_t variant_index, std::uint64_t seed,
                        const acpl::AcplConfig& cfg, const acpl::AcplResult& result,
                        const acpl::BaseLearner& learner) {
    acpl::ExperimentConfig resolved = base;
    resolved.acpl = cfg;
    const fs::path run_dir = fs::path(out_dir) / grid_variants[variant_index].name /
                             ("seed" + std::to_string(seed));
    acpl::write_run_directory(run_dir, acpl::experiment_config_to_json(resolved), result,
                              learner);
  };

  const std::vector<acpl::AblationRow> rows =
      acpl::run_ablation(holdout.train, holdout.test, grid_variants, seeds, opts, sink);
  acpl::write_ablation_csv(fs::path(out_dir) / "comparison.csv", rows);

  for (const auto& row : rows) {
    std::cout << row.name << ": AUC " << row.mean_auc << " +/- " << row.std_auc << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anti-curriculum pseudo-labelling experiment harness"};
  app.set_version_flag("--version", acpl::kVersion);
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Sample a synthetic dataset CSV from a spec");
  std::string gen_spec, gen_out;
  std::optional<std::uint64_t> gen_seed;
  generate->add_option("--spec", gen_spec, "generator spec JSON")->required();
  generate->add_option("--out", gen_out, "output CSV path")->required();
  generate->add_option("--seed", gen_seed, "override the spec's seed");

  // train
  auto* train = app.add_subcommand("train", "Run one training experiment");
  std::string train_data, train_config, train_out;
  std::vector<std::string> train_sets;
  std::optional<double> train_fraction;
  std::optional<std::uint64_t> train_seed;
  train->add_option("--data", train_data, "dataset CSV")->required();
  train->add_option("--config", train_config, "flat key=value config file");
  train->add_option("--set", train_sets, "config override key=value (repeatable)");
  train->add_option("--label-fraction", train_fraction, "labelled fraction of the training pool");
  train->add_option("--seed", train_seed, "master seed");
  train->add_option("--out", train_out, "run directory")->required();

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Run a variant grid over several seeds");
  std::string ab_data, ab_config, ab_grid, ab_out;
  std::vector<std::string> ab_sets;
  std::vector<std::uint64_t> ab_seeds;
  std::optional<double> ab_fraction;
  ablate->add_option("--data", ab_data, "dataset CSV")->required();
  ablate->add_option("--config", ab_config, "flat key=value config file");
  ablate->add_option("--set", ab_sets, "config override key=value (repeatable)");
  ablate->add_option("--grid", ab_grid,
                     "preset (informativeness|strategies|components) or grid JSON file")
      ->required();
  ablate->add_option("--seeds", ab_seeds, "seed list")->required()->expected(-1);
  ablate->add_option("--label-fraction", ab_fraction, "labelled fraction of the training pool");
  ablate->add_option("--out", ab_out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (generate->parsed()) return cmd_generate(gen_spec, gen_out, gen_seed);
    if (train->parsed()) {
      return cmd_train(train_data, train_config, train_sets, train_fraction, train_seed,
                       train_out);
    }
    return cmd_ablate(ab_data, ab_config, ab_sets, ab_grid, ab_seeds, ab_fraction, ab_out);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version print here
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const acpl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const acpl::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const acpl::SchemaError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const acpl::LabelError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const acpl::SpecError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const acpl::SplitError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const acpl::IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const acpl::Error& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
