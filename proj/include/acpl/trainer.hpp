// acpl-engine — anti-curriculum pseudo-labelling orchestration
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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "acpl/asp.hpp"
#include "acpl/common.hpp"
#include "acpl/dataset.hpp"
#include "acpl/gmm.hpp"
#include "acpl/knn.hpp"
#include "acpl/learner.hpp"
#include "acpl/metrics.hpp"
#include "acpl/pseudo.hpp"
#include "acpl/rng.hpp"
#include "acpl/types.hpp"

namespace acpl {

struct AcplConfig {
  std::size_t stages = 3;  // T; 0 means warm-up only
  std::size_t k = 10;      // neighbors for density and the KNN vote
  std::size_t asp_k = 0;   // neighbors for purification; 0 shares k
  TrainConfig train;       // train.seed is ignored here; phase seeds derive from `seed`
  PseudoStrategy strategy;
  Informativeness info_target = Informativeness::high;
  bool asp_enabled = true;
  GmmOptions gmm;
  double ema_decay = 0.99;
  ExtractorKind extractor = ExtractorKind::linear;
  std::size_t hidden_units = 0;
  std::size_t feature_dim = 0;  // 0 means same as the input dimension
  std::uint64_t seed = 0;

  std::size_t effective_asp_k() const { return asp_k == 0 ? k : asp_k; }

  void validate() const {
    if (k < 1) throw ConfigError("k must be at least 1");
    if (!(ema_decay >= 0.0 && ema_decay <= 1.0)) throw ConfigError("ema_decay must lie in [0,1]");
    if (extractor == ExtractorKind::mlp1 && hidden_units == 0) {
      throw ConfigError("mlp1 extractor needs hidden_units > 0");
    }
    train.validate();
    strategy.validate();
    gmm.validate();
  }
};

// Builds the learner every run entry point shares, so that equal seeds give
// equal initial parameters across algorithm variants.
inline BaseLearner make_learner(const AcplConfig& cfg, std::size_t input_dim,
                                std::size_t num_classes, TaskKind task) {
  cfg.validate();
  LearnerShape shape;
  shape.input_dim = input_dim;
  shape.hidden_units = cfg.hidden_units;
  shape.feature_dim = cfg.feature_dim == 0 ? input_dim : cfg.feature_dim;
  shape.num_classes = num_classes;
  shape.extractor = cfg.extractor;
  return BaseLearner(shape, task, cfg.ema_decay, cfg.train.weight_init,
                     derive_seed(cfg.seed, tag("learner-init")));
}

struct StageRecord {
  std::size_t stage = 0;  // 1-based
  // Pool sizes after migration (or at the stop point for early stops).
  std::size_t labelled_size = 0;
  std::size_t unlabelled_size = 0;
  std::size_t pseudo_size = 0;
  std::size_t anchor_size = 0;
  std::size_t anchors_added = 0;
  std::size_t asp_threshold = 0;
  bool asp_applied = false;
  // Mixture diagnostics for the stage's informativeness fit.
  bool gmm_fitted = false;
  InfoGmm::Diagnostics gmm;
  std::vector<double> gmm_means, gmm_variances, gmm_weights;
  // Pseudo-label quality against the hidden ground truth (oracle-only).
  double pseudo_accuracy = 0.0;
  std::vector<std::size_t> pseudo_truth_counts;
  std::vector<double> pseudo_truth_percent;
  double train_loss = 0.0;
  MetricReport test;
  bool early_stop = false;
  std::string stop_reason;  // empty for a normally completed stage
};

struct AcplResult {
  std::vector<StageRecord> stages;
  MetricReport final_test;
};

namespace detail {

inline void check_disjoint_test_set(const DataPools& pools, const std::vector<Sample>& test_set) {
  std::unordered_set<std::int64_t> pool_ids;
  for (const auto& s : pools.labelled()) pool_ids.insert(s.id);
  for (const auto& s : pools.unlabelled()) pool_ids.insert(s.id);
  for (const auto& s : test_set) {
    if (pool_ids.count(s.id)) {
      throw ConsistencyError("test sample id " + std::to_string(s.id) +
                             " also appears in the training pools");
    }
  }
}

inline std::vector<std::vector<double>> extract_all(const BaseLearner& learner,
                                                    const std::vector<Sample>& samples) {
  std::vector<std::vector<double>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(learner.extract_features(s.features));
  return out;
}

// Hidden-truth composition of the stage's pseudo set, plus exact-match
// accuracy of the soft pseudo-labels. Diagnostics only.
inline void fill_pseudo_diagnostics(StageRecord& rec, const DataPools& pools,
                                    const std::vector<Sample>& pseudo_set) {
  std::vector<LabelVector> predicted, truth;
  predicted.reserve(pseudo_set.size());
  truth.reserve(pseudo_set.size());
  for (const auto& s : pseudo_set) {
    predicted.push_back(*s.label);
    truth.push_back(pools.hidden_truth(s.id));
  }
  rec.pseudo_accuracy = exact_match_fraction(predicted, truth);
  const std::size_t c_count = pools.num_classes();
  rec.pseudo_truth_counts.assign(c_count, 0);
  for (const auto& t : truth) {
    const LabelVector hard = harden(t);
    for (std::size_t j = 0; j < c_count; ++j) {
      if (hard.values[j] >= 0.5) ++rec.pseudo_truth_counts[j];
    }
  }
  rec.pseudo_truth_percent = class_distribution_percent(truth);
}

}  // namespace detail

// One full anti-curriculum run: warm-up, then up to cfg.stages rounds of
// density scoring, informativeness selection, pseudo-labelling, anchor
// purification, joint retraining, and pool migration. Stops early (cleanly,
// with a recorded reason) when the mixture cannot be fit or selects nothing.
inline AcplResult run_acpl(DataPools& pools, BaseLearner& learner, const AcplConfig& cfg,
                           const std::vector<Sample>& test_set) {
  cfg.validate();
  detail::check_disjoint_test_set(pools, test_set);

  TrainConfig phase = cfg.train;
  phase.seed = derive_seed(cfg.seed, tag("phase-warmup"));
  warmup_train(learner, pools, phase);

  AcplResult result;
  for (std::size_t t = 1; t <= cfg.stages; ++t) {
    if (pools.unlabelled().empty()) break;

    StageRecord rec;
    rec.stage = t;

    // Features under the current (non-EMA) extractor; anchors drift as
    // training proceeds, so both indexes are rebuilt every stage.
    const auto anchor_features = detail::extract_all(learner, pools.anchors());
    const auto unlabelled_features = detail::extract_all(learner, pools.unlabelled());
    const AnchorIndex anchor_index =
        AnchorIndex::build_from_samples(pools.anchors(), anchor_features);

    std::vector<double> scores;
    scores.reserve(pools.unlabelled().size());
    for (const auto& f : unlabelled_features) {
      scores.push_back(density_score(anchor_index, f, cfg.k));
    }
    if (!all_finite(scores)) {
      throw TrainingError("density scores diverged (non-finite) at stage " + std::to_string(t));
    }

    auto record_stop = [&](const std::string& reason) {
      rec.early_stop = true;
      rec.stop_reason = reason;
      rec.labelled_size = pools.labelled().size();
      rec.unlabelled_size = pools.unlabelled().size();
      rec.anchor_size = pools.anchors().size();
      rec.pseudo_truth_counts.assign(pools.num_classes(), 0);
      rec.pseudo_truth_percent.assign(pools.num_classes(), 0.0);
      rec.train_loss = acpl_loss(learner, pools);
      rec.test = evaluate(learner, test_set, /*use_ema=*/true);
      result.stages.push_back(rec);
    };

    std::vector<std::size_t> selected;
    InfoGmm gmm;
    try {
      gmm = InfoGmm::fit(scores, derive_seed(cfg.seed, tag("gmm-stage") + t), cfg.gmm);
      rec.gmm_fitted = true;
      rec.gmm = gmm.diagnostics();
      rec.gmm_means = gmm.means();
      rec.gmm_variances = gmm.variances();
      rec.gmm_weights = gmm.weights();
      selected = gmm.select_by_informativeness(scores, cfg.info_target);
    } catch (const FitError&) {
      record_stop("too_few_scores");
      break;
    } catch (const DegenerateDataError&) {
      record_stop("degenerate_scores");
      break;
    }
    if (selected.empty()) {
      record_stop("empty_selection");
      break;
    }

    // Pseudo-label the selection (pool order is id-ascending, so this loop
    // is deterministic).
    PseudoStrategy strategy = cfg.strategy;
    strategy.seed = derive_seed(cfg.seed, tag("pseudo-stage") + t);
    std::vector<Sample> pseudo_set;
    std::vector<std::int64_t> pseudo_ids;
    std::vector<std::vector<double>> pseudo_features;
    pseudo_set.reserve(selected.size());
    for (std::size_t idx : selected) {
      const Sample& u = pools.unlabelled()[idx];
      const auto model_probs = learner.predict(u.features, /*use_ema=*/false);
      const LabelVector vote = knn_label(anchor_index, unlabelled_features[idx], cfg.k,
                                         pools.num_classes(), pools.task_kind());
      Sample s = u;
      s.label = make_pseudo_label(strategy, model_probs, vote, scores[idx],
                                  static_cast<std::uint64_t>(u.id));
      pseudo_set.push_back(std::move(s));
      pseudo_ids.push_back(u.id);
      pseudo_features.push_back(unlabelled_features[idx]);
    }
    pools.set_stage_pseudo(pseudo_set);
    rec.pseudo_size = pseudo_set.size();

    // Anchor update: purified subset, or everything when purification is off.
    const std::size_t anchors_before = pools.anchors().size();
    if (cfg.asp_enabled) {
      std::vector<std::int64_t> unlabelled_ids;
      unlabelled_ids.reserve(pools.unlabelled().size());
      for (const auto& s : pools.unlabelled()) unlabelled_ids.push_back(s.id);
      const AnchorIndex unlabelled_index = AnchorIndex::build(unlabelled_ids, unlabelled_features);
      const ConnectivityReport report =
          purify(pseudo_ids, pseudo_features, unlabelled_index, anchor_index,
                 cfg.effective_asp_k());
      rec.asp_applied = true;
      rec.asp_threshold = report.threshold;
      std::unordered_set<std::int64_t> keep(report.selected.begin(), report.selected.end());
      std::vector<Sample> picked;
      for (const auto& s : pseudo_set) {
        if (keep.count(s.id)) picked.push_back(s);
      }
      pools.add_anchors(picked);
    } else {
      pools.add_anchors(pseudo_set);
    }
    rec.anchors_added = pools.anchors().size() - anchors_before;
    rec.anchor_size = pools.anchors().size();

    TrainConfig stage_cfg = cfg.train;
    stage_cfg.seed = derive_seed(cfg.seed, tag("phase-stage") + t);
    train_stage(learner, pools, stage_cfg);
    rec.train_loss = acpl_loss(learner, pools);

    detail::fill_pseudo_diagnostics(rec, pools, pseudo_set);
    pools.migrate_stage();
    rec.labelled_size = pools.labelled().size();
    rec.unlabelled_size = pools.unlabelled().size();
    rec.test = evaluate(learner, test_set, /*use_ema=*/true);
    result.stages.push_back(rec);
  }

  result.final_test = evaluate(learner, test_set, /*use_ema=*/true);
  return result;
}

// ---------------------------------------------------------------------------
// Ablation harness
// ---------------------------------------------------------------------------

struct AblationVariant {
  std::string name;   // row identifier in the comparison table
  std::string delta;  // human-readable description of what differs
  AcplConfig config;  // seed is overwritten per run
};

struct AblationCell {
  std::uint64_t seed = 0;
  double auc = 0.0;  // NaN when undefined for the run
  double f1 = 0.0;
  double sensitivity = 0.0;
};

struct AblationRow {
  std::string name;
  std::string delta;
  std::vector<AblationCell> per_seed;
  double mean_auc = 0.0, std_auc = 0.0;
  double mean_f1 = 0.0, std_f1 = 0.0;
  double mean_sensitivity = 0.0, std_sensitivity = 0.0;
};

struct AblationOptions {
  double label_fraction = 0.05;
  bool stratified = true;
  std::size_t workers = 1;
};

namespace detail {

inline void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  sd = std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace detail

// Observer for completed ablation runs (used to persist per-run artifacts).
// May be invoked from worker threads, one call per (variant, seed) pair;
// implementations must tolerate concurrent calls for distinct pairs.
using AblationRunSink = std::function<void(std::size_t variant_index, std::uint64_t seed,
                                           const AcplConfig&, const AcplResult&,
                                           const BaseLearner&)>;

// Runs every variant under every seed. Per seed, the labelled/unlabelled
// split and the initial learner parameters are identical across variants, so
// rows differ only through the algorithmic knobs under study. Statistics are
// population mean and standard deviation over seeds.
inline std::vector<AblationRow> run_ablation(const std::vector<Sample>& train_data,
                                             const std::vector<Sample>& test_data,
                                             const std::vector<AblationVariant>& variants,
                                             const std::vector<std::uint64_t>& seeds,
                                             const AblationOptions& opts,
                                             const AblationRunSink& sink = {}) {
  if (variants.empty()) throw ConfigError("ablation grid needs at least one variant");
  if (seeds.size() < 3) throw ConfigError("ablation needs at least 3 seeds");
  for (const auto& v : variants) v.config.validate();

  struct Job {
    std::size_t variant;
    std::size_t seed_pos;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (std::size_t s = 0; s < seeds.size(); ++s) jobs.push_back({v, s});
  }
  std::vector<AblationCell> cells(jobs.size());

  auto run_job = [&](const Job& job) {
    AcplConfig cfg = variants[job.variant].config;
    cfg.seed = seeds[job.seed_pos];
    DataPools pools = DataPools::split(train_data, opts.label_fraction, opts.stratified,
                                      cfg.seed);
    BaseLearner learner =
        make_learner(cfg, pools.labelled().front().features.size(), pools.num_classes(),
                     pools.task_kind());
    const AcplResult result = run_acpl(pools, learner, cfg, test_data);
    if (sink) sink(job.variant, cfg.seed, cfg, result, learner);
    AblationCell cell;
    cell.seed = cfg.seed;
    cell.auc = result.final_test.macro_auc.value_or(std::nan(""));
    cell.f1 = result.final_test.macro_f1;
    cell.sensitivity = result.final_test.macro_sensitivity;
    return cell;
  };

  const std::size_t workers = std::max<std::size_t>(1, opts.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) cells[i] = run_job(jobs[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            cells[i] = run_job(jobs[i]);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  std::vector<AblationRow> rows;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    AblationRow row;
    row.name = variants[v].name;
    row.delta = variants[v].delta;
    std::vector<double> aucs, f1s, sens;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const AblationCell& cell = cells[v * seeds.size() + s];
      row.per_seed.push_back(cell);
      aucs.push_back(cell.auc);
      f1s.push_back(cell.f1);
      sens.push_back(cell.sensitivity);
    }
    detail::mean_std(aucs, row.mean_auc, row.std_auc);
    detail::mean_std(f1s, row.mean_f1, row.std_f1);
    detail::mean_std(sens, row.mean_sensitivity, row.std_sensitivity);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace acpl
