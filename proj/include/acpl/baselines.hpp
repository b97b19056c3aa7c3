// acpl-engine — supervised and confidence-threshold baselines
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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "acpl/common.hpp"
#include "acpl/dataset.hpp"
#include "acpl/learner.hpp"
#include "acpl/metrics.hpp"
#include "acpl/trainer.hpp"

namespace acpl {

// Warm-up only, no unlabelled data ever consulted. Phase seeds derive
// exactly as in the anti-curriculum path, so a zero-stage anti-curriculum
// run and this baseline produce identical parameters for equal seeds.
inline AcplResult run_supervised(DataPools& pools, BaseLearner& learner, const AcplConfig& cfg,
                                 const std::vector<Sample>& test_set) {
  cfg.validate();
  detail::check_disjoint_test_set(pools, test_set);
  TrainConfig phase = cfg.train;
  phase.seed = derive_seed(cfg.seed, tag("phase-warmup"));
  warmup_train(learner, pools, phase);
  AcplResult result;
  result.final_test = evaluate(learner, test_set, /*use_ema=*/true);
  return result;
}

struct ThresholdPseudoConfig {
  double confidence = 0.95;  // tau: accepted nominal range [0,1]; 0 accepts everything
  std::size_t stages = 3;
  TrainConfig train;  // train.seed is ignored; phase seeds derive from `seed`
  std::uint64_t seed = 0;

  void validate() const {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
      throw ConfigError("confidence threshold must lie in [0,1]");
    }
    train.validate();
  }
};

// The classic fixed-threshold scheme: every stage, pseudo-label each
// unlabelled sample whose prediction is confident enough — max class
// probability above tau (multiclass) or every per-class probability at
// least tau away from 0.5 (multilabel) — with the hardened model
// prediction, then retrain and migrate. No anchors, no density, no mixture.
inline AcplResult run_threshold_pseudo(DataPools& pools, BaseLearner& learner,
                                       const ThresholdPseudoConfig& cfg,
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

    std::vector<Sample> pseudo_set;
    for (const auto& u : pools.unlabelled()) {
      const auto probs = learner.predict(u.features, /*use_ema=*/false);
      bool confident;
      if (pools.task_kind() == TaskKind::multiclass) {
        confident = probs[argmax_index(probs)] > cfg.confidence;
      } else {
        confident = true;
        for (double p : probs) {
          if (!(std::abs(p - 0.5) > cfg.confidence)) {
            confident = false;
            break;
          }
        }
      }
      if (!confident) continue;
      Sample s = u;
      s.label = harden_probs(probs, pools.task_kind());
      pseudo_set.push_back(std::move(s));
    }

    if (pseudo_set.empty()) {
      rec.early_stop = true;
      rec.stop_reason = "empty_selection";
      rec.labelled_size = pools.labelled().size();
      rec.unlabelled_size = pools.unlabelled().size();
      rec.anchor_size = pools.anchors().size();
      rec.pseudo_truth_counts.assign(pools.num_classes(), 0);
      rec.pseudo_truth_percent.assign(pools.num_classes(), 0.0);
      rec.train_loss = acpl_loss(learner, pools);
      rec.test = evaluate(learner, test_set, /*use_ema=*/true);
      result.stages.push_back(rec);
      break;
    }

    pools.set_stage_pseudo(pseudo_set);
    rec.pseudo_size = pseudo_set.size();
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

}  // namespace acpl
