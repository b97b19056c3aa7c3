// acpl-engine — density-weighted pseudo-label construction
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
#include <span>
#include <string>
#include <vector>

#include "acpl/common.hpp"
#include "acpl/rng.hpp"
#include "acpl/types.hpp"

namespace acpl {

enum class PseudoKind { informative_mixup, model_only, knn_only, random_alpha };

inline std::string to_string(PseudoKind k) {
  switch (k) {
    case PseudoKind::informative_mixup: return "informative_mixup";
    case PseudoKind::model_only: return "model_only";
    case PseudoKind::knn_only: return "knn_only";
    default: return "random_alpha";
  }
}

inline PseudoKind pseudo_kind_from_string(const std::string& s) {
  if (s == "informative_mixup") return PseudoKind::informative_mixup;
  if (s == "model_only") return PseudoKind::model_only;
  if (s == "knn_only") return PseudoKind::knn_only;
  if (s == "random_alpha") return PseudoKind::random_alpha;
  throw ConfigError("unknown pseudo_label strategy '" + s + "'");
}

struct PseudoStrategy {
  PseudoKind kind = PseudoKind::informative_mixup;
  std::uint64_t seed = 0;    // random_alpha only
  double beta_a = 1.0;       // random_alpha only
  double beta_b = 1.0;

  void validate() const {
    if (kind == PseudoKind::random_alpha && (!(beta_a > 0.0) || !(beta_b > 0.0))) {
      throw ConfigError("beta parameters must be positive");
    }
  }
};

// Soft pseudo-label for one unlabelled sample.
//
// The default mixes the model's class probabilities with the neighborhood
// vote, weighted by the clamped density score: dense samples trust the
// model, sparse samples lean on their anchors. The other kinds are the
// ablation arms: pure model, pure neighborhood, and a random Beta-drawn
// mixing weight. `salt` (typically the sample id) decorrelates the
// random_alpha draw per sample at a fixed strategy seed.
inline LabelVector make_pseudo_label(const PseudoStrategy& strategy,
                                     std::span<const double> model_probs,
                                     const LabelVector& knn_vote, double density,
                                     std::uint64_t salt = 0) {
  strategy.validate();
  if (model_probs.size() != knn_vote.num_classes()) {
    throw ShapeError("model output width " + std::to_string(model_probs.size()) +
                     " does not match neighborhood vote width " +
                     std::to_string(knn_vote.num_classes()));
  }
  if (!std::isfinite(density)) throw DomainError("density score is not finite");
  for (double p : model_probs) {
    if (!std::isfinite(p)) throw DomainError("model probability is not finite");
  }

  double alpha = 0.0;
  switch (strategy.kind) {
    case PseudoKind::informative_mixup:
      alpha = clamp01(density);
      break;
    case PseudoKind::model_only:
      alpha = 1.0;
      break;
    case PseudoKind::knn_only:
      alpha = 0.0;
      break;
    case PseudoKind::random_alpha: {
      Random rng(derive_seed(strategy.seed, salt));
      alpha = rng.beta(strategy.beta_a, strategy.beta_b);
      break;
    }
  }

  std::vector<double> mixed(model_probs.size());
  for (std::size_t j = 0; j < mixed.size(); ++j) {
    mixed[j] = alpha * model_probs[j] + (1.0 - alpha) * knn_vote.values[j];
  }
  return LabelVector::soft(mixed, knn_vote.task_kind);
}

}  // namespace acpl
