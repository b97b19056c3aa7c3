// acpl-engine — evaluation metrics
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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acpl/common.hpp"
#include "acpl/learner.hpp"
#include "acpl/types.hpp"

namespace acpl {

inline std::size_t argmax_index(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// Probability-of-positive-ranks-above-negative statistic, computed with
// midranks so tied scores contribute 1/2. Needs both classes present.
inline double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ShapeError("scores/labels length mismatch");
  if (scores.empty()) throw UndefinedMetricError("cannot compute AUC of an empty set");
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw DomainError("AUC labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }
  if (positives == 0 || positives == n) {
    throw UndefinedMetricError("AUC undefined: only one class present");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) rank_sum_pos += midrank;
    }
    i = j;
  }
  const double np = static_cast<double>(positives);
  const double nn = static_cast<double>(n - positives);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

struct BinaryCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct F1Sensitivity {
  double f1 = 0.0;
  double sensitivity = 0.0;
  bool degenerate = false;  // some denominator vanished and was reported as 0
};

inline F1Sensitivity f1_sensitivity(const BinaryCounts& c) {
  F1Sensitivity out;
  const double tp = static_cast<double>(c.tp);
  if (c.tp + c.fn == 0) {
    out.degenerate = true;
  } else {
    out.sensitivity = tp / static_cast<double>(c.tp + c.fn);
  }
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) {
    out.degenerate = true;
  } else {
    out.f1 = 2.0 * tp / static_cast<double>(denom);
  }
  return out;
}

// One-hot argmax (multiclass, ties to the lowest index) or per-class 0.5
// threshold (multilabel).
inline LabelVector harden(const LabelVector& soft) {
  if (soft.task_kind == TaskKind::multiclass) {
    return LabelVector::one_hot(argmax_index(soft.values), soft.num_classes());
  }
  std::vector<double> bits(soft.num_classes(), 0.0);
  for (std::size_t j = 0; j < soft.num_classes(); ++j) {
    bits[j] = soft.values[j] >= 0.5 ? 1.0 : 0.0;
  }
  return LabelVector::multi_hot(std::move(bits));
}

inline LabelVector harden_probs(std::span<const double> probs, TaskKind task) {
  return harden(LabelVector::soft(std::vector<double>(probs.begin(), probs.end()), task));
}

// Percent of samples assigned to each class after hardening. Multilabel rows
// can count toward several classes, so columns need not sum to 100.
inline std::vector<double> class_distribution_percent(const std::vector<LabelVector>& labels) {
  if (labels.empty()) {
    throw UndefinedMetricError("class distribution of an empty set is undefined");
  }
  const std::size_t c_count = labels.front().num_classes();
  std::vector<double> pct(c_count, 0.0);
  for (const auto& lv : labels) {
    if (lv.num_classes() != c_count) throw ShapeError("label width mismatch");
    const LabelVector hard = harden(lv);
    for (std::size_t j = 0; j < c_count; ++j) pct[j] += hard.values[j];
  }
  for (double& v : pct) v = 100.0 * v / static_cast<double>(labels.size());
  return pct;
}

struct ClassMetrics {
  std::optional<double> auc;  // empty when only one truth class appears
  double f1 = 0.0;
  double sensitivity = 0.0;
  bool degenerate = false;
};

struct MetricReport {
  std::vector<ClassMetrics> per_class;
  std::optional<double> macro_auc;  // mean over classes with defined AUC
  double macro_f1 = 0.0;
  double macro_sensitivity = 0.0;
  std::size_t evaluated_count = 0;
};

namespace detail {

inline std::vector<int> binarize_truth(const LabelVector& truth) {
  std::vector<int> out(truth.num_classes(), 0);
  if (truth.task_kind == TaskKind::multiclass) {
    out[argmax_index(truth.values)] = 1;
  } else {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = truth.values[j] >= 0.5 ? 1 : 0;
  }
  return out;
}

}  // namespace detail

// One-vs-rest metrics from per-sample probability vectors and ground truth.
inline MetricReport score_predictions(const std::vector<std::vector<double>>& probs,
                                      const std::vector<LabelVector>& truth, TaskKind task) {
  if (probs.size() != truth.size()) throw ShapeError("predictions/truth length mismatch");
  if (probs.empty()) throw UndefinedMetricError("cannot evaluate an empty set");
  const std::size_t n = probs.size();
  const std::size_t c_count = truth.front().num_classes();

  std::vector<std::vector<int>> y(n);
  std::vector<LabelVector> hard;
  hard.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (probs[i].size() != c_count || truth[i].num_classes() != c_count) {
      throw ShapeError("class width mismatch at sample " + std::to_string(i));
    }
    y[i] = detail::binarize_truth(truth[i]);
    hard.push_back(harden_probs(probs[i], task));
  }

  MetricReport report;
  report.evaluated_count = n;
  double f1_sum = 0.0, sens_sum = 0.0, auc_sum = 0.0;
  std::size_t auc_defined = 0;
  for (std::size_t c = 0; c < c_count; ++c) {
    ClassMetrics cm;
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    BinaryCounts counts;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = probs[i][c];
      labels[i] = y[i][c];
      const bool pred = hard[i].values[c] >= 0.5;
      const bool pos = labels[i] == 1;
      if (pred && pos) ++counts.tp;
      else if (pred && !pos) ++counts.fp;
      else if (!pred && pos) ++counts.fn;
      else ++counts.tn;
    }
    try {
      cm.auc = roc_auc(scores, labels);
      auc_sum += *cm.auc;
      ++auc_defined;
    } catch (const UndefinedMetricError&) {
      cm.auc = std::nullopt;
    }
    const F1Sensitivity fs = f1_sensitivity(counts);
    cm.f1 = fs.f1;
    cm.sensitivity = fs.sensitivity;
    cm.degenerate = fs.degenerate;
    f1_sum += cm.f1;
    sens_sum += cm.sensitivity;
    report.per_class.push_back(cm);
  }
  if (auc_defined > 0) report.macro_auc = auc_sum / static_cast<double>(auc_defined);
  report.macro_f1 = f1_sum / static_cast<double>(c_count);
  report.macro_sensitivity = sens_sum / static_cast<double>(c_count);
  return report;
}

// Runs the learner over a labelled evaluation set.
inline MetricReport evaluate(const BaseLearner& learner, const std::vector<Sample>& samples,
                             bool use_ema) {
  std::vector<std::vector<double>> probs;
  std::vector<LabelVector> truth;
  probs.reserve(samples.size());
  truth.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.label.has_value()) {
      throw LabelError("evaluation sample id " + std::to_string(s.id) + " has no label");
    }
    probs.push_back(learner.predict(s.features, use_ema));
    truth.push_back(*s.label);
  }
  return score_predictions(probs, truth, learner.task_kind());
}

// Fraction of rows whose hardened prediction equals the hardened truth on
// every class (multilabel exact match; multiclass argmax agreement).
inline double exact_match_fraction(const std::vector<LabelVector>& predicted,
                                   const std::vector<LabelVector>& truth) {
  if (predicted.size() != truth.size()) throw ShapeError("predicted/truth length mismatch");
  if (predicted.empty()) throw UndefinedMetricError("exact-match fraction of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (harden(predicted[i]).values == harden(truth[i]).values) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace acpl
