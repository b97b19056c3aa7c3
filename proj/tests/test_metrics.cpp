// acpl-engine — tests for ROC-AUC, F1/sensitivity, and macro aggregation
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

#include <algorithm>
#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "acpl/learner.hpp"
#include "acpl/metrics.hpp"
#include "acpl/rng.hpp"

using namespace acpl;

namespace {

// O(n^2) oracle: P(score_pos > score_neg) + 0.5 P(tie) over all pairs.
double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("roc auc on the worked examples", "[metrics]") {
  // Perfect ranking.
  CHECK_THAT(roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}),
             Catch::Matchers::WithinAbs(1.0, 1e-15));
  // One inversion: 3 of 4 pairs correct.
  CHECK_THAT(roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 0, 1, 0}),
             Catch::Matchers::WithinAbs(0.75, 1e-15));
  // All scores tied: chance level by midranks.
  CHECK_THAT(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{1, 0, 1, 0}),
             Catch::Matchers::WithinAbs(0.5, 1e-15));
  // Anti-ranking.
  CHECK_THAT(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 0}),
             Catch::Matchers::WithinAbs(0.0, 1e-15));
}

TEST_CASE("roc auc input validation", "[metrics]") {
  CHECK_THROWS_AS(roc_auc(std::vector<double>{}, std::vector<int>{}), UndefinedMetricError);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.5, 0.6}, std::vector<int>{1, 1}),
                  UndefinedMetricError);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.5, 0.6}, std::vector<int>{0, 0}),
                  UndefinedMetricError);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.5}, std::vector<int>{1, 0}), ShapeError);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.5, 0.6}, std::vector<int>{1, 2}), DomainError);
}

TEST_CASE("roc auc agrees with the pairwise oracle", "[metrics]") {
  Random rng(515);
  for (int run = 0; run < 40; ++run) {
    const std::size_t n = 5 + rng.uniform_index(60);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Quantized scores produce plenty of ties.
      scores[i] = std::floor(rng.uniform() * 8.0) / 8.0;
      labels[i] = rng.uniform() < 0.4 ? 1 : 0;
      (labels[i] == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;
    CHECK_THAT(roc_auc(scores, labels),
               Catch::Matchers::WithinAbs(pairwise_auc(scores, labels), 1e-12));
  }
}

TEST_CASE("roc auc complement-and-transform identities", "[metrics]") {
  Random rng(516);
  const std::size_t n = 40;
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform();
    labels[i] = i % 3 == 0 ? 1 : 0;
  }
  const double auc = roc_auc(scores, labels);

  // Flipping labels mirrors the statistic.
  std::vector<int> flipped(n);
  for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - labels[i];
  CHECK_THAT(roc_auc(scores, flipped) + auc, Catch::Matchers::WithinAbs(1.0, 1e-12));

  // AUC is rank-based: any strictly increasing transform leaves it unchanged.
  std::vector<double> warped(n);
  for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(3.0 * scores[i]) - 7.0;
  CHECK_THAT(roc_auc(warped, labels), Catch::Matchers::WithinAbs(auc, 1e-12));
}

TEST_CASE("f1 and sensitivity from counts", "[metrics]") {
  // TP=2, FP=1, FN=1: sensitivity 2/3, F1 = 4/(4+1+1) = 2/3.
  const auto r = f1_sensitivity({2, 1, 1, 5});
  CHECK_THAT(r.sensitivity, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(r.f1, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_FALSE(r.degenerate);

  const auto perfect = f1_sensitivity({4, 0, 0, 6});
  CHECK(perfect.f1 == 1.0);
  CHECK(perfect.sensitivity == 1.0);

  // No actual positives: sensitivity undefined, reported as 0 + degenerate.
  const auto no_pos = f1_sensitivity({0, 2, 0, 8});
  CHECK(no_pos.sensitivity == 0.0);
  CHECK(no_pos.f1 == 0.0);
  CHECK(no_pos.degenerate);

  // Nothing positive anywhere: both denominators vanish.
  const auto empty = f1_sensitivity({0, 0, 0, 10});
  CHECK(empty.degenerate);
  CHECK(empty.f1 == 0.0);
}

TEST_CASE("harden takes the argmax or thresholds at 0.5", "[metrics]") {
  const auto mc = harden(LabelVector::soft({0.2, 0.5, 0.3}, TaskKind::multiclass));
  CHECK(mc.values == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(mc.hardness == Hardness::hard);

  // Argmax ties resolve to the lowest index.
  const auto tie = harden(LabelVector::soft({0.4, 0.4, 0.2}, TaskKind::multiclass));
  CHECK(tie.values == std::vector<double>{1.0, 0.0, 0.0});

  const auto ml = harden(LabelVector::soft({0.5, 0.49, 0.51}, TaskKind::multilabel));
  CHECK(ml.values == std::vector<double>{1.0, 0.0, 1.0});  // >= 0.5 activates

  const auto hp = harden_probs(std::vector<double>{0.1, 0.9}, TaskKind::multiclass);
  CHECK(hp.values == std::vector<double>{0.0, 1.0});
}

TEST_CASE("class distribution percentages", "[metrics]") {
  // Multilabel: [1,1,0] and [1,0,0] distribute as (100, 50, 0).
  const std::vector<LabelVector> ml{LabelVector::multi_hot({1.0, 1.0, 0.0}),
                                    LabelVector::multi_hot({1.0, 0.0, 0.0})};
  const auto pct = class_distribution_percent(ml);
  CHECK(pct == std::vector<double>{100.0, 50.0, 0.0});

  // Multiclass soft labels are hardened first.
  const std::vector<LabelVector> mc{
      LabelVector::soft({0.7, 0.2, 0.1}, TaskKind::multiclass),
      LabelVector::soft({0.1, 0.8, 0.1}, TaskKind::multiclass),
      LabelVector::one_hot(0, 3),
      LabelVector::one_hot(0, 3)};
  const auto pct2 = class_distribution_percent(mc);
  CHECK(pct2 == std::vector<double>{75.0, 25.0, 0.0});

  CHECK_THROWS_AS(class_distribution_percent({}), UndefinedMetricError);
}

TEST_CASE("score_predictions computes one-vs-rest macro metrics", "[metrics]") {
  // Three classes, four samples; class 2 never appears in the truth, so its
  // AUC is undefined and excluded from the macro mean.
  const std::vector<std::vector<double>> probs{
      {0.8, 0.1, 0.1}, {0.6, 0.3, 0.1}, {0.2, 0.7, 0.1}, {0.3, 0.6, 0.1}};
  const std::vector<LabelVector> truth{
      LabelVector::one_hot(0, 3), LabelVector::one_hot(0, 3),
      LabelVector::one_hot(1, 3), LabelVector::one_hot(1, 3)};

  const auto report = score_predictions(probs, truth, TaskKind::multiclass);
  REQUIRE(report.per_class.size() == 3);
  CHECK(report.evaluated_count == 4);

  // Classes 0 and 1 are ranked perfectly.
  REQUIRE(report.per_class[0].auc.has_value());
  CHECK_THAT(*report.per_class[0].auc, Catch::Matchers::WithinAbs(1.0, 1e-15));
  REQUIRE(report.per_class[1].auc.has_value());
  CHECK_THAT(*report.per_class[1].auc, Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_FALSE(report.per_class[2].auc.has_value());

  REQUIRE(report.macro_auc.has_value());
  CHECK_THAT(*report.macro_auc, Catch::Matchers::WithinAbs(1.0, 1e-15));  // mean over defined

  // All predictions correct: per-class F1 = 1 where the class occurs; class 2
  // has no positives and no predicted positives, so it is degenerate with 0.
  CHECK_THAT(report.per_class[0].f1, Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK(report.per_class[2].degenerate);
  CHECK_THAT(report.macro_f1, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(report.macro_sensitivity, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
}

TEST_CASE("score_predictions with partially wrong predictions", "[metrics]") {
  // Binary task, one mistake each way.
  const std::vector<std::vector<double>> probs{
      {0.9, 0.1}, {0.4, 0.6}, {0.3, 0.7}, {0.8, 0.2}};
  const std::vector<LabelVector> truth{
      LabelVector::one_hot(0, 2), LabelVector::one_hot(0, 2),
      LabelVector::one_hot(1, 2), LabelVector::one_hot(1, 2)};

  const auto report = score_predictions(probs, truth, TaskKind::multiclass);
  // Class 0 scores (0.9, 0.4, 0.3, 0.8), truth (1,1,0,0): pairs
  // (0.9>0.3, 0.9>0.8, 0.4>0.3, 0.4<0.8) -> 3/4.
  CHECK_THAT(*report.per_class[0].auc, Catch::Matchers::WithinAbs(0.75, 1e-15));
  // Confusion per class: TP=1, FP=1, FN=1 -> f1 = 2/4 = 0.5, sens = 0.5.
  CHECK_THAT(report.macro_f1, Catch::Matchers::WithinAbs(0.5, 1e-15));
  CHECK_THAT(report.macro_sensitivity, Catch::Matchers::WithinAbs(0.5, 1e-15));

  CHECK_THROWS_AS(score_predictions({}, {}, TaskKind::multiclass), UndefinedMetricError);
  CHECK_THROWS_AS(score_predictions(probs, {truth[0]}, TaskKind::multiclass), ShapeError);
}

TEST_CASE("multilabel evaluation thresholds at 0.5", "[metrics]") {
  const std::vector<std::vector<double>> probs{{0.9, 0.4}, {0.6, 0.6}, {0.1, 0.2}};
  const std::vector<LabelVector> truth{LabelVector::multi_hot({1.0, 0.0}),
                                       LabelVector::multi_hot({1.0, 1.0}),
                                       LabelVector::multi_hot({0.0, 0.0})};
  const auto report = score_predictions(probs, truth, TaskKind::multilabel);
  // Class 0: predictions (1,1,0) == truth exactly.
  CHECK_THAT(report.per_class[0].f1, Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(*report.per_class[0].auc, Catch::Matchers::WithinAbs(1.0, 1e-15));
  // Class 1: predicted (0,1,0), truth (0,1,0): perfect as well.
  CHECK_THAT(report.per_class[1].f1, Catch::Matchers::WithinAbs(1.0, 1e-15));
}

TEST_CASE("evaluate runs the learner over labelled samples", "[metrics]") {
  LearnerShape shape;
  shape.input_dim = 2;
  shape.feature_dim = 2;
  shape.num_classes = 2;
  BaseLearner lrn(shape, TaskKind::multiclass, 0.99, WeightInit::identity, 0);
  // Identity features + zero head: uniform probabilities everywhere; AUC is
  // chance, F1 picks class 0 (argmax tie to index 0).
  std::vector<Sample> samples(4);
  for (std::size_t i = 0; i < 4; ++i) {
    samples[i].id = static_cast<std::int64_t>(i);
    samples[i].features = {static_cast<double>(i), 1.0};
    samples[i].label = LabelVector::one_hot(i % 2, 2);
  }
  const auto report = evaluate(lrn, samples, false);
  CHECK(report.evaluated_count == 4);
  REQUIRE(report.macro_auc.has_value());
  CHECK_THAT(*report.macro_auc, Catch::Matchers::WithinAbs(0.5, 1e-15));

  samples[1].label.reset();
  CHECK_THROWS_AS(evaluate(lrn, samples, false), LabelError);
}

TEST_CASE("exact match fraction compares hardened labels", "[metrics]") {
  const std::vector<LabelVector> pred{
      LabelVector::soft({0.9, 0.1}, TaskKind::multiclass),
      LabelVector::soft({0.2, 0.8}, TaskKind::multiclass),
      LabelVector::soft({0.6, 0.4}, TaskKind::multiclass)};
  const std::vector<LabelVector> truth{
      LabelVector::one_hot(0, 2), LabelVector::one_hot(0, 2), LabelVector::one_hot(0, 2)};
  CHECK_THAT(exact_match_fraction(pred, truth),
             Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));

  // Multilabel exact match needs every class right.
  const std::vector<LabelVector> mp{LabelVector::soft({0.9, 0.6}, TaskKind::multilabel)};
  CHECK(exact_match_fraction(mp, {LabelVector::multi_hot({1.0, 1.0})}) == 1.0);
  CHECK(exact_match_fraction(mp, {LabelVector::multi_hot({1.0, 0.0})}) == 0.0);

  CHECK_THROWS_AS(exact_match_fraction({}, {}), UndefinedMetricError);
  CHECK_THROWS_AS(exact_match_fraction(pred, {truth[0]}), ShapeError);
}
