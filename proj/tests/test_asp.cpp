// acpl-engine — tests for mutual-neighbor connectivity and anchor purification
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
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "acpl/asp.hpp"
#include "acpl/rng.hpp"

using namespace acpl;

namespace {

std::vector<double> on_circle(double degrees) {
  const double r = degrees * M_PI / 180.0;
  return {std::cos(r), std::sin(r)};
}

// Independent oracle: cosine KNN by definition, ties broken by ascending id.
std::vector<std::int64_t> oracle_knn(const std::vector<double>& x,
                                     const std::vector<std::int64_t>& ids,
                                     const std::vector<std::vector<double>>& feats,
                                     std::size_t k) {
  auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      dot += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
  };
  std::vector<std::pair<double, std::int64_t>> ranked;
  for (std::size_t i = 0; i < ids.size(); ++i) ranked.push_back({cosine(x, feats[i]), ids[i]});
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) out.push_back(ranked[i].second);
  return out;
}

}  // namespace

TEST_CASE("connectivity counts mutual nearest neighbors", "[asp]") {
  // Anchors at 0° and 90°; unlabelled at 5°, 80°, 200°. With K=1:
  //  - 5° and its anchor 0° point at each other: count 1
  //  - 80° and 90° likewise: count 1
  //  - 200°'s nearest anchor is 90°, whose nearest unlabelled is 80°: count 0
  const auto anchors = AnchorIndex::build({100, 101}, {on_circle(0), on_circle(90)});
  const auto unlabelled = AnchorIndex::build(
      {0, 1, 2}, {on_circle(5), on_circle(80), on_circle(200)});

  CHECK(connectivity_count(0, on_circle(5), unlabelled, anchors, 1) == 1);
  CHECK(connectivity_count(1, on_circle(80), unlabelled, anchors, 1) == 1);
  CHECK(connectivity_count(2, on_circle(200), unlabelled, anchors, 1) == 0);

  // With K=2 every anchor is consulted; 5° is in the top-2 of both anchors.
  CHECK(connectivity_count(0, on_circle(5), unlabelled, anchors, 2) == 2);
}

TEST_CASE("candidates missing from the unlabelled index are rejected", "[asp]") {
  const auto anchors = AnchorIndex::build({100}, {on_circle(0)});
  const auto unlabelled = AnchorIndex::build({0}, {on_circle(5)});
  CHECK_THROWS_AS(connectivity_count(42, on_circle(5), unlabelled, anchors, 1),
                  ConsistencyError);
}

TEST_CASE("purify keeps only minimally connected candidates", "[asp]") {
  // Same geometry as above: counts are (1, 1, 0), minimum 0, so only the
  // isolated 200° candidate survives.
  const auto anchors = AnchorIndex::build({100, 101}, {on_circle(0), on_circle(90)});
  const auto unlabelled = AnchorIndex::build(
      {0, 1, 2}, {on_circle(5), on_circle(80), on_circle(200)});

  const auto report = purify({0, 1, 2}, {on_circle(5), on_circle(80), on_circle(200)},
                             unlabelled, anchors, 1);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].count == 1);
  CHECK(report.rows[1].count == 1);
  CHECK(report.rows[2].count == 0);
  CHECK(report.threshold == 0);
  CHECK(report.selected == std::vector<std::int64_t>{2});
}

TEST_CASE("ties at the minimum connectivity all survive", "[asp]") {
  // Two mutually-anchored candidates and two isolated ones: both isolated
  // candidates share the minimum and are kept in candidate order.
  const auto anchors = AnchorIndex::build({100, 101}, {on_circle(0), on_circle(90)});
  const auto unlabelled = AnchorIndex::build(
      {0, 1, 2, 3}, {on_circle(5), on_circle(80), on_circle(200), on_circle(250)});

  const auto report = purify({3, 0, 2, 1},
                             {on_circle(250), on_circle(5), on_circle(200), on_circle(80)},
                             unlabelled, anchors, 1);
  CHECK(report.threshold == 0);
  CHECK(report.selected == std::vector<std::int64_t>{3, 2});  // candidate order
}

TEST_CASE("uniformly connected pools keep everything", "[asp]") {
  // Every candidate has the same connectivity, so the minimum keeps them all.
  const auto anchors = AnchorIndex::build({100, 101}, {on_circle(0), on_circle(90)});
  const auto unlabelled = AnchorIndex::build({0, 1}, {on_circle(5), on_circle(85)});
  const auto report = purify({0, 1}, {on_circle(5), on_circle(85)},
                             unlabelled, anchors, 1);
  CHECK(report.threshold == 1);
  CHECK(report.selected == std::vector<std::int64_t>{0, 1});
}

TEST_CASE("empty candidate lists produce an empty report", "[asp]") {
  const auto anchors = AnchorIndex::build({100}, {on_circle(0)});
  const auto unlabelled = AnchorIndex::build({0}, {on_circle(5)});
  const auto report = purify({}, {}, unlabelled, anchors, 1);
  CHECK(report.rows.empty());
  CHECK(report.selected.empty());

  CHECK_THROWS_AS(purify({0}, {}, unlabelled, anchors, 1), ShapeError);
}

TEST_CASE("connectivity matches a brute-force oracle", "[asp]") {
  Random rng(6001);
  for (int run = 0; run < 50; ++run) {
    const std::size_t d = 3;
    const std::size_t n_anchor = 3 + rng.uniform_index(6);
    const std::size_t n_unlab = 3 + rng.uniform_index(8);
    const std::size_t k = 1 + rng.uniform_index(4);

    std::vector<std::int64_t> a_ids, u_ids;
    std::vector<std::vector<double>> a_feats, u_feats;
    for (std::size_t i = 0; i < n_anchor; ++i) {
      a_ids.push_back(static_cast<std::int64_t>(500 + i));
      std::vector<double> f(d);
      for (auto& v : f) v = rng.normal();
      a_feats.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < n_unlab; ++i) {
      u_ids.push_back(static_cast<std::int64_t>(i));
      std::vector<double> f(d);
      for (auto& v : f) v = rng.normal();
      u_feats.push_back(std::move(f));
    }
    const auto anchors = AnchorIndex::build(a_ids, a_feats);
    const auto unlabelled = AnchorIndex::build(u_ids, u_feats);

    const auto report = purify(u_ids, u_feats, unlabelled, anchors, k);
    REQUIRE(report.rows.size() == n_unlab);

    std::size_t min_count = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> expect_counts;
    for (std::size_t i = 0; i < n_unlab; ++i) {
      // Definition: anchors in the candidate's top-K whose own top-K
      // unlabelled set contains the candidate.
      std::size_t c = 0;
      for (std::int64_t aid : oracle_knn(u_feats[i], a_ids, a_feats, k)) {
        const auto& af = a_feats[static_cast<std::size_t>(aid - 500)];
        const auto back = oracle_knn(af, u_ids, u_feats, k);
        if (std::find(back.begin(), back.end(), u_ids[i]) != back.end()) ++c;
      }
      expect_counts.push_back(c);
      min_count = std::min(min_count, c);
    }

    for (std::size_t i = 0; i < n_unlab; ++i) {
      REQUIRE(report.rows[i].count == expect_counts[i]);
      REQUIRE(report.rows[i].count <= k);  // bounded by the neighbor count
    }
    CHECK(report.threshold == min_count);
    std::vector<std::int64_t> expect_sel;
    for (std::size_t i = 0; i < n_unlab; ++i) {
      if (expect_counts[i] <= min_count) expect_sel.push_back(u_ids[i]);
    }
    CHECK(report.selected == expect_sel);
  }
}

TEST_CASE("connectivity ignores vector scale", "[asp]") {
  // Cosine geometry: scaling a candidate's features must not change counts.
  const auto anchors = AnchorIndex::build({100, 101}, {on_circle(0), on_circle(90)});
  const auto unlabelled = AnchorIndex::build(
      {0, 1, 2}, {on_circle(5), on_circle(80), on_circle(200)});
  auto scaled = on_circle(5);
  for (auto& v : scaled) v *= 37.5;
  CHECK(connectivity_count(0, scaled, unlabelled, anchors, 1) ==
        connectivity_count(0, on_circle(5), unlabelled, anchors, 1));
}
