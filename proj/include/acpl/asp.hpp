// acpl-engine — anchor set purification by mutual-neighbor connectivity
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

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "acpl/common.hpp"
#include "acpl/knn.hpp"

namespace acpl {

struct ConnectivityRow {
  std::int64_t id;
  std::size_t count;
};

struct ConnectivityReport {
  std::vector<ConnectivityRow> rows;  // candidate order preserved
  std::size_t threshold = 0;          // minimum connectivity over candidates
  std::vector<std::int64_t> selected;
};

// Mutual-neighbor connectivity of one candidate: the number of its K nearest
// anchors that list the candidate among their own K nearest unlabelled
// samples. The unlabelled index must cover the stage-start pool, so the
// candidate itself has to be present in it.
inline std::size_t connectivity_count(std::int64_t id, std::span<const double> features,
                                      const AnchorIndex& unlabelled_index,
                                      const AnchorIndex& anchor_index, std::size_t k) {
  if (unlabelled_index.find(id) == nullptr) {
    throw ConsistencyError("candidate id " + std::to_string(id) +
                           " is missing from the unlabelled index");
  }
  std::size_t count = 0;
  for (const auto& anchor : anchor_index.query(features, k)) {
    const AnchorIndex::Entry* entry = anchor_index.find(anchor.id);
    for (const auto& back : unlabelled_index.query(entry->unit_features, k)) {
      if (back.id == id) {
        ++count;
        break;
      }
    }
  }
  return count;
}

// Keeps only the candidates whose connectivity reaches the adaptive minimum:
// loosely connected samples sit at the frontier of the anchored region and
// extend it the most. Empty candidate list yields an empty report.
inline ConnectivityReport purify(const std::vector<std::int64_t>& candidate_ids,
                                 const std::vector<std::vector<double>>& candidate_features,
                                 const AnchorIndex& unlabelled_index,
                                 const AnchorIndex& anchor_index, std::size_t k) {
  if (candidate_ids.size() != candidate_features.size()) {
    throw ShapeError("candidate ids/features length mismatch");
  }
  ConnectivityReport report;
  if (candidate_ids.empty()) return report;

  std::size_t min_count = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < candidate_ids.size(); ++i) {
    const std::size_t c = connectivity_count(candidate_ids[i], candidate_features[i],
                                             unlabelled_index, anchor_index, k);
    report.rows.push_back({candidate_ids[i], c});
    min_count = std::min(min_count, c);
  }
  report.threshold = min_count;
  for (const auto& row : report.rows) {
    if (row.count <= report.threshold) report.selected.push_back(row.id);
  }
  return report;
}

}  // namespace acpl
