// acpl-engine — exact cosine KNN over anchor features
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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acpl/common.hpp"
#include "acpl/types.hpp"

namespace acpl {

// Brute-force cosine-similarity index. Entries hold unit-normalized copies of
// the feature vectors, so a query reduces to one dot product per entry.
class AnchorIndex {
 public:
  struct Entry {
    std::int64_t id;
    std::vector<double> unit_features;
    std::optional<LabelVector> label;
  };

  struct Neighbor {
    std::int64_t id;
    double similarity;
    const std::optional<LabelVector>* label;  // borrowed from the index
  };

  AnchorIndex() = default;

  // features[i] pairs with ids[i]; labels may be empty (label-free index) or
  // aligned with ids. Zero-norm features cannot be normalized.
  static AnchorIndex build(const std::vector<std::int64_t>& ids,
                           const std::vector<std::vector<double>>& features,
                           const std::vector<std::optional<LabelVector>>& labels = {}) {
    if (ids.empty()) throw BuildError("cannot build an index over zero entries");
    if (features.size() != ids.size()) throw ShapeError("ids/features length mismatch");
    if (!labels.empty() && labels.size() != ids.size()) {
      throw ShapeError("ids/labels length mismatch");
    }
    AnchorIndex index;
    index.dim_ = features.front().size();
    if (index.dim_ == 0) throw ShapeError("feature vectors must be non-empty");
    index.entries_.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (features[i].size() != index.dim_) {
        throw ShapeError("feature width mismatch at entry " + std::to_string(i) + ": got " +
                         std::to_string(features[i].size()) + ", expected " +
                         std::to_string(index.dim_));
      }
      double norm2 = 0.0;
      for (double v : features[i]) norm2 += v * v;
      if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw NormalizationError("entry id " + std::to_string(ids[i]) +
                                 " has zero or non-finite norm");
      }
      const double inv = 1.0 / std::sqrt(norm2);
      Entry e;
      e.id = ids[i];
      e.unit_features.resize(index.dim_);
      for (std::size_t j = 0; j < index.dim_; ++j) e.unit_features[j] = features[i][j] * inv;
      if (!labels.empty()) e.label = labels[i];
      index.entries_.push_back(std::move(e));
    }
    return index;
  }

  static AnchorIndex build_from_samples(const std::vector<Sample>& samples,
                                        const std::vector<std::vector<double>>& features) {
    std::vector<std::int64_t> ids;
    std::vector<std::optional<LabelVector>> labels;
    ids.reserve(samples.size());
    labels.reserve(samples.size());
    for (const auto& s : samples) {
      ids.push_back(s.id);
      labels.push_back(s.label);
    }
    return build(ids, features, labels);
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t dim() const { return dim_; }
  const Entry& entry(std::size_t i) const { return entries_.at(i); }

  const Entry* find(std::int64_t id) const {
    for (const auto& e : entries_) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }

  // K nearest by cosine similarity; K is clamped to the entry count.
  // Ordering: similarity descending, then id ascending.
  std::vector<Neighbor> query(std::span<const double> x, std::size_t k) const {
    if (x.size() != dim_) {
      throw ShapeError("query has length " + std::to_string(x.size()) + ", expected " +
                       std::to_string(dim_));
    }
    if (k < 1) throw ConfigError("neighbor count must be at least 1");
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
      throw NormalizationError("query vector has zero or non-finite norm");
    }
    const double inv = 1.0 / std::sqrt(norm2);

    std::vector<Neighbor> all;
    all.reserve(entries_.size());
    for (const auto& e : entries_) {
      double dot = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) dot += e.unit_features[j] * x[j];
      all.push_back({e.id, dot * inv, &e.label});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return a.id < b.id;
    });
    all.resize(std::min(k, all.size()));
    return all;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

// Mean cosine similarity to the K nearest anchors; the bounded density score
// d in [-1, 1] that later gets clamped into a mixing coefficient.
inline double density_score(const AnchorIndex& index, std::span<const double> x, std::size_t k) {
  const auto neighbors = index.query(x, k);
  double sum = 0.0;
  for (const auto& n : neighbors) sum += n.similarity;
  return sum / static_cast<double>(neighbors.size());
}

// Soft KNN label: per-class mean of the K nearest anchors' label vectors.
// Every consulted anchor must carry a label.
inline LabelVector knn_label(const AnchorIndex& index, std::span<const double> x, std::size_t k,
                             std::size_t num_classes, TaskKind task) {
  const auto neighbors = index.query(x, k);
  std::vector<double> mean(num_classes, 0.0);
  for (const auto& n : neighbors) {
    if (!n.label->has_value()) {
      throw LabelError("anchor id " + std::to_string(n.id) + " has no label");
    }
    const LabelVector& lv = n.label->value();
    if (lv.num_classes() != num_classes) {
      throw ShapeError("anchor id " + std::to_string(n.id) + " label width mismatch");
    }
    for (std::size_t j = 0; j < num_classes; ++j) mean[j] += lv.values[j];
  }
  for (double& v : mean) v /= static_cast<double>(neighbors.size());
  return LabelVector::soft(mean, task);
}

}  // namespace acpl
