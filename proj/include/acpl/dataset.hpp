// acpl-engine — CSV ingestion, synthetic data generation, pool bookkeeping
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
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "acpl/common.hpp"
#include "acpl/rng.hpp"
#include "acpl/types.hpp"

namespace acpl {

// ---------------------------------------------------------------------------
// CSV ingestion
//
// On-disk format: header `id,f0..f{D-1},y0..y{C-1}`, UTF-8, '.' decimal
// separator. Label cells are all empty on unlabelled rows.
// ---------------------------------------------------------------------------

struct CsvSchema {
  std::string id_column = "id";
  std::string feature_prefix = "f";
  std::string label_prefix = "y";
  TaskKind task_kind = TaskKind::multiclass;
};

struct LoadedDataset {
  std::vector<Sample> samples;
  std::size_t num_features = 0;
  std::size_t num_classes = 0;
  TaskKind task_kind = TaskKind::multiclass;

  std::size_t unlabelled_count() const {
    std::size_t n = 0;
    for (const auto& s : samples) {
      if (!s.label.has_value()) ++n;
    }
    return n;
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_double_cell(const std::string& cell, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(v)) {
      throw ParseError("line " + std::to_string(line_no) + ": non-finite value '" + cell + "'");
    }
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + cell + "' as a number");
  }
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline LoadedDataset load_csv(const std::string& path, const CsvSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::string header_line;
  if (!std::getline(in, header_line)) throw SchemaError(path + ": empty file");
  const auto header = detail::split_csv_line(detail::trim(header_line));

  // Header layout: id column, then feature columns, then label columns.
  if (header.empty() || detail::trim(header[0]) != schema.id_column) {
    throw SchemaError(path + ": first column must be '" + schema.id_column + "'");
  }
  std::size_t num_features = 0;
  std::size_t i = 1;
  while (i < header.size() &&
         detail::trim(header[i]) == schema.feature_prefix + std::to_string(num_features)) {
    ++num_features;
    ++i;
  }
  std::size_t num_classes = 0;
  while (i < header.size() &&
         detail::trim(header[i]) == schema.label_prefix + std::to_string(num_classes)) {
    ++num_classes;
    ++i;
  }
  if (i != header.size()) {
    throw SchemaError(path + ": unexpected header column '" + detail::trim(header[i]) + "'");
  }
  if (num_features == 0) throw SchemaError(path + ": no feature columns found");
  if (num_classes == 0) throw SchemaError(path + ": no label columns found");

  LoadedDataset out;
  out.num_features = num_features;
  out.num_classes = num_classes;
  out.task_kind = schema.task_kind;

  std::unordered_set<std::int64_t> seen_ids;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 1 + num_features + num_classes) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(1 + num_features + num_classes) + " cells, got " +
                       std::to_string(cells.size()));
    }
    Sample s;
    const double id_val = detail::parse_double_cell(cells[0], line_no);
    s.id = static_cast<std::int64_t>(id_val);
    if (static_cast<double>(s.id) != id_val) {
      throw ParseError("line " + std::to_string(line_no) + ": id is not an integer");
    }
    if (!seen_ids.insert(s.id).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate id " + std::to_string(s.id));
    }
    s.features.reserve(num_features);
    for (std::size_t f = 0; f < num_features; ++f) {
      s.features.push_back(detail::parse_double_cell(cells[1 + f], line_no));
    }

    // Label cells: either all empty (unlabelled row) or all present.
    std::size_t empty_cells = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (detail::trim(cells[1 + num_features + c]).empty()) ++empty_cells;
    }
    if (empty_cells == num_classes) {
      s.label.reset();
    } else if (empty_cells == 0) {
      LabelVector y;
      y.task_kind = schema.task_kind;
      y.hardness = Hardness::hard;
      y.values.reserve(num_classes);
      for (std::size_t c = 0; c < num_classes; ++c) {
        y.values.push_back(detail::parse_double_cell(cells[1 + num_features + c], line_no));
      }
      try {
        y.validate();
      } catch (const LabelError& e) {
        throw LabelError("line " + std::to_string(line_no) + ": " + e.what());
      }
      s.label = std::move(y);
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": partially empty label cells");
    }
    out.samples.push_back(std::move(s));
  }
  if (out.samples.empty()) throw SchemaError(path + ": no data rows");
  return out;
}

inline void save_csv(const std::string& path, const std::vector<Sample>& samples,
                     std::size_t num_classes) {
  if (samples.empty()) throw IoError("refusing to write an empty dataset to '" + path + "'");
  const std::size_t num_features = samples.front().features.size();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "id";
  for (std::size_t f = 0; f < num_features; ++f) out << ",f" << f;
  for (std::size_t c = 0; c < num_classes; ++c) out << ",y" << c;
  out << "\n";
  char buf[64];
  for (const auto& s : samples) {
    if (s.features.size() != num_features) {
      throw SchemaError("sample " + std::to_string(s.id) + " has inconsistent feature width");
    }
    out << s.id;
    for (double v : s.features) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    if (s.label.has_value()) {
      if (s.label->num_classes() != num_classes) {
        throw SchemaError("sample " + std::to_string(s.id) + " has inconsistent label width");
      }
      for (double v : s.label->values) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
      }
    } else {
      for (std::size_t c = 0; c < num_classes; ++c) out << ',';
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Synthetic imbalanced dataset generation
// ---------------------------------------------------------------------------

struct ClassSpec {
  std::size_t count = 0;
  std::vector<double> mean;
  // Full covariance matrix (row-major, D x D). Leave empty and set `variance`
  // for an isotropic class.
  std::vector<std::vector<double>> cov;
  double variance = 1.0;
};

struct GeneratorSpec {
  std::vector<ClassSpec> classes;
  TaskKind task_kind = TaskKind::multiclass;
  // Multilabel only: coactivation[i][j] = probability that a sample generated
  // from class i also carries label j. Diagonal is implicitly 1.
  std::vector<std::vector<double>> coactivation;
  std::uint64_t seed = 0;

  std::size_t dim() const { return classes.empty() ? 0 : classes.front().mean.size(); }
};

namespace detail {

// Cholesky-like factorization accepting positive semi-definite input; zero
// pivots produce zero columns. Throws SpecError on an indefinite matrix.
inline std::vector<std::vector<double>> psd_cholesky(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  for (const auto& row : a) {
    if (row.size() != n) throw SpecError("covariance matrix is not square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(a[i][j] - a[j][i]) > 1e-9 * (1.0 + std::abs(a[i][j]))) {
        throw SpecError("covariance matrix is not symmetric");
      }
    }
  }
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  const double tol = 1e-10;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (d < -tol * (1.0 + std::abs(a[j][j]))) {
      throw SpecError("covariance matrix is not positive semi-definite");
    }
    if (d <= tol) {
      // Semi-definite direction: propagate zeros, but reject if anything
      // below needs a nonzero entry in this column.
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = a[i][j];
        for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
        if (std::abs(s) > 1e-8 * (1.0 + std::abs(a[i][j]))) {
          throw SpecError("covariance matrix is not positive semi-definite");
        }
      }
      continue;
    }
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  return l;
}

}  // namespace detail

inline std::vector<Sample> generate_synthetic(const GeneratorSpec& spec) {
  if (spec.classes.empty()) throw SpecError("generator spec has no classes");
  const std::size_t num_classes = spec.classes.size();
  const std::size_t dim = spec.dim();
  if (dim == 0) throw SpecError("class 0 has an empty mean vector");

  std::vector<std::vector<std::vector<double>>> chol(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const auto& cs = spec.classes[c];
    if (cs.count < 1) throw SpecError("class " + std::to_string(c) + " has count 0");
    if (cs.mean.size() != dim) {
      throw SpecError("class " + std::to_string(c) + " mean has wrong dimension");
    }
    if (!cs.cov.empty()) {
      if (cs.cov.size() != dim) {
        throw SpecError("class " + std::to_string(c) + " covariance has wrong dimension");
      }
      chol[c] = detail::psd_cholesky(cs.cov);
    } else {
      if (cs.variance < 0.0) throw SpecError("class " + std::to_string(c) + " variance is negative");
    }
  }
  if (spec.task_kind == TaskKind::multilabel) {
    if (spec.coactivation.size() != num_classes) {
      throw SpecError("coactivation table must have one row per class");
    }
    for (const auto& row : spec.coactivation) {
      if (row.size() != num_classes) throw SpecError("coactivation table must be square");
      for (double p : row) {
        if (!(p >= 0.0 && p <= 1.0)) throw SpecError("coactivation entries must lie in [0,1]");
      }
    }
  }

  std::vector<Sample> samples;
  std::int64_t next_id = 0;
  std::vector<double> z(dim);
  for (std::size_t c = 0; c < num_classes; ++c) {
    // Per-class substream: class order never perturbs another class's draws.
    Random rng(derive_seed(spec.seed, tag("gen-class") + c));
    const auto& cs = spec.classes[c];
    const double sigma = std::sqrt(cs.variance);
    for (std::size_t k = 0; k < cs.count; ++k) {
      Sample s;
      s.id = next_id++;
      s.features.resize(dim);
      for (std::size_t d = 0; d < dim; ++d) z[d] = rng.normal();
      if (!chol[c].empty()) {
        for (std::size_t i = 0; i < dim; ++i) {
          double v = cs.mean[i];
          for (std::size_t j = 0; j <= i; ++j) v += chol[c][i][j] * z[j];
          s.features[i] = v;
        }
      } else {
        for (std::size_t d = 0; d < dim; ++d) s.features[d] = cs.mean[d] + sigma * z[d];
      }
      if (spec.task_kind == TaskKind::multiclass) {
        s.label = LabelVector::one_hot(c, num_classes);
      } else {
        std::vector<double> bits(num_classes, 0.0);
        bits[c] = 1.0;
        for (std::size_t j = 0; j < num_classes; ++j) {
          if (j == c) continue;
          if (rng.uniform() < spec.coactivation[c][j]) bits[j] = 1.0;
        }
        s.label = LabelVector::multi_hot(std::move(bits));
      }
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

// ---------------------------------------------------------------------------
// The four evolving pools: labelled, unlabelled, stage pseudo set, anchors.
//
// Ground truth of every sample is retained in a side table so evaluation
// oracles can score pseudo-labels; training paths only ever see the pool
// vectors, where unlabelled samples carry no label.
// ---------------------------------------------------------------------------

class DataPools {
 public:
  static DataPools split(const std::vector<Sample>& dataset, double labelled_fraction,
                         bool stratified, std::uint64_t seed) {
    if (dataset.empty()) throw SplitError("cannot split an empty dataset");
    if (!(labelled_fraction > 0.0 && labelled_fraction <= 1.0)) {
      throw SplitError("labelled_fraction must lie in (0, 1]");
    }
    const std::size_t num_classes = dataset.front().label.has_value()
                                        ? dataset.front().label->num_classes()
                                        : 0;
    for (const auto& s : dataset) {
      if (!s.label.has_value()) {
        throw SplitError("sample " + std::to_string(s.id) + " is unlabelled; split requires full labels");
      }
      if (!all_finite(s.features)) {
        throw SplitError("sample " + std::to_string(s.id) + " has non-finite features");
      }
    }

    DataPools pools;
    pools.num_classes_ = num_classes;
    pools.task_kind_ = dataset.front().label->task_kind;
    for (const auto& s : dataset) pools.hidden_.emplace(s.id, *s.label);
    pools.total_size_ = dataset.size();

    const std::unordered_set<std::int64_t> chosen =
        pick_ids(dataset, labelled_fraction, stratified, seed, num_classes, pools.task_kind_);

    for (const auto& s : dataset) {
      if (chosen.count(s.id)) {
        pools.labelled_.push_back(s);
      } else {
        Sample u = s;
        u.label.reset();  // hidden, not deleted: truth stays in hidden_
        pools.unlabelled_.push_back(std::move(u));
      }
    }
    pools.anchors_ = pools.labelled_;
    pools.check_invariants();
    return pools;
  }

  const std::vector<Sample>& labelled() const { return labelled_; }
  const std::vector<Sample>& unlabelled() const { return unlabelled_; }
  const std::vector<Sample>& pseudo() const { return pseudo_; }
  const std::vector<Sample>& anchors() const { return anchors_; }
  std::size_t num_classes() const { return num_classes_; }
  TaskKind task_kind() const { return task_kind_; }
  std::size_t total_size() const { return total_size_; }

  // Evaluation-oracle access only. Training code paths never call this.
  const LabelVector& hidden_truth(std::int64_t id) const {
    auto it = hidden_.find(id);
    if (it == hidden_.end()) {
      throw ConsistencyError("no hidden truth for id " + std::to_string(id));
    }
    return it->second;
  }

  // Installs the stage's pseudo-labelled set. Every id must currently sit in
  // the unlabelled pool; samples carry their soft pseudo-labels.
  void set_stage_pseudo(std::vector<Sample> pseudo_set) {
    std::unordered_set<std::int64_t> unlabelled_ids;
    for (const auto& s : unlabelled_) unlabelled_ids.insert(s.id);
    for (const auto& s : pseudo_set) {
      if (!unlabelled_ids.count(s.id)) {
        throw ConsistencyError("pseudo sample " + std::to_string(s.id) +
                               " is not in the unlabelled pool");
      }
      if (!s.label.has_value()) {
        throw ConsistencyError("pseudo sample " + std::to_string(s.id) + " has no label");
      }
    }
    pseudo_ = std::move(pseudo_set);
  }

  // Adds purified pseudo-labelled samples (or initial labelled samples) to
  // the anchor set. Ids must come from the labelled pool or from any past or
  // current pseudo set.
  void add_anchors(const std::vector<Sample>& picked) {
    std::unordered_set<std::int64_t> legal;
    for (const auto& s : labelled_) legal.insert(s.id);
    for (const auto& s : pseudo_) legal.insert(s.id);
    legal.insert(ever_pseudo_.begin(), ever_pseudo_.end());
    std::unordered_set<std::int64_t> present;
    for (const auto& s : anchors_) present.insert(s.id);
    for (const auto& s : picked) {
      if (!legal.count(s.id)) {
        throw ConsistencyError("anchor candidate " + std::to_string(s.id) +
                               " is neither labelled nor pseudo-labelled");
      }
      if (!s.label.has_value()) {
        throw ConsistencyError("anchor candidate " + std::to_string(s.id) + " has no label");
      }
      if (present.insert(s.id).second) anchors_.push_back(s);
    }
  }

  // End-of-stage migration: D_L gains the pseudo set, D_U loses it.
  void migrate_stage() {
    std::unordered_set<std::int64_t> moving;
    for (const auto& s : pseudo_) moving.insert(s.id);
    for (const auto& s : pseudo_) {
      labelled_.push_back(s);
      ever_pseudo_.insert(s.id);
    }
    std::vector<Sample> rest;
    rest.reserve(unlabelled_.size() - pseudo_.size());
    for (auto& s : unlabelled_) {
      if (!moving.count(s.id)) rest.push_back(std::move(s));
    }
    unlabelled_ = std::move(rest);
    pseudo_.clear();
    check_invariants();
  }

  void check_invariants() const {
    std::unordered_set<std::int64_t> lab;
    for (const auto& s : labelled_) {
      if (!lab.insert(s.id).second) {
        throw ConsistencyError("duplicate labelled id " + std::to_string(s.id));
      }
      if (!s.label.has_value()) {
        throw ConsistencyError("labelled sample " + std::to_string(s.id) + " has no label");
      }
    }
    std::unordered_set<std::int64_t> unl;
    for (const auto& s : unlabelled_) {
      if (!unl.insert(s.id).second) {
        throw ConsistencyError("duplicate unlabelled id " + std::to_string(s.id));
      }
      if (lab.count(s.id)) {
        throw ConsistencyError("id " + std::to_string(s.id) + " is both labelled and unlabelled");
      }
      if (s.label.has_value()) {
        throw ConsistencyError("unlabelled sample " + std::to_string(s.id) + " exposes a label");
      }
    }
    if (labelled_.size() + unlabelled_.size() != total_size_) {
      throw ConsistencyError("pool sizes changed: labelled+unlabelled != total");
    }
    for (const auto& s : pseudo_) {
      if (!unl.count(s.id)) {
        throw ConsistencyError("pseudo id " + std::to_string(s.id) + " not in unlabelled pool");
      }
    }
    for (const auto& s : anchors_) {
      if (!lab.count(s.id) && !ever_pseudo_.count(s.id) &&
          std::none_of(pseudo_.begin(), pseudo_.end(),
                       [&](const Sample& p) { return p.id == s.id; })) {
        throw ConsistencyError("anchor id " + std::to_string(s.id) +
                               " is neither labelled nor ever pseudo-labelled");
      }
    }
  }

  // Seeded selection of ceil(fraction * n) sample ids, optionally stratified
  // (per-class ceil(fraction * n_c)). Also used to carve held-out test sets.
  static std::unordered_set<std::int64_t> pick_ids(const std::vector<Sample>& dataset,
                                                   double fraction, bool stratified,
                                                   std::uint64_t seed, std::size_t num_classes,
                                                   TaskKind kind) {
    if (stratified) return stratified_pick(dataset, fraction, seed, num_classes, kind);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    Random rng(derive_seed(seed, tag("split")));
    rng.shuffle(order);
    const std::size_t take = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(dataset.size())));
    std::unordered_set<std::int64_t> chosen;
    for (std::size_t i = 0; i < take && i < order.size(); ++i) {
      chosen.insert(dataset[order[i]].id);
    }
    return chosen;
  }

 private:
  static std::unordered_set<std::int64_t> stratified_pick(const std::vector<Sample>& dataset,
                                                          double fraction, std::uint64_t seed,
                                                          std::size_t num_classes,
                                                          TaskKind kind) {
    // Member lists per class. Multiclass: the one-hot class. Multilabel: every
    // positive class, covered greedily from the rarest class up.
    std::vector<std::vector<std::size_t>> members(num_classes);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const auto& y = *dataset[i].label;
      if (kind == TaskKind::multiclass) {
        members[y.positive_class()].push_back(i);
      } else {
        for (std::size_t c = 0; c < num_classes; ++c) {
          if (y.values[c] == 1.0) members[c].push_back(i);
        }
      }
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (members[c].empty()) {
        throw SplitError("stratified split impossible: class " + std::to_string(c) +
                         " has no samples");
      }
    }
    std::vector<std::size_t> class_order(num_classes);
    std::iota(class_order.begin(), class_order.end(), 0);
    std::stable_sort(class_order.begin(), class_order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return members[a].size() < members[b].size();
                     });
    std::unordered_set<std::int64_t> chosen;
    for (std::size_t c : class_order) {
      Random rng(derive_seed(seed, tag("split-class") + c));
      auto pool = members[c];
      rng.shuffle(pool);
      const std::size_t want = static_cast<std::size_t>(
          std::ceil(fraction * static_cast<double>(members[c].size())));
      std::size_t have = 0;
      if (kind == TaskKind::multilabel) {
        for (std::size_t idx : pool) {
          if (chosen.count(dataset[idx].id)) ++have;
        }
      }
      for (std::size_t idx : pool) {
        if (have >= want) break;
        if (chosen.insert(dataset[idx].id).second) ++have;
      }
    }
    return chosen;
  }

  std::vector<Sample> labelled_;
  std::vector<Sample> unlabelled_;
  std::vector<Sample> pseudo_;
  std::vector<Sample> anchors_;
  std::unordered_map<std::int64_t, LabelVector> hidden_;
  std::unordered_set<std::int64_t> ever_pseudo_;
  std::size_t num_classes_ = 0;
  TaskKind task_kind_ = TaskKind::multiclass;
  std::size_t total_size_ = 0;
};

struct HoldoutSplit {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

// Carves a fully-labelled test set off the dataset; the remainder feeds
// DataPools::split. The two splits use unrelated seed streams, so the same
// master seed can drive both.
inline HoldoutSplit split_holdout(const std::vector<Sample>& dataset, double test_fraction,
                                  bool stratified, std::uint64_t seed) {
  if (dataset.empty()) throw SplitError("cannot split an empty dataset");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw SplitError("test_fraction must lie in [0, 1)");
  }
  HoldoutSplit out;
  if (test_fraction == 0.0) {
    out.train = dataset;
    return out;
  }
  for (const auto& s : dataset) {
    if (!s.label.has_value()) {
      throw SplitError("sample " + std::to_string(s.id) + " is unlabelled; holdout requires full labels");
    }
  }
  const std::size_t num_classes = dataset.front().label->num_classes();
  const TaskKind kind = dataset.front().label->task_kind;
  const auto test_ids = DataPools::pick_ids(dataset, test_fraction, stratified,
                                            derive_seed(seed, tag("holdout")), num_classes, kind);
  for (const auto& s : dataset) {
    (test_ids.count(s.id) ? out.test : out.train).push_back(s);
  }
  if (out.train.empty()) throw SplitError("test_fraction leaves no training data");
  return out;
}

}  // namespace acpl
