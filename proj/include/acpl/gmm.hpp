// acpl-engine — one-dimensional Gaussian mixture over density scores
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
#include <string>
#include <vector>

#include "acpl/common.hpp"
#include "acpl/rng.hpp"

namespace acpl {

// Density is inversely related to informativeness: samples far from every
// anchor score low and are the most informative ones.
enum class Informativeness { high, medium, low };

inline std::string to_string(Informativeness v) {
  switch (v) {
    case Informativeness::high: return "high";
    case Informativeness::medium: return "medium";
    default: return "low";
  }
}

inline Informativeness informativeness_from_string(const std::string& s) {
  if (s == "high") return Informativeness::high;
  if (s == "medium") return Informativeness::medium;
  if (s == "low") return Informativeness::low;
  throw ConfigError("unknown informativeness '" + s + "' (expected high, medium or low)");
}

struct GmmOptions {
  std::size_t num_components = 3;
  double tol = 1e-6;
  std::size_t max_iter = 200;

  void validate() const {
    if (num_components < 2) throw ConfigError("num_components must be at least 2");
    if (!(tol > 0.0)) throw ConfigError("gmm tol must be positive");
    if (max_iter < 1) throw ConfigError("gmm max_iter must be at least 1");
  }
};

class InfoGmm {
 public:
  struct Diagnostics {
    std::size_t iterations = 0;
    double final_log_likelihood = 0.0;
    bool converged = false;
    std::vector<double> log_likelihood_trace;  // one entry per E-step
  };

  // Injects explicit parameters (no fitting); zero weights are allowed so
  // emptied-component behavior can be exercised directly.
  static InfoGmm from_parameters(std::vector<double> means, std::vector<double> variances,
                                 std::vector<double> weights) {
    const std::size_t k = means.size();
    if (k < 2 || variances.size() != k || weights.size() != k) {
      throw ConfigError("mixture parameters need matching lengths of at least 2");
    }
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (!(variances[c] > 0.0)) throw ConfigError("variances must be positive");
      if (!(weights[c] >= 0.0)) throw ConfigError("weights must be non-negative");
      total += weights[c];
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("weights must sum to 1");
    InfoGmm model;
    model.means_ = std::move(means);
    model.variances_ = std::move(variances);
    model.weights_ = std::move(weights);
    return model;
  }

  static InfoGmm fit(const std::vector<double>& scores, std::uint64_t seed,
                     const GmmOptions& opts = {}) {
    opts.validate();
    const std::size_t n = scores.size();
    const std::size_t k = opts.num_components;
    if (n < k) {
      throw FitError("need at least " + std::to_string(k) + " scores to fit " +
                     std::to_string(k) + " components, got " + std::to_string(n));
    }
    for (double s : scores) {
      if (!std::isfinite(s)) throw FitError("scores contain a non-finite value");
    }
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    const double spread = sorted.back() - sorted.front();
    // A spread below the rounding noise of the values themselves cannot be
    // separated into components; jittered means would not even change bits.
    const double magnitude =
        std::max({std::abs(sorted.front()), std::abs(sorted.back()), 1.0});
    if (spread <= magnitude * 1e-12) {
      throw DegenerateDataError("all density scores are identical; mixture is unidentifiable");
    }

    InfoGmm model;
    model.means_.resize(k);
    model.variances_.resize(k);
    model.weights_.assign(k, 1.0 / static_cast<double>(k));

    // Percentile placement of the initial means; duplicates (heavy ties in
    // the data) get a small seeded perturbation so EM can separate them.
    for (std::size_t c = 0; c < k; ++c) {
      const double q = static_cast<double>(c + 1) / static_cast<double>(k + 1);
      const double pos = q * static_cast<double>(n - 1);
      const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
      const std::size_t hi = std::min(lo + 1, n - 1);
      const double frac = pos - static_cast<double>(lo);
      model.means_[c] = (1.0 - frac) * sorted[lo] + frac * sorted[hi];
    }
    {
      auto distinct = [&] {
        for (std::size_t c = 1; c < k; ++c) {
          if (model.means_[c] == model.means_[c - 1]) return false;
        }
        return true;
      };
      Random rng(derive_seed(seed, tag("gmm-init")));
      double step = 1e-3 * spread;
      std::size_t attempts = 0;
      while (!distinct()) {
        if (++attempts > 256) {
          throw DegenerateDataError("density scores are too concentrated to seed distinct means");
        }
        for (std::size_t c = 0; c < k; ++c) {
          model.means_[c] += (rng.uniform() - 0.5) * step;
        }
        std::sort(model.means_.begin(), model.means_.end());
        step *= 2.0;  // escalate so ties cannot persist indefinitely
      }
    }
    double mean_all = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(n);
    double var_all = 0.0;
    for (double s : scores) var_all += (s - mean_all) * (s - mean_all);
    var_all /= static_cast<double>(n);
    std::fill(model.variances_.begin(), model.variances_.end(),
              std::max(var_all, kVarianceFloor));

    // Log-space EM.
    std::vector<double> log_joint(k);
    std::vector<double> resp(n * k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
      double ll = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < k; ++c) {
          log_joint[c] = std::log(model.weights_[c]) + model.log_pdf(scores[i], c);
        }
        const double m = *std::max_element(log_joint.begin(), log_joint.end());
        double z = 0.0;
        for (double v : log_joint) z += std::exp(v - m);
        const double lse = m + std::log(z);
        ll += lse;
        for (std::size_t c = 0; c < k; ++c) resp[i * k + c] = std::exp(log_joint[c] - lse);
      }
      model.diag_.iterations = iter + 1;
      model.diag_.final_log_likelihood = ll;
      model.diag_.log_likelihood_trace.push_back(ll);
      if (std::abs(ll - prev_ll) < opts.tol) {
        model.diag_.converged = true;
        break;
      }
      prev_ll = ll;

      for (std::size_t c = 0; c < k; ++c) {
        double nc = 0.0;
        for (std::size_t i = 0; i < n; ++i) nc += resp[i * k + c];
        const double w = nc / static_cast<double>(n);
        model.weights_[c] = w;
        if (w < kEmptyComponent) continue;  // keep the stale mean/variance
        double mu = 0.0;
        for (std::size_t i = 0; i < n; ++i) mu += resp[i * k + c] * scores[i];
        mu /= nc;
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = scores[i] - mu;
          var += resp[i * k + c] * d * d;
        }
        var /= nc;
        model.means_[c] = mu;
        model.variances_[c] = std::max(var, kVarianceFloor);
      }
    }
    return model;
  }

  std::size_t num_components() const { return means_.size(); }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& variances() const { return variances_; }
  const std::vector<double>& weights() const { return weights_; }
  const Diagnostics& diagnostics() const { return diag_; }

  // Component index realizing a target informativeness level. Means sorted
  // ascending: smallest mean is the high-informativeness (low-density) mode.
  std::size_t component_for(Informativeness target) const {
    const std::size_t k = means_.size();
    if (target == Informativeness::medium && k < 3) {
      throw ConfigError("medium informativeness needs at least 3 components");
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (means_[a] != means_[b]) return means_[a] < means_[b];
      return a < b;
    });
    switch (target) {
      case Informativeness::high: return order.front();
      case Informativeness::low: return order.back();
      default: return order[(k - 1) / 2];
    }
  }

  // Posterior membership probabilities, normalized in log space.
  std::vector<double> posterior(double score) const {
    const std::size_t k = means_.size();
    std::vector<double> lj(k);
    for (std::size_t c = 0; c < k; ++c) lj[c] = std::log(weights_[c]) + log_pdf(score, c);
    const double m = *std::max_element(lj.begin(), lj.end());
    double z = 0.0;
    for (double v : lj) z += std::exp(v - m);
    const double lse = m + std::log(z);
    for (double& v : lj) v = std::exp(v - lse);
    return lj;
  }

  // Strict-argmax membership: true iff the target component's posterior
  // exceeds every other component's. Posterior ties mean no selection.
  bool selects(double score, std::size_t target_component) const {
    const std::size_t k = means_.size();
    if (target_component >= k) throw ConfigError("component index out of range");
    std::vector<double> lj(k);
    for (std::size_t c = 0; c < k; ++c) lj[c] = std::log(weights_[c]) + log_pdf(score, c);
    for (std::size_t c = 0; c < k; ++c) {
      if (c != target_component && !(lj[target_component] > lj[c])) return false;
    }
    return true;
  }

  // Indices (into scores) whose strict-argmax component matches the target.
  std::vector<std::size_t> select_by_informativeness(const std::vector<double>& scores,
                                                     Informativeness target) const {
    const std::size_t comp = component_for(target);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (selects(scores[i], comp)) out.push_back(i);
    }
    return out;
  }

 private:
  static constexpr double kVarianceFloor = 1e-6;
  static constexpr double kEmptyComponent = 1e-8;

  double log_pdf(double x, std::size_t c) const {
    const double d = x - means_[c];
    return -0.5 * std::log(2.0 * M_PI * variances_[c]) - d * d / (2.0 * variances_[c]);
  }

  std::vector<double> means_;
  std::vector<double> variances_;
  std::vector<double> weights_;
  Diagnostics diag_;
};

}  // namespace acpl
