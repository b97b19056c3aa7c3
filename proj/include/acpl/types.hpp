// acpl-engine — core domain types: label vectors and samples
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
#include <optional>
#include <string>
#include <vector>

#include "acpl/common.hpp"

namespace acpl {

enum class TaskKind { multiclass, multilabel };
enum class Hardness { hard, soft };

inline std::string to_string(TaskKind k) {
  return k == TaskKind::multiclass ? "multiclass" : "multilabel";
}

inline TaskKind task_kind_from_string(const std::string& s) {
  if (s == "multiclass") return TaskKind::multiclass;
  if (s == "multilabel") return TaskKind::multilabel;
  throw ConfigError("unknown task_kind '" + s + "' (expected multiclass or multilabel)");
}

// Target vector in [0,1]^C. Hard multiclass labels are one-hot, hard
// multilabel labels are binary, soft labels hold pseudo-label mixtures.
struct LabelVector {
  std::vector<double> values;
  TaskKind task_kind = TaskKind::multiclass;
  Hardness hardness = Hardness::hard;

  std::size_t num_classes() const { return values.size(); }

  void validate() const {
    if (values.empty()) throw LabelError("label vector is empty");
    for (double v : values) {
      if (!std::isfinite(v)) throw LabelError("label vector contains a non-finite entry");
      if (v < 0.0 || v > 1.0) throw LabelError("label entry outside [0,1]");
    }
    if (hardness == Hardness::hard) {
      std::size_t ones = 0;
      for (double v : values) {
        if (v != 0.0 && v != 1.0) throw LabelError("hard label entry is neither 0 nor 1");
        if (v == 1.0) ++ones;
      }
      if (task_kind == TaskKind::multiclass && ones != 1) {
        throw LabelError("hard multiclass label must have exactly one positive entry, got " +
                         std::to_string(ones));
      }
    } else if (task_kind == TaskKind::multiclass) {
      double sum = 0.0;
      for (double v : values) sum += v;
      if (std::abs(sum - 1.0) > 1e-6) {
        throw LabelError("soft multiclass label must sum to 1, got " + std::to_string(sum));
      }
    }
  }

  // Index of the single positive class; hard multiclass only.
  std::size_t positive_class() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] == 1.0) return i;
    }
    throw LabelError("label has no positive entry");
  }

  static LabelVector one_hot(std::size_t cls, std::size_t num_classes) {
    LabelVector y;
    y.values.assign(num_classes, 0.0);
    y.values.at(cls) = 1.0;
    y.task_kind = TaskKind::multiclass;
    y.hardness = Hardness::hard;
    return y;
  }

  static LabelVector multi_hot(std::vector<double> bits) {
    LabelVector y;
    y.values = std::move(bits);
    y.task_kind = TaskKind::multilabel;
    y.hardness = Hardness::hard;
    y.validate();
    return y;
  }

  static LabelVector soft(std::vector<double> probs, TaskKind kind) {
    LabelVector y;
    y.values = std::move(probs);
    y.task_kind = kind;
    y.hardness = Hardness::soft;
    return y;
  }
};

struct Sample {
  std::int64_t id = 0;
  std::vector<double> features;
  // Absent for samples sitting in the unlabelled pool.
  std::optional<LabelVector> label;
};

}  // namespace acpl
