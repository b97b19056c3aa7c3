// acpl-engine — umbrella header
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

#include "acpl/asp.hpp"
#include "acpl/baselines.hpp"
#include "acpl/common.hpp"
#include "acpl/dataset.hpp"
#include "acpl/gmm.hpp"
#include "acpl/knn.hpp"
#include "acpl/learner.hpp"
#include "acpl/metrics.hpp"
#include "acpl/pseudo.hpp"
#include "acpl/rng.hpp"
#include "acpl/run_io.hpp"
#include "acpl/trainer.hpp"
#include "acpl/types.hpp"
