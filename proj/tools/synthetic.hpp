// Copyright 2026 The semcausal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "semcausal/dataset.hpp"
#include "semcausal/sem_model.hpp"

#include <cstdint>
#include <string>

namespace semcausal::synthetic {

/// Youth-development shaped model: three-item first-order factors, second-
/// and third-order factors above them and a structural regression of the
/// outcome factor on the two context factors.
std::string youth_model_syntax();

// Generating values for every free parameter of `model`, drawn reproducibly.
Vector generating_parameters(const SemModel& model, std::uint64_t seed);

struct OrdinalOptions {
  Index rows = 1507;
  Index incomplete_rows = 492;  // each gets one to three MISSING cells
  int levels = 5;
  std::uint64_t seed = 7;
};

/// Simulated item responses on a 1..levels scale, cut at equally spaced
/// standard-score thresholds. Ids are "c0001", "c0002", ...
ObservedDataset youth_dataset(const OrdinalOptions& options = {});

}  // namespace semcausal::synthetic
