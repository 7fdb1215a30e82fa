// Copyright 2026 The pump-deck Authors
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

#include "pumpdeck/density.hpp"
#include "pumpdeck/eigen.hpp"
#include "pumpdeck/errors.hpp"
#include "pumpdeck/lindblad.hpp"
#include "pumpdeck/matrix.hpp"
#include "pumpdeck/models.hpp"
#include "pumpdeck/parallel.hpp"
#include "pumpdeck/perturbation.hpp"
#include "pumpdeck/pumping.hpp"
#include "pumpdeck/quadrature.hpp"

namespace pumpdeck {
inline constexpr const char* kVersion = "0.1.0";
}  // namespace pumpdeck
