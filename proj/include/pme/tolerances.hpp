// Copyright 2026 The pme Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace pme::tol {

// Numerical tolerances shared by the engine and its tests.
inline constexpr double kHermiticity = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kOracle = 1e-9;
inline constexpr double kDetectionCompleteness = 1e-10;
inline constexpr double kUnitarity = 1e-10;
// Accepted deviation of tr(rho) from one for inputs that must be normalized.
inline constexpr double kNormalized = 1e-9;

}  // namespace pme::tol
