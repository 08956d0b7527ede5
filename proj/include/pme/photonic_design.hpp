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

// Grating-coupler design helpers. Wavelengths and pitches are in nanometers,
// positions in micrometers, angles in radians unless a name says otherwise.

#include <functional>
#include <iosfwd>
#include <vector>

namespace pme {

struct GratingSpec {
  double wavelength_nm = 493.0;
  double n_eff = 1.6;
  double x_ion_um = 0.0;
  double height_um = 50.0;  // vertical ion-to-grating distance H
  double x_min_um = -40.0;
  double x_max_um = 40.0;
  double min_pitch_nm = 240.0;
  int order = 1;
  // Optional position-dependent effective index; overrides n_eff when set.
  std::function<double(double x_um)> n_eff_profile;
};

// Grating equation sin(theta) = n_eff - m lambda0 / pitch. Positive theta
// points forward (toward -x, the side the guided light arrives from).
double pitch_for_angle(double wavelength_nm, double n_eff, double theta, int order = 1);
double pitch_for_angle(const GratingSpec& spec, double theta);

struct Tooth {
  int index = 0;        // diffraction-phase index m
  double x_um = 0.0;
  double pitch_nm = 0.0;   // distance to the next tooth (the previous one for the last tooth)
  double angle_deg = 0.0;  // local emission angle at the midpoint of that pair
  double residual_nm = 0.0;  // constant-path residual of this tooth
};

// Teeth at equal optical path N(x) + d(x) = C + m lambda0, with N the guided
// optical path from the ion's foot, d the distance to the ion and C chosen
// so the ion sits midway between two teeth.
std::vector<Tooth> tooth_positions(const GratingSpec& spec);

struct PitchViolation {
  int first = 0;  // position in the tooth list of the first tooth of the pair
  double pitch_nm = 0.0;
};

std::vector<PitchViolation> fabrication_lint(const std::vector<Tooth>& teeth, double min_pitch_nm);

// Adiabatic coupler length for target mismatch delta given a reference design.
double adiabatic_length_scale(double delta_ref, double length_ref, double delta_target);

// CSV with columns index, x_um, pitch_nm, angle_deg, fabricable.
void write_tooth_csv(std::ostream& out, const std::vector<Tooth>& teeth, double min_pitch_nm);

}  // namespace pme
