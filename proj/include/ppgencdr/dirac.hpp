// Copyright 2026 The PPGenCDR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <string>
#include <vector>

namespace ppgencdr::dirac {

// Two-parameter GAN dynamics with a damping controller tau and a perturbed
// target m = c - (1 - 2*phi) * sigma_gr:
//   d theta_D / dt = m - theta_G - tau * theta_D
//   d theta_G / dt = theta_D
struct DiracConfig {
  double c = 1.0;
  double phi = 0.5;       // perturbation interpolation in [0,1]
  double sigma_gr = 0.0;  // perturbation magnitude
  double tau = 0.0;       // controller gain
  double theta_D0 = 0.0;
  double theta_G0 = 0.0;
  double t_max = 20.0;
  double h = 1e-3;

  double target() const { return c - (1.0 - 2.0 * phi) * sigma_gr; }
  void validate() const;
};

struct DiracSample {
  double t = 0.0;
  double theta_D = 0.0;
  double theta_G = 0.0;
  double V = 0.0;  // (theta_G - m)^2 + theta_D^2
};

struct DiracTrajectory {
  std::vector<DiracSample> samples;
};

/// Classic fixed-step RK4 integration; throws NumericError on non-finite state.
DiracTrajectory simulate(const DiracConfig& cfg);

/// Roots of s^2 + tau*s + 1.
std::pair<std::complex<double>, std::complex<double>> poles(double tau);

enum class Stability { UnstableMarginal, Stable };

const char* stability_name(Stability s);

/// Stable iff both poles have strictly negative real parts; tau = 0 puts them
/// on the imaginary axis, reported as unstable-marginal.
Stability stability_report(double tau);

void write_trajectory_csv(const std::string& path, const DiracTrajectory& t);

}  // namespace ppgencdr::dirac
