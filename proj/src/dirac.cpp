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

#include "ppgencdr/dirac.hpp"

#include <cmath>
#include <fstream>

#include "ppgencdr/errors.hpp"

namespace ppgencdr::dirac {

void DiracConfig::validate() const {
  if (h <= 0.0) throw ConfigError("dirac: step size h must be > 0");
  if (t_max <= 0.0) throw ConfigError("dirac: t_max must be > 0");
  if (tau < 0.0) throw ConfigError("dirac: tau must be >= 0");
  if (phi < 0.0 || phi > 1.0) throw ConfigError("dirac: phi must be in [0,1]");
  if (sigma_gr < 0.0) throw ConfigError("dirac: sigma_gr must be >= 0");
}

DiracTrajectory simulate(const DiracConfig& cfg) {
  cfg.validate();
  const double m = cfg.target();
  const auto fD = [&](double d, double g) { return m - g - cfg.tau * d; };
  const auto fG = [&](double d, double /*g*/) { return d; };
  const auto energy = [&](double d, double g) {
    return (g - m) * (g - m) + d * d;
  };

  DiracTrajectory traj;
  double d = cfg.theta_D0;
  double g = cfg.theta_G0;
  double t = 0.0;
  traj.samples.push_back({t, d, g, energy(d, g)});
  const auto n_steps =
      static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.h - 1e-12));
  for (std::size_t step = 0; step < n_steps; ++step) {
    const double h = std::min(cfg.h, cfg.t_max - t);
    const double k1d = fD(d, g), k1g = fG(d, g);
    const double k2d = fD(d + 0.5 * h * k1d, g + 0.5 * h * k1g);
    const double k2g = fG(d + 0.5 * h * k1d, g + 0.5 * h * k1g);
    const double k3d = fD(d + 0.5 * h * k2d, g + 0.5 * h * k2g);
    const double k3g = fG(d + 0.5 * h * k2d, g + 0.5 * h * k2g);
    const double k4d = fD(d + h * k3d, g + h * k3g);
    const double k4g = fG(d + h * k3d, g + h * k3g);
    d += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    t += h;
    if (!std::isfinite(d) || !std::isfinite(g))
      throw NumericError("dirac: non-finite state at t=" + std::to_string(t));
    traj.samples.push_back({t, d, g, energy(d, g)});
  }
  return traj;
}

std::pair<std::complex<double>, std::complex<double>> poles(double tau) {
  const double disc = tau * tau - 4.0;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    return {std::complex<double>((-tau - r) / 2.0, 0.0),
            std::complex<double>((-tau + r) / 2.0, 0.0)};
  }
  const double im = std::sqrt(-disc) / 2.0;
  return {std::complex<double>(-tau / 2.0, -im),
          std::complex<double>(-tau / 2.0, im)};
}

const char* stability_name(Stability s) {
  return s == Stability::Stable ? "stable" : "unstable-marginal";
}

Stability stability_report(double tau) {
  if (tau < 0.0) throw ConfigError("stability_report: tau must be >= 0");
  const auto [p1, p2] = poles(tau);
  return (p1.real() < 0.0 && p2.real() < 0.0) ? Stability::Stable
                                              : Stability::UnstableMarginal;
}

void write_trajectory_csv(const std::string& path, const DiracTrajectory& t) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "t,theta_D,theta_G,V\n";
  out.precision(17);
  for (const auto& s : t.samples)
    out << s.t << ',' << s.theta_D << ',' << s.theta_G << ',' << s.V << '\n';
}

}  // namespace ppgencdr::dirac
