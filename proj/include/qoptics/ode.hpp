// Copyright 2026 The qoptics Authors
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

#include <algorithm>
#include <cmath>
#include <vector>

#include "qoptics/settings.hpp"

namespace qo {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  // 0: automatic
  double h_max = 0.0;   // 0: unbounded
  long max_steps = 50'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

namespace detail {
template <typename Y>
double scaled_err(const Y& err, const Y& y0, const Y& y1, double atol, double rtol) {
  auto sc = atol + rtol * y0.array().abs().max(y1.array().abs());
  return (err.array().abs() / sc).maxCoeff();
}
}  // namespace detail

// Dormand-Prince 5(4) with FSAL and steps clipped to hit every output time exactly.
// Y is any dense Eigen type; f(t, y) returns dy/dt with the same shape.
template <typename Y, typename F>
std::vector<Y> dopri5(F&& f, const Y& y0, const std::vector<double>& t_grid, const OdeOptions& opt = {},
                      OdeStats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<Y> out;
  if (t_grid.empty()) return out;
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] >= t_grid[i - 1])) throw InvalidArgument("dopri5: time grid must be non-decreasing");
  out.reserve(t_grid.size());
  out.push_back(y0);

  Y y = y0;
  double t = t_grid.front();
  Y k1 = f(t, y);
  long nev = 1;
  const double span = t_grid.back() - t_grid.front();
  double h = opt.h_init;
  if (h <= 0.0) {
    const double d0 = y.array().abs().maxCoeff(), d1 = k1.array().abs().maxCoeff();
    h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-6;
    if (span > 0) h = std::min(h, 0.1 * span);
    h = std::max(h, 1e-12);
  }
  long steps = 0;
  for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
    const double t_end = t_grid[gi];
    while (t < t_end) {
      if (++steps > opt.max_steps) throw NumericError("dopri5: step budget exhausted");
      if (opt.h_max > 0) h = std::min(h, opt.h_max);
      bool last = false;
      double hs = h;
      if (t + hs >= t_end) {
        hs = t_end - t;
        last = true;
      }
      if (hs < 1e-14 * std::max(1.0, std::abs(t))) throw NumericError("dopri5: step-size underflow");
      Y k2 = f(t + c2 * hs, Y(y + hs * (a21 * k1)));
      Y k3 = f(t + c3 * hs, Y(y + hs * (a31 * k1 + a32 * k2)));
      Y k4 = f(t + c4 * hs, Y(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
      Y k5 = f(t + c5 * hs, Y(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      Y k6 = f(t + hs, Y(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
      Y yn = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      Y k7 = f(t + hs, yn);
      nev += 6;
      Y err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = detail::scaled_err(err, y, yn, opt.atol, opt.rtol);
      if (!std::isfinite(en)) throw NumericError("dopri5: non-finite state");
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      if (en <= 1.0) {
        t = last ? t_end : t + hs;
        y = std::move(yn);
        k1 = std::move(k7);
        if (stats) ++stats->accepted;
        // A clipped final step says nothing about the natural step size.
        if (!last || fac < 1.0) h = hs * fac;
      } else {
        h = hs * std::min(1.0, fac);
        if (stats) ++stats->rejected;
      }
    }
    out.push_back(y);
  }
  if (stats) stats->rhs_evals += nev;
  return out;
}

}  // namespace qo
