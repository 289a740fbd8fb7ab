#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace testsupport {

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Least-squares slope of ln(y - floor) against t over [t_lo, t_hi]; used to
// extract exponential relaxation rates from trajectories.
inline double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y,
                             double floor, double t_lo, double t_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    const double d = y[i] - floor;
    if (!(d > 0)) continue;
    const double ly = std::log(d);
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
    ++n;
  }
  if (n < 2) return 0;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

}  // namespace testsupport
