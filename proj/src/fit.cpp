#include <algorithm>
#include <cmath>
#include <sstream>

#include "srad/spectra.hpp"

namespace srad {

namespace {

std::vector<Sample> in_window(std::span<const Sample> points, std::pair<double, double> window) {
  if (!(window.first < window.second)) throw ValidationError("window: lo must be < hi");
  std::vector<Sample> kept;
  for (const Sample& s : points)
    if (s.first >= window.first && s.first <= window.second) kept.push_back(s);
  if (kept.size() < 6) {
    std::ostringstream os;
    os << "window: " << kept.size() << " points inside, need at least 6";
    throw ValidationError(os.str());
  }
  return kept;
}

}  // namespace

FitResult fit_power_law(std::span<const Sample> points, std::pair<double, double> window) {
  const std::vector<Sample> kept = in_window(points, window);
  const auto n = static_cast<double>(kept.size());
  double sx = 0, sy = 0;
  for (const Sample& s : kept) {
    if (!(s.first > 0) || !(s.second > 0)) throw ValidationError("fit_power_law: controls and values must be > 0");
    sx += std::log(s.first);
    sy += std::log(s.second);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const Sample& s : kept) {
    const double dx = std::log(s.first) - mx, dy = std::log(s.second) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0) throw ValidationError("window: degenerate, all controls equal");
  FitResult f;
  f.exponent = sxy / sxx;
  f.prefactor = std::exp(my - f.exponent * mx);
  f.window = window;
  f.points = static_cast<Index>(kept.size());
  double ss_res = 0;
  for (const Sample& s : kept) {
    const double r = std::log(s.second) - (my + f.exponent * (std::log(s.first) - mx));
    ss_res += r * r;
  }
  f.r_squared = syy > 0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  f.standard_error = std::sqrt(ss_res / (n - 2) / sxx);
  return f;
}

FitResult fit_fixed_power(std::span<const Sample> points, double exponent, std::pair<double, double> window) {
  const std::vector<Sample> kept = in_window(points, window);
  const auto n = static_cast<double>(kept.size());
  double sxx = 0, sxy = 0, my = 0;
  for (const Sample& s : kept) {
    if (!(s.first > 0)) throw ValidationError("fit_fixed_power: controls must be > 0");
    const double b = std::pow(s.first, exponent);
    sxx += b * b;
    sxy += b * s.second;
    my += s.second;
  }
  my /= n;
  FitResult f;
  f.exponent = exponent;
  f.prefactor = sxy / sxx;
  f.window = window;
  f.points = static_cast<Index>(kept.size());
  double ss_res = 0, ss_tot = 0;
  for (const Sample& s : kept) {
    const double r = s.second - f.prefactor * std::pow(s.first, exponent);
    ss_res += r * r;
    ss_tot += (s.second - my) * (s.second - my);
  }
  f.r_squared = ss_tot > 0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  f.standard_error = std::sqrt(ss_res / (n - 1) / sxx);
  return f;
}

nlohmann::json fit_to_json(const FitResult& fit) {
  return {
      {"exponent", fit.exponent},
      {"prefactor", fit.prefactor},
      {"window", {fit.window.first, fit.window.second}},
      {"r_squared", fit.r_squared},
      {"stderr", fit.standard_error},
      {"points", fit.points},
      {"accepted", fit.accepted()},
  };
}

}  // namespace srad
