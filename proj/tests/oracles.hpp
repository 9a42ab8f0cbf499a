// Independent numerical oracles used only by the test suites. Nothing here
// may call back into the implementation paths it checks.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

// Adaptive Simpson quadrature.
inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Pre-split into panels so sharply peaked integrands cannot fool the initial
// coarse estimate into an early accept.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  const int panels = 16;
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * width, hi = lo + width;
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fm = f(m), fb = f(hi);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_step(f, lo, hi, fa, fm, fb, whole, tol / panels, 44);
  }
  return total;
}

inline double std_normal_density(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.1415926535897932384626433832795);
}

// E|Z|^r for Z ~ N(0,1) by quadrature over |x| <= 40.
inline double normal_abs_moment(double r) {
  return 2.0 * integrate([r](double x) { return std::pow(x, r) * std_normal_density(x); },
                         0.0, 40.0);
}

// E[Z^2 1_{|Z| >= a}] for Z ~ N(0,1) by quadrature.
inline double normal_tail_second_moment(double a) {
  return 2.0 * integrate([](double x) { return x * x * std_normal_density(x); }, a,
                         a + 40.0);
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
  std::size_t count = 0;
  double stderr_mean() const { return std::sqrt(var / static_cast<double>(count)); }
};

inline MeanVar mean_var(const std::vector<double>& sample) {
  MeanVar out;
  out.count = sample.size();
  for (double v : sample) out.mean += v;
  out.mean /= static_cast<double>(sample.size());
  for (double v : sample) out.var += (v - out.mean) * (v - out.mean);
  out.var /= static_cast<double>(sample.size() - 1);
  return out;
}

}  // namespace oracle
