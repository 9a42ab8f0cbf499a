#pragma once

#include <cmath>

namespace mps {

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / 2.506628274631000502415765284811;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097); }

// E|X|^r for X ~ N(0, sigma2):  sigma^r 2^{r/2} Gamma((r+1)/2) / sqrt(pi).
inline double normal_abs_moment(double sigma2, double r) {
  if (sigma2 == 0.0) return 0.0;
  return std::pow(sigma2, r / 2.0) * std::pow(2.0, r / 2.0) *
         std::tgamma((r + 1.0) / 2.0) / std::sqrt(3.1415926535897932384626433832795);
}

// E[X^2 1_{|X| >= a}] for X ~ N(0, sigma2):  2 sigma^2 [(a/s) phi(a/s) + 1 - Phi(a/s)].
inline double normal_tail_second_moment(double sigma2, double a) {
  if (sigma2 == 0.0) return 0.0;
  if (a <= 0.0) return sigma2;
  const double s = std::sqrt(sigma2);
  const double z = a / s;
  return 2.0 * sigma2 * (z * normal_pdf(z) + 1.0 - normal_cdf(z));
}

// Inverse of the standard normal CDF (Acklam's rational approximation,
// refined with one Halley step; accurate to full double precision).
inline double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, x;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * 2.506628274631000502415765284811 * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace mps
