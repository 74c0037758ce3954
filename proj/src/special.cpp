#include <cmath>
#include <limits>
#include <stdexcept>

#include "condmc/special.hpp"

namespace condmc {

namespace {
constexpr double kLogDoubleMin = -745.0;
}

// Positive-term series exp(-2mu) sum_j mu^(2j+k) / (j! (j+k)!), summed
// outward from its largest term so the scaling never under- or overflows
// and no cancellation occurs.
double skellam_pmf(int64_t k, double mu) {
  if (!(mu >= 0) || !std::isfinite(mu)) {
    throw std::invalid_argument("skellam_pmf needs finite mu >= 0");
  }
  const double ka = static_cast<double>(k < 0 ? -k : k);
  if (mu == 0) return ka == 0 ? 1.0 : 0.0;

  // Term ratio T_{j+1}/T_j = mu^2 / ((j+1)(j+ka+1)); the peak solves
  // (j+1)(j+ka+1) = mu^2.
  double j0d = std::floor((-(ka + 2) + std::sqrt(ka * ka + 4 * mu * mu)) / 2);
  if (j0d < 0) j0d = 0;
  const double log_peak =
      -2 * mu + (2 * j0d + ka) * std::log(mu) - std::lgamma(j0d + 1) -
      std::lgamma(j0d + ka + 1);
  if (log_peak < kLogDoubleMin - 40) return 0.0;

  const double mu2 = mu * mu;
  double sum = 1.0;
  double term = 1.0;
  for (double j = j0d; j >= 1; j -= 1) {  // downward: T_{j-1} = T_j * j(j+ka) / mu^2
    term *= j * (j + ka) / mu2;
    sum += term;
    if (term < sum * 1e-18) break;
  }
  term = 1.0;
  for (double j = j0d + 1;; j += 1) {  // upward: T_j = T_{j-1} * mu^2 / (j(j+ka))
    term *= mu2 / (j * (j + ka));
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return std::exp(log_peak + std::log(sum));
}

void skellam_row(double mu, int kmax, double* out) {
  for (int k = 0; k <= kmax; ++k) out[k] = skellam_pmf(k, mu);
}

namespace {

// Series expansion of P(a, x), good for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) by modified Lentz, good for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1 - a;
  double c = 1 / tiny;
  double d = 1 / b;
  double f = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1 / d;
    double delta = d * c;
    f *= delta;
    if (std::fabs(delta - 1) < 1e-16) break;
  }
  return f * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0) || !(x >= 0) || !std::isfinite(a) || !std::isfinite(x)) {
    throw std::invalid_argument("regularized_gamma_p needs a > 0, x >= 0");
  }
  if (x == 0) return 0;
  if (x < a + 1) return gamma_p_series(a, x);
  return 1 - gamma_q_contfrac(a, x);
}

double chi2_cdf(double x, double dof) {
  if (x <= 0) return 0;
  return regularized_gamma_p(dof / 2, x / 2);
}

double normal_quantile(double p) {
  if (!(p > 0) || !(p < 1)) {
    if (p == 0) return -std::numeric_limits<double>::infinity();
    if (p == 1) return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("normal_quantile needs p in (0,1)");
  }
  // Acklam's rational approximation, then one Halley step.
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
  double x;
  if (p < plow) {
    double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

double chi2_quantile(double dof, double alpha) {
  if (!(dof > 0) || !std::isfinite(dof)) {
    throw std::invalid_argument("chi2_quantile needs dof > 0");
  }
  if (!(alpha > 0) || !(alpha < 1)) {
    if (alpha == 1) return 0;
    throw std::invalid_argument("chi2_quantile needs alpha in (0,1)");
  }
  const double target = 1 - alpha;
  const double a = dof / 2;

  // Wilson-Hilferty starting point.
  double z = normal_quantile(target);
  double g = 1 - 2.0 / (9 * dof) + z * std::sqrt(2.0 / (9 * dof));
  double x = dof * g * g * g;
  if (!(x > 0)) x = dof * 1e-3 + 1e-8;

  // Expand a bracket [lo, hi] around the root.
  double lo = 0, hi = x;
  while (chi2_cdf(hi, dof) < target) {
    lo = hi;
    hi *= 2;
    if (hi > 1e12) break;
  }
  if (chi2_cdf(x, dof) > target) {
    lo = 0;
  }

  // Safeguarded Newton on F(x) = P(a, x/2) - target.
  for (int it = 0; it < 200; ++it) {
    double f = chi2_cdf(x, dof) - target;
    if (std::fabs(f) < 1e-12) return x;
    if (f > 0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    // dF/dx = (1/2) (x/2)^{a-1} e^{-x/2} / Gamma(a)
    double logpdf = (a - 1) * std::log(x / 2) - x / 2 - std::lgamma(a) - std::log(2.0);
    double step = f / std::exp(logpdf);
    double xn = x - step;
    if (!(xn > lo) || !(xn < hi) || !std::isfinite(xn)) xn = (lo + hi) / 2;
    if (std::fabs(xn - x) < 1e-14 * std::max(1.0, x)) return xn;
    x = xn;
  }
  return x;
}

}  // namespace condmc
