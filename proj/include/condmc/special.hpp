#pragma once

#include <cstdint>

namespace condmc {

// P(K = k) for K ~ Skellam(mu, mu): exp(-2 mu) I_|k|(2 mu). Accurate over
// the full range of mu this library produces (integrated intensities up to
// ~1e6); symmetric in k; sums to 1 over k in Z.
double skellam_pmf(int64_t k, double mu);

// Fills out[j] = skellam_pmf(j, mu) for j = 0..kmax.
void skellam_row(double mu, int kmax, double* out);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// CDF of the chi-square distribution with (real) dof degrees of freedom.
double chi2_cdf(double x, double dof);

// 1 - alpha quantile of chi-square with real-valued dof; solves
// P(dof/2, x/2) = 1 - alpha to 1e-10 via bracketing plus Newton.
double chi2_quantile(double dof, double alpha);

// Inverse standard normal CDF (used for starting guesses and tests).
double normal_quantile(double p);

}  // namespace condmc
