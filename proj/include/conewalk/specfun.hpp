// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Special functions used by the reference densities and the statistical
// tests: regularized incomplete gamma, chi / chi-square distributions, the
// Kolmogorov tail sum, and the modified Bessel function of the first kind
// (scaled and log forms, real nonnegative order).
#pragma once

namespace conewalk::sf {

// Regularized lower incomplete gamma P(a, x); Q = 1 - P.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// chi distribution with k degrees of freedom (k > 0, not necessarily integer).
double chi_pdf(double k, double x);
double chi_cdf(double k, double x);
double chi_quantile(double k, double u);

// chi-square distribution with k degrees of freedom.
double chisq_cdf(double k, double x);
double chisq_tail(double k, double x);

// Kolmogorov statistic tail Q(x) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2).
double kolmogorov_q(double x);

// Modified Bessel I_nu(z) for nu >= 0, z >= 0: e^{-z} I_nu(z) and log I_nu(z).
double bessel_i_scaled(double nu, double z);
double log_bessel_i(double nu, double z);

}  // namespace conewalk::sf
