// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace indsel {

// P(Z <= z) for standard normal Z.
double normal_cdf(double z);

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (modified Lentz). Domain: a, b > 0, x in [0, 1].
double reg_inc_beta(double a, double b, double x);

// Survival function of the Kolmogorov distribution,
// Q(lambda) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_sf(double lambda);

}  // namespace indsel
