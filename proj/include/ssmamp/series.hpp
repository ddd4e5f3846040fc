#pragma once

#include <span>
#include <vector>

namespace ssmamp {

// Truncated power-series helpers used by the random-matrix calculus.
// Conventions:
//   * "full" series carry coefficients from omega^0: f[k] = Co_{omega^k}[f].
//   * "linear" series carry coefficients from omega^1 (no constant term),
//     e.g. the inverse R-transform sum_{n>=1} a_n omega^n is {a_1, a_2, ...}.

// Compositional inverse of f(w) = sum_{k>=0} f_full[k] w^k, truncated at
// order n_max. Requires f_full[0] == 0 and f_full[1] != 0 (the inverse is
// analytic at 0 only then). Returns the linear-series coefficients
// {a_1, ..., a_n_max} of g with g(f(w)) = w + O(w^{n_max+1}).
std::vector<double> series_reversion(std::span<const double> f_full, int n_max);

// Reciprocal 1/f of a full series with f[0] != 0, truncated at order n_max
// (result has n_max + 1 coefficients).
std::vector<double> series_reciprocal(std::span<const double> f_full, int n_max);

// sqrt(f) of a full series with f[0] > 0, principal branch, truncated at
// order n_max.
std::vector<double> series_sqrt(std::span<const double> f_full, int n_max);

// Product truncated at order n_max.
std::vector<double> series_product(std::span<const double> a_full,
                                   std::span<const double> b_full, int n_max);

// Evaluate a linear series sum_{n>=1} c[n-1] w^n at w.
double eval_linear_series(std::span<const double> coeffs, double w);

} // namespace ssmamp
