#include "ssmamp/series.hpp"

#include <cmath>
#include <stdexcept>

namespace ssmamp {

std::vector<double> series_product(std::span<const double> a_full,
                                   std::span<const double> b_full, int n_max) {
    std::vector<double> out(static_cast<size_t>(n_max) + 1, 0.0);
    for (size_t i = 0; i < a_full.size() && i <= static_cast<size_t>(n_max); ++i) {
        if (a_full[i] == 0.0) continue;
        const size_t jmax = std::min(b_full.size(), static_cast<size_t>(n_max) + 1 - i);
        for (size_t j = 0; j < jmax; ++j) out[i + j] += a_full[i] * b_full[j];
    }
    return out;
}

std::vector<double> series_reversion(std::span<const double> f_full, int n_max) {
    if (n_max < 1) throw std::invalid_argument("series_reversion: n_max must be >= 1");
    if (f_full.empty() || f_full[0] != 0.0)
        throw std::domain_error("series_reversion: nonzero constant term, inverse not analytic at 0");
    if (f_full.size() < 2 || f_full[1] == 0.0)
        throw std::domain_error("series_reversion: zero linear term, inverse not analytic at 0");

    const int m = n_max;
    // f truncated to order m
    std::vector<double> f(static_cast<size_t>(m) + 1, 0.0);
    for (size_t i = 0; i <= static_cast<size_t>(m) && i < f_full.size(); ++i) f[i] = f_full[i];

    // powers[k] = coefficients of f^k, k = 1..m
    std::vector<std::vector<double>> powers(static_cast<size_t>(m) + 1);
    powers[1] = f;
    for (int k = 2; k <= m; ++k)
        powers[k] = series_product(powers[k - 1], f, m);

    // Solve sum_k a_k Co_n[f^k] = delta_{n,1} for a_n; triangular since
    // Co_n[f^k] = 0 for k > n and Co_n[f^n] = f1^n.
    std::vector<double> a(static_cast<size_t>(m), 0.0);
    a[0] = 1.0 / f[1];
    for (int n = 2; n <= m; ++n) {
        double s = 0.0;
        for (int k = 1; k < n; ++k) s += a[k - 1] * powers[k][n];
        a[n - 1] = -s / std::pow(f[1], n);
    }
    return a;
}

std::vector<double> series_reciprocal(std::span<const double> f_full, int n_max) {
    if (f_full.empty() || f_full[0] == 0.0)
        throw std::domain_error("series_reciprocal: zero constant term");
    std::vector<double> g(static_cast<size_t>(n_max) + 1, 0.0);
    g[0] = 1.0 / f_full[0];
    for (int n = 1; n <= n_max; ++n) {
        double s = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double fk = (static_cast<size_t>(k) < f_full.size()) ? f_full[k] : 0.0;
            s += fk * g[n - k];
        }
        g[n] = -s / f_full[0];
    }
    return g;
}

std::vector<double> series_sqrt(std::span<const double> f_full, int n_max) {
    if (f_full.empty() || f_full[0] <= 0.0)
        throw std::domain_error("series_sqrt: constant term must be positive");
    std::vector<double> s(static_cast<size_t>(n_max) + 1, 0.0);
    s[0] = std::sqrt(f_full[0]);
    // Co_n[s^2] = f_n  =>  2 s0 s_n = f_n - sum_{k=1}^{n-1} s_k s_{n-k}
    for (int n = 1; n <= n_max; ++n) {
        const double fn = (static_cast<size_t>(n) < f_full.size()) ? f_full[n] : 0.0;
        double cross = 0.0;
        for (int k = 1; k < n; ++k) cross += s[k] * s[n - k];
        s[n] = (fn - cross) / (2.0 * s[0]);
    }
    return s;
}

double eval_linear_series(std::span<const double> coeffs, double w) {
    // Horner from the top: w * (c1 + w * (c2 + ...))
    double acc = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = coeffs[i] + w * acc;
    return w * acc;
}

} // namespace ssmamp
