#include "ssmamp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssmamp {

namespace {

void check_chi(std::span<const double> chi_seq, int T, const char* who) {
    if (T < 1) throw std::invalid_argument(std::string(who) + ": T must be >= 1");
    if (static_cast<int>(chi_seq.size()) < T)
        throw std::invalid_argument(std::string(who) + ": chi sequence shorter than T");
    for (int t = 0; t < T; ++t)
        if (!(chi_seq[t] > 0.0))
            throw std::invalid_argument(std::string(who) + ": chi(t) must be positive");
}

std::vector<double> r_values(std::span<const double> chi_seq, const EnsembleSpec& ens, int T) {
    std::vector<double> r(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) r[t] = r_transform(ens, chi_seq[t]);
    return r;
}

// pi(tau, t) = prod_{s=tau..t} R(chi(s)) = Q(t)/Q(tau-1), as a lower
// triangle: pi[t][tau] for tau <= t.
std::vector<std::vector<double>> r_products(const std::vector<double>& r) {
    const int T = static_cast<int>(r.size());
    std::vector<std::vector<double>> pi(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
        pi[t].resize(static_cast<size_t>(t) + 1);
        pi[t][t] = r[t];
        for (int tau = t - 1; tau >= 0; --tau) pi[t][tau] = (t > 0 ? pi[t - 1][tau] : 1.0) * r[t];
    }
    return pi;
}

} // namespace

std::vector<double> zeta_sequence(std::span<const double> chi_seq, const EnsembleSpec& ens,
                                  int T) {
    check_chi(chi_seq, T, "zeta_sequence");
    const std::vector<double> a = r_inverse_coeffs(ens, T);
    const std::vector<double> r = r_values(chi_seq, ens, T);
    const auto pi = r_products(r);
    std::vector<double> zeta(static_cast<size_t>(T), 0.0);
    for (int t = 0; t < T; ++t) {
        double acc = 0.0;
        for (int tau = 0; tau <= t; ++tau)
            acc += a[static_cast<size_t>(t - tau)] * pi[t][tau] / chi_seq[tau];
        zeta[t] = acc;
    }
    return zeta;
}

std::vector<double> sigma_x_sequence(std::span<const double> chi_seq,
                                     std::span<const double> v_seq, const EnsembleSpec& ens,
                                     int T) {
    check_chi(chi_seq, T, "sigma_x_sequence");
    if (static_cast<int>(v_seq.size()) < T)
        throw std::invalid_argument("sigma_x_sequence: v sequence shorter than T");
    const std::vector<double> zeta = zeta_sequence(chi_seq, ens, T);
    std::vector<double> sigma(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
        if (v_seq[t] == 0.0) throw std::domain_error("sigma_x_sequence: v(t) = 0");
        const double zeta_prev = t > 0 ? zeta[t - 1] : 0.0;
        sigma[t] = (zeta[t] * ens.xi - zeta_prev * r_transform(ens, chi_seq[t])) / v_seq[t];
    }
    return sigma;
}

std::vector<double> g_mem_sequence(std::span<const double> chi_seq, const EnsembleSpec& ens,
                                   int T) {
    check_chi(chi_seq, T, "g_mem_sequence");
    std::vector<double> g(static_cast<size_t>(T), 0.0);
    for (int t = 1; t < T; ++t)
        g[t] = (chi_seq[t] / chi_seq[t - 1]) * r_transform(ens, chi_seq[t - 1]);
    return g;
}

std::vector<double> response_sequence(std::span<const double> chi_seq, const EnsembleSpec& ens,
                                      int tau, int T) {
    check_chi(chi_seq, T, "response_sequence");
    if (tau < 0 || tau >= T) throw std::invalid_argument("response_sequence: tau out of range");
    const std::vector<double> a = r_inverse_coeffs(ens, T);
    const std::vector<double> g = g_mem_sequence(chi_seq, ens, T);
    std::vector<double> out(static_cast<size_t>(T), 0.0);
    double prod = 1.0; // prod_{s=tau..t-1} G(s+1, s)
    for (int t = tau + 1; t < T; ++t) {
        prod *= g[t]; // G(t, t-1), entering with prod up to t-1
        out[t] = a[static_cast<size_t>(t - tau - 1)] * prod;
    }
    return out;
}

Eigen::MatrixXd c_theta_matrix(std::span<const double> chi_seq, std::span<const double> v_seq,
                               const Eigen::MatrixXd& correlation, const EnsembleSpec& ens) {
    const int T = static_cast<int>(chi_seq.size());
    check_chi(chi_seq, T, "c_theta_matrix");
    if (static_cast<int>(v_seq.size()) < T)
        throw std::invalid_argument("c_theta_matrix: v sequence shorter than T");
    if (correlation.rows() < T || correlation.cols() < T)
        throw std::invalid_argument("c_theta_matrix: correlation matrix smaller than T x T");

    const Eigen::MatrixXd co = b_coefficients(ens, T + 1);
    const std::vector<double> zeta = zeta_sequence(chi_seq, ens, T);
    const std::vector<double> sigma = sigma_x_sequence(chi_seq, v_seq, ens, T);
    const std::vector<double> r = r_values(chi_seq, ens, T);
    const auto pi = r_products(r);

    Eigen::MatrixXd m(T, T);
    for (int t = 0; t < T; ++t) {
        for (int tp = 0; tp < T; ++tp) {
            double acc = zeta[tp] / v_seq[tp] * sigma[t];
            double dsum = 0.0;
            for (int tau = 0; tau <= t; ++tau) {
                for (int s = 0; s <= tp; ++s) {
                    const double co_ns = co(t + 1 - tau, tp + 1 - s);
                    if (co_ns == 0.0) continue;
                    const double zeta_sm1 = s > 0 ? zeta[s - 1] : 0.0;
                    dsum += co_ns * pi[t][tau] * pi[tp][s] *
                            (correlation(tau, s) - chi_seq[s] * zeta_sm1) /
                            (chi_seq[tau] * chi_seq[s]);
                }
            }
            m(t, tp) = acc + dsum / (v_seq[t] * v_seq[tp]);
        }
    }
    return 0.5 * (m + m.transpose());
}

std::vector<double> kappa_sequence(std::span<const double> chi_seq,
                                   std::span<const double> zeta_seq,
                                   std::span<const double> g_mem_seq, const EnsembleSpec& ens) {
    if (ens.kind != EnsembleKind::RowOrthogonal)
        throw std::invalid_argument("kappa_sequence: row-orthogonal ensembles only");
    const double x1x2 = ens.xi1() * ens.xi2();
    if (x1x2 == 0.0)
        throw std::domain_error("kappa_sequence: xi1 * xi2 = 0 (alpha = 1)");
    const int T = static_cast<int>(chi_seq.size());
    if (static_cast<int>(zeta_seq.size()) < T || static_cast<int>(g_mem_seq.size()) < T)
        throw std::invalid_argument("kappa_sequence: sequence length mismatch");
    std::vector<double> kappa(static_cast<size_t>(T), 0.0);
    double prev = 0.0; // kappa(-1)
    for (int t = 0; t < T; ++t) {
        const double zeta_prev = t > 0 ? zeta_seq[t - 1] : 0.0;
        kappa[t] = (chi_seq[t] - chi_seq[t] * zeta_prev + g_mem_seq[t] * g_mem_seq[t] * prev) /
                   x1x2;
        prev = kappa[t];
    }
    return kappa;
}

std::vector<double> c_theta_diag(std::span<const double> chi_seq, std::span<const double> v_seq,
                                 const EnsembleSpec& ens) {
    const int T = static_cast<int>(chi_seq.size());
    check_chi(chi_seq, T, "c_theta_diag");
    if (static_cast<int>(v_seq.size()) < T)
        throw std::invalid_argument("c_theta_diag: v sequence shorter than T");
    const std::vector<double> zeta = zeta_sequence(chi_seq, ens, T);
    const std::vector<double> sigma = sigma_x_sequence(chi_seq, v_seq, ens, T);
    std::vector<double> diag(static_cast<size_t>(T));

    switch (ens.kind) {
        case EnsembleKind::IidGaussian: {
            // only Co(1,1) = alpha/xi^2 survives in the double sum
            const double co11 = ens.alpha / (ens.xi * ens.xi);
            for (int t = 0; t < T; ++t) {
                const double r_t = r_transform(ens, chi_seq[t]);
                const double zeta_prev = t > 0 ? zeta[t - 1] : 0.0;
                diag[t] = zeta[t] * sigma[t] / v_seq[t] +
                          co11 * r_t * r_t * (1.0 - zeta_prev) /
                              (chi_seq[t] * v_seq[t] * v_seq[t]);
            }
            return diag;
        }
        case EnsembleKind::RowOrthogonal: {
            const std::vector<double> g = g_mem_sequence(chi_seq, ens, T);
            const std::vector<double> kappa = kappa_sequence(chi_seq, zeta, g, ens);
            for (int t = 0; t < T; ++t) {
                const double r_t = r_transform(ens, chi_seq[t]);
                diag[t] = zeta[t] * sigma[t] / v_seq[t] -
                          r_t * r_t * kappa[t] /
                              (chi_seq[t] * chi_seq[t] * v_seq[t] * v_seq[t]);
            }
            return diag;
        }
        case EnsembleKind::Custom:
            throw std::invalid_argument(
                "c_theta_diag: no closed diagonal recursion for custom ensembles; "
                "use c_theta_matrix with a correlation matrix");
    }
    throw std::logic_error("c_theta_diag: unreachable");
}

SeTrajectory amp_state_evolution(const Prior& prior, const EnsembleSpec& ens, int T,
                                 int quadrature_order) {
    if (ens.kind != EnsembleKind::IidGaussian)
        throw std::invalid_argument("amp_state_evolution: iid Gaussian ensemble only");
    if (T < 1) throw std::invalid_argument("amp_state_evolution: T must be >= 1");
    SeTrajectory se;
    se.chi.resize(static_cast<size_t>(T));
    se.v.resize(static_cast<size_t>(T));
    se.c_theta.resize(static_cast<size_t>(T));
    se.chi[0] = prior.second_moment();
    for (int t = 0; t < T; ++t) {
        se.c_theta[t] = 1.0 / ens.xi + se.chi[t] / ens.alpha;
        se.v[t] = ens.xi - r_transform(ens, se.chi[t]);
        const double next = effective_mse(prior, 1.0, se.c_theta[t], se.v[t], quadrature_order);
        if (t + 1 < T) se.chi[t + 1] = next;
    }
    se.zeta = zeta_sequence(se.chi, ens, T);
    se.sigma_x = sigma_x_sequence(se.chi, se.v, ens, T);
    return se;
}

SeTrajectory se_trajectory(const Prior& prior, const EnsembleSpec& ens, int T,
                           int quadrature_order) {
    if (ens.kind == EnsembleKind::IidGaussian)
        return amp_state_evolution(prior, ens, T, quadrature_order);
    if (ens.kind != EnsembleKind::RowOrthogonal)
        throw std::invalid_argument("se_trajectory: custom ensembles have no closed recursion");

    // Diagonal forward closure: chi(0..t) fixes zeta, sigma_x and the
    // kappa-recursion variance of psi(t); the effective channel then yields
    // chi(t+1).
    SeTrajectory se;
    se.chi.assign(static_cast<size_t>(T), 0.0);
    se.v.assign(static_cast<size_t>(T), 0.0);
    se.c_theta.assign(static_cast<size_t>(T), 0.0);
    se.sigma_x.assign(static_cast<size_t>(T), 0.0);
    se.zeta.assign(static_cast<size_t>(T), 0.0);
    se.chi[0] = prior.second_moment();
    for (int t = 0; t < T; ++t) {
        std::span<const double> chi_head(se.chi.data(), static_cast<size_t>(t) + 1);
        se.v[t] = ens.xi - r_transform(ens, se.chi[t]);
        if (!(se.v[t] > 0.0)) throw std::domain_error("se_trajectory: v(t) <= 0");
        std::span<const double> v_head(se.v.data(), static_cast<size_t>(t) + 1);
        const std::vector<double> diag = c_theta_diag(chi_head, v_head, ens);
        const std::vector<double> zeta = zeta_sequence(chi_head, ens, t + 1);
        const std::vector<double> sigma = sigma_x_sequence(chi_head, v_head, ens, t + 1);
        se.c_theta[t] = diag[t];
        se.zeta[t] = zeta[t];
        se.sigma_x[t] = sigma[t];
        if (!(se.c_theta[t] >= 0.0))
            throw std::domain_error("se_trajectory: negative predicted field variance");
        const double next =
            effective_mse(prior, se.sigma_x[t], se.c_theta[t], se.v[t], quadrature_order);
        if (t + 1 < T) se.chi[t + 1] = next;
    }
    return se;
}

FieldCheckReport replica_field_check(const Eigen::VectorXd& psi, const Eigen::VectorXd& x_true,
                                     double sigma_x_t, double c_theta_tt) {
    if (psi.size() != x_true.size() || psi.size() < 2)
        throw std::invalid_argument("replica_field_check: psi and x_true sizes must match");
    if (!(c_theta_tt > 0.0))
        throw std::invalid_argument("replica_field_check: predicted variance must be positive");

    FieldCheckReport rep;
    rep.n = psi.size();
    rep.predicted_var = c_theta_tt;
    Eigen::ArrayXd e = (psi - sigma_x_t * x_true).array();
    rep.mean = e.mean();
    const auto n = static_cast<double>(rep.n);
    const Eigen::ArrayXd c = e - rep.mean;
    const double m2 = c.square().sum() / n;
    const double m3 = c.cube().sum() / n;
    const double m4 = c.square().square().sum() / n;
    rep.empirical_var = m2 * n / (n - 1.0);
    rep.variance_gap_rel = std::abs(rep.empirical_var - rep.predicted_var) / rep.predicted_var;
    rep.skewness = m3 / std::pow(m2, 1.5);
    rep.excess_kurtosis = m4 / (m2 * m2) - 3.0;

    // Kolmogorov-Smirnov distance of e/sqrt(predicted) against N(0,1)
    std::vector<double> z(e.data(), e.data() + e.size());
    const double sd = std::sqrt(c_theta_tt);
    for (double& zi : z) zi /= sd;
    std::sort(z.begin(), z.end());
    double ks = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        const double cdf = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        ks = std::max(ks, std::max(std::abs(cdf - lo), std::abs(hi - cdf)));
    }
    rep.ks_distance = ks;
    return rep;
}

} // namespace ssmamp
