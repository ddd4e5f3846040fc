#include "ssmamp/rmt.hpp"

#include "ssmamp/rng.hpp"
#include "ssmamp/series.hpp"

#include <cmath>
#include <stdexcept>

namespace ssmamp {

std::string to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::IidGaussian: return "iid_gaussian";
        case EnsembleKind::RowOrthogonal: return "row_orthogonal";
        case EnsembleKind::Custom: return "custom";
    }
    return "unknown";
}

EnsembleKind ensemble_kind_from_string(const std::string& name) {
    if (name == "iid_gaussian" || name == "iid") return EnsembleKind::IidGaussian;
    if (name == "row_orthogonal" || name == "row-orthogonal") return EnsembleKind::RowOrthogonal;
    if (name == "custom") return EnsembleKind::Custom;
    throw std::invalid_argument("unknown ensemble kind: " + name);
}

EnsembleSpec EnsembleSpec::iid_gaussian(double alpha, double xi, int truncation) {
    EnsembleSpec ens{EnsembleKind::IidGaussian, alpha, xi, {}, truncation};
    ens.validate();
    return ens;
}

EnsembleSpec EnsembleSpec::row_orthogonal(double alpha, double xi, int truncation) {
    EnsembleSpec ens{EnsembleKind::RowOrthogonal, alpha, xi, {}, truncation};
    ens.validate();
    return ens;
}

EnsembleSpec EnsembleSpec::custom(std::vector<double> cumulants, double alpha, double xi,
                                  int truncation) {
    EnsembleSpec ens{EnsembleKind::Custom, alpha, xi, std::move(cumulants), truncation};
    ens.validate();
    return ens;
}

void EnsembleSpec::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("EnsembleSpec: alpha must be in (0, 1]");
    if (!(xi > 0.0)) throw std::invalid_argument("EnsembleSpec: xi must be positive");
    if (truncation < 1) throw std::invalid_argument("EnsembleSpec: truncation must be >= 1");
    if (kind == EnsembleKind::Custom && custom_cumulants.empty())
        throw std::invalid_argument("EnsembleSpec: custom ensemble needs cumulants");
}

double r_transform(const EnsembleSpec& ens, double omega) {
    switch (ens.kind) {
        case EnsembleKind::IidGaussian: {
            const double denom = ens.alpha + ens.xi * omega;
            if (denom == 0.0)
                throw std::domain_error("r_transform: pole at alpha + xi*omega = 0");
            return ens.xi * ens.xi * omega / denom;
        }
        case EnsembleKind::RowOrthogonal: {
            // alpha = 1 collapses A^T A to the identity, so J = 0 and R = 0.
            if (ens.alpha == 1.0) return 0.0;
            // Rationalized form of
            //   R(w) = xi - [(xi w/alpha + 1) - sqrt((xi w/alpha + 1)^2 - 4 xi w)]/(2w):
            // with q - s = 4 xi w / (q + s) the 0/0 at w = 0 disappears and the
            // value at 0 is exactly 0.
            const double q = ens.xi * omega / ens.alpha + 1.0;
            const double disc = q * q - 4.0 * ens.xi * omega;
            if (disc < 0.0)
                throw std::domain_error("r_transform: negative discriminant for row-orthogonal branch");
            const double s = std::sqrt(disc);
            return ens.xi - 2.0 * ens.xi / (q + s);
        }
        case EnsembleKind::Custom: {
            // R(w) = sum_n c_n w^{n-1}
            double acc = 0.0;
            for (size_t i = ens.custom_cumulants.size(); i-- > 0;)
                acc = ens.custom_cumulants[i] + omega * acc;
            return acc;
        }
    }
    throw std::logic_error("r_transform: unreachable");
}

std::vector<double> r_inverse_coeffs(const EnsembleSpec& ens, int n_max) {
    if (n_max < 1) throw std::invalid_argument("r_inverse_coeffs: n_max must be >= 1");
    std::vector<double> a(static_cast<size_t>(n_max), 0.0);
    switch (ens.kind) {
        case EnsembleKind::IidGaussian: {
            const double pref = ens.alpha / ens.xi;
            double p = 1.0;
            for (int n = 1; n <= n_max; ++n) {
                p /= ens.xi;
                a[n - 1] = pref * p;
            }
            return a;
        }
        case EnsembleKind::RowOrthogonal: {
            if (ens.alpha == 1.0)
                throw std::domain_error(
                    "r_inverse_coeffs: row-orthogonal with alpha = 1 has R = 0, no inverse");
            const double pref = ens.alpha / ens.xi;
            const double x1 = ens.xi1(), x2 = ens.xi2();
            double p1 = 1.0, p2 = 1.0;
            for (int n = 1; n <= n_max; ++n) {
                p1 /= x1;
                p2 /= x2;
                a[n - 1] = pref * (p1 - p2);
            }
            return a;
        }
        case EnsembleKind::Custom: {
            if (static_cast<int>(ens.custom_cumulants.size()) < n_max + 1)
                throw std::invalid_argument(
                    "r_inverse_coeffs: custom ensemble needs at least n_max + 1 cumulants");
            return series_reversion(ens.custom_cumulants, n_max);
        }
    }
    throw std::logic_error("r_inverse_coeffs: unreachable");
}

std::vector<double> free_cumulants(const EnsembleSpec& ens, int n_max) {
    if (n_max < 1) throw std::invalid_argument("free_cumulants: n_max must be >= 1");
    std::vector<double> c(static_cast<size_t>(n_max), 0.0);
    switch (ens.kind) {
        case EnsembleKind::IidGaussian: {
            // c_1 = 0, c_n = (xi^2/alpha) * (-xi/alpha)^{n-2}
            if (n_max >= 2) {
                double term = ens.xi * ens.xi / ens.alpha;
                for (int n = 2; n <= n_max; ++n) {
                    c[n - 1] = term;
                    term *= -ens.xi / ens.alpha;
                }
            }
            return c;
        }
        case EnsembleKind::RowOrthogonal: {
            if (ens.alpha == 1.0) return c; // J = 0
            // Expand R(w) = xi - 2 xi / (q(w) + s(w)) as a power series:
            // q = 1 + (xi/alpha) w, s = sqrt(1 + (2/alpha - 4) xi w + (xi w / alpha)^2).
            const int ord = n_max - 1;
            std::vector<double> disc{1.0, (2.0 / ens.alpha - 4.0) * ens.xi,
                                     (ens.xi / ens.alpha) * (ens.xi / ens.alpha)};
            std::vector<double> s = series_sqrt(disc, ord);
            s[0] += 1.0; // + q constant term
            if (ord >= 1) s[1] += ens.xi / ens.alpha;
            std::vector<double> recip = series_reciprocal(s, ord);
            c[0] = ens.xi - 2.0 * ens.xi * recip[0]; // exactly 0: recip[0] = 1/2
            for (int k = 1; k <= ord; ++k) c[k] = -2.0 * ens.xi * recip[k];
            return c;
        }
        case EnsembleKind::Custom: {
            for (int n = 0; n < n_max && n < static_cast<int>(ens.custom_cumulants.size()); ++n)
                c[n] = ens.custom_cumulants[n];
            return c;
        }
    }
    throw std::logic_error("free_cumulants: unreachable");
}

std::vector<double> cumulants_from_gramian(std::span<const double> gramian_cumulants,
                                           double xi) {
    std::vector<double> c(gramian_cumulants.size(), 0.0);
    if (!c.empty()) c[0] = xi * (1.0 - gramian_cumulants[0]);
    double sign_pow = xi * xi; // (-1)^n xi^n at n = 2
    for (size_t n = 2; n <= gramian_cumulants.size(); ++n) {
        c[n - 1] = sign_pow * gramian_cumulants[n - 1];
        sign_pow *= -xi;
    }
    return c;
}

Eigen::MatrixXd b_coefficients_numeric(std::span<const double> cumulants, int n_max) {
    if (n_max < 1) throw std::invalid_argument("b_coefficients_numeric: n_max must be >= 1");
    // Build Rinv to order 2*n_max - 1 so the per-variable truncation at
    // n_max - 1 of the divisor series is exact.
    const int a_ord = 2 * n_max - 1;
    if (static_cast<int>(cumulants.size()) < a_ord + 1)
        throw std::invalid_argument("b_coefficients_numeric: need at least 2*n_max cumulants");
    std::vector<double> a = series_reversion(cumulants, a_ord);

    // B(w,z) = w z / D(w,z) with D(0,0) = 1/a_1, D(i,j) = -g_{i+j} for
    // i,j >= 1, where g = 1 / (Rinv(w)/w).
    std::vector<double> s(a.begin(), a.end()); // s[k] = a_{k+1}
    if (s[0] == 0.0)
        throw std::domain_error("b_coefficients_numeric: zero linear coefficient (valuation mismatch)");
    std::vector<double> g = series_reciprocal(s, 2 * (n_max - 1));

    const int m = n_max - 1; // per-variable order of E = 1/D
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m + 1, m + 1);
    d(0, 0) = g[0];
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) d(i, j) = -g[static_cast<size_t>(i) + j];

    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m + 1, m + 1);
    e(0, 0) = 1.0 / d(0, 0);
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= m; ++j) {
            if (i == 0 && j == 0) continue;
            double s_ij = 0.0;
            for (int p = 0; p <= i; ++p)
                for (int q = 0; q <= j; ++q) {
                    if (p == 0 && q == 0) continue;
                    s_ij += d(p, q) * e(i - p, j - q);
                }
            e(i, j) = -s_ij / d(0, 0);
        }
    }

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n)
        for (int k = 1; k <= n_max; ++k) b(n, k) = e(n - 1, k - 1);
    return b;
}

Eigen::MatrixXd b_coefficients(const EnsembleSpec& ens, int n_max) {
    if (n_max < 1) throw std::invalid_argument("b_coefficients: n_max must be >= 1");
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    switch (ens.kind) {
        case EnsembleKind::IidGaussian:
            b(1, 1) = ens.alpha / (ens.xi * ens.xi);
            return b;
        case EnsembleKind::RowOrthogonal: {
            if (ens.alpha == 1.0)
                throw std::domain_error("b_coefficients: row-orthogonal with alpha = 1 has no inverse R");
            // B(w,z) = w z / (w z - xi1 xi2): Co(n,n) = -(xi1 xi2)^{-n}.
            const double prod = ens.xi1() * ens.xi2();
            double p = 1.0;
            for (int n = 1; n <= n_max; ++n) {
                p /= prod;
                b(n, n) = -p;
            }
            return b;
        }
        case EnsembleKind::Custom:
            return b_coefficients_numeric(ens.custom_cumulants, n_max);
    }
    throw std::logic_error("b_coefficients: unreachable");
}

Eigen::MatrixXd sample_haar_frame(Eigen::Index dim, Eigen::Index n_cols, std::uint64_t seed) {
    if (n_cols < 1 || n_cols > dim)
        throw std::invalid_argument("sample_haar_frame: need 1 <= n_cols <= dim");
    Rng rng(seed);
    Eigen::MatrixXd g(dim, n_cols);
    for (Eigen::Index j = 0; j < n_cols; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = rng.normal();

    // Blocked classical Gram-Schmidt with one re-orthogonalization pass.
    // This reproduces the unique QR factor with positive R diagonal, so the
    // frame is exactly Haar (Gaussian column spans are rotation invariant and
    // the positive-diagonal factor is unique).
    const Eigen::Index block = 64;
    Eigen::MatrixXd q(dim, n_cols);
    for (Eigen::Index start = 0; start < n_cols; start += block) {
        const Eigen::Index width = std::min(block, n_cols - start);
        Eigen::MatrixXd panel = g.middleCols(start, width);
        if (start > 0) {
            auto done = q.leftCols(start);
            panel -= done * (done.transpose() * panel); // project out
            panel -= done * (done.transpose() * panel); // second pass
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(panel);
        Eigen::MatrixXd qb = Eigen::MatrixXd::Identity(dim, width);
        qb = qr.householderQ() * qb;
        // enforce positive diagonal of the triangular factor
        for (Eigen::Index j = 0; j < width; ++j)
            if (qr.matrixQR()(j, j) < 0.0) qb.col(j) = -qb.col(j);
        q.middleCols(start, width) = qb;
    }
    return q;
}

SensingMatrix sample_matrix(const EnsembleSpec& ens, Eigen::Index n_rows,
                            Eigen::Index n_cols, std::uint64_t seed) {
    ens.validate();
    if (n_cols < 2) throw std::invalid_argument("sample_matrix: n_cols must be >= 2");
    const auto expected_rows = static_cast<Eigen::Index>(std::llround(ens.alpha * static_cast<double>(n_cols)));
    if (n_rows != expected_rows)
        throw std::invalid_argument("sample_matrix: n_rows must equal round(alpha * n_cols)");
    if (n_rows < 1) throw std::invalid_argument("sample_matrix: n_rows must be >= 1");

    SensingMatrix sm;
    sm.ensemble = ens;
    sm.seed = seed;
    switch (ens.kind) {
        case EnsembleKind::IidGaussian: {
            Rng rng(seed);
            const double scale = 1.0 / std::sqrt(static_cast<double>(n_rows));
            sm.a.resize(n_rows, n_cols);
            for (Eigen::Index i = 0; i < n_rows; ++i)
                for (Eigen::Index j = 0; j < n_cols; ++j) sm.a(i, j) = scale * rng.normal();
            return sm;
        }
        case EnsembleKind::RowOrthogonal: {
            Eigen::MatrixXd frame = sample_haar_frame(n_cols, n_rows, seed);
            sm.a = frame.transpose() / std::sqrt(ens.alpha);
            return sm;
        }
        case EnsembleKind::Custom:
            throw std::invalid_argument(
                "sample_matrix: custom ensembles specify cumulants only and cannot be sampled");
    }
    throw std::logic_error("sample_matrix: unreachable");
}

} // namespace ssmamp
