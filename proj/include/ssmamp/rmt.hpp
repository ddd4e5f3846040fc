#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ssmamp {

enum class EnsembleKind { IidGaussian, RowOrthogonal, Custom };

std::string to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(const std::string& name);

// Which random matrix ensemble the N x K observation matrix A is drawn from,
// together with the model parameters that fix the coupling matrix
// J = xi * (I - A^T A) and its limiting eigenvalue distribution.
//
// alpha = N/K in (0, 1], xi = noise precision > 0. Custom ensembles are
// specified by the free cumulants of J directly (c_1 must vanish: J is
// trace-free by construction). truncation bounds all series work.
struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::IidGaussian;
    double alpha = 0.5;
    double xi = 1.0;
    std::vector<double> custom_cumulants; // used only for kind == Custom
    int truncation = 64;

    static EnsembleSpec iid_gaussian(double alpha, double xi, int truncation = 64);
    static EnsembleSpec row_orthogonal(double alpha, double xi, int truncation = 64);
    static EnsembleSpec custom(std::vector<double> cumulants, double alpha, double xi,
                               int truncation = 64);

    // (xi_1, xi_2) = (xi, xi*(alpha-1)/alpha); xi_2 <= 0 for alpha <= 1.
    double xi1() const { return xi; }
    double xi2() const { return xi * (alpha - 1.0) / alpha; }

    void validate() const; // throws std::invalid_argument on bad parameters
};

// R-transform of the LED of J evaluated at omega. Exact 0 at omega = 0.
// Throws std::domain_error outside the transform's real domain (negative
// discriminant for the row-orthogonal branch).
double r_transform(const EnsembleSpec& ens, double omega);

// Coefficients {a_1, ..., a_n_max} of the inverse R-transform
// sum_{n>=1} a_n omega^n. Closed forms for the named ensembles; series
// reversion of the cumulant series for Custom (needs n_max + 1 cumulants).
std::vector<double> r_inverse_coeffs(const EnsembleSpec& ens, int n_max);

// Free cumulants {c_1, ..., c_n_max} of the LED of J. For the named
// ensembles these come from closed forms; for Custom they are the stored
// list (truncated or zero-padded).
std::vector<double> free_cumulants(const EnsembleSpec& ens, int n_max);

// Cumulant conversion for the Gramian relation R(w) = xi - xi*Rt(-xi*w):
// given free cumulants of A^T A, returns free cumulants of J.
std::vector<double> cumulants_from_gramian(std::span<const double> gramian_cumulants,
                                           double xi);

// Coefficient matrix of the bivariate transform
//   B(w, z) = (1/Rinv(w) - 1/Rinv(z))^{-1} (z - w),
// entry (n, k) = Co_{w^n z^k}[B], 0 <= n, k <= n_max (row/col 0 are zero).
// Closed forms for the named ensembles; truncated bivariate series
// arithmetic for Custom.
Eigen::MatrixXd b_coefficients(const EnsembleSpec& ens, int n_max);

// Same as b_coefficients but always through the numeric bivariate-expansion
// path, given the cumulants of J. Used as the oracle for the closed forms.
Eigen::MatrixXd b_coefficients_numeric(std::span<const double> cumulants, int n_max);

// A sampled observation matrix together with its provenance.
struct SensingMatrix {
    Eigen::MatrixXd a; // N x K
    EnsembleSpec ensemble;
    std::uint64_t seed = 0;

    Eigen::Index n_rows() const { return a.rows(); }
    Eigen::Index n_cols() const { return a.cols(); }
};

// Draws A for the given ensemble. n_rows must equal round(alpha * n_cols).
// IidGaussian: entries iid N(0, 1/N). RowOrthogonal: alpha^{-1/2} times the
// first N rows of a Haar orthogonal K x K matrix. Deterministic per seed.
SensingMatrix sample_matrix(const EnsembleSpec& ens, Eigen::Index n_rows,
                            Eigen::Index n_cols, std::uint64_t seed);

// First n_cols columns of a Haar-distributed K x K orthogonal matrix,
// returned as K x n_cols. Gaussian orthogonalization with the positive
// triangular-diagonal convention that makes the law exactly Haar.
Eigen::MatrixXd sample_haar_frame(Eigen::Index dim, Eigen::Index n_cols,
                                  std::uint64_t seed);

} // namespace ssmamp
