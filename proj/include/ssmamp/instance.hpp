#pragma once

#include "ssmamp/prior.hpp"
#include "ssmamp/rmt.hpp"

#include <Eigen/Dense>

#include <optional>

namespace ssmamp {

// One realization of the observation model y = A x + n, with n iid Gaussian
// of precision xi, plus the derived quantities the solvers need:
//   h = xi A^T y,   J = xi (I - A^T A).
// J is applied implicitly through two A-products; the dense form is only
// materialized on demand for small K (diagnostics and tests).
class ProblemInstance {
public:
    ProblemInstance(SensingMatrix matrix, Eigen::VectorXd y,
                    std::optional<Eigen::VectorXd> x_true = std::nullopt);

    const SensingMatrix& matrix() const { return matrix_; }
    const EnsembleSpec& ensemble() const { return matrix_.ensemble; }
    const Eigen::VectorXd& y() const { return y_; }
    const std::optional<Eigen::VectorXd>& x_true() const { return x_true_; }
    double xi() const { return matrix_.ensemble.xi; }
    Eigen::Index n() const { return matrix_.n_rows(); }
    Eigen::Index k() const { return matrix_.n_cols(); }

    const Eigen::VectorXd& h() const { return h_; }

    // J m = xi (m - A^T (A m)); one matrix pair-product per call.
    Eigen::VectorXd apply_j(const Eigen::VectorXd& m) const;

    // xi A^T (y - A m), the residual form used by the AMP specialization.
    Eigen::VectorXd residual_field(const Eigen::VectorXd& m) const;

    // Dense J for K <= 4096 (memory guard); throws otherwise.
    Eigen::MatrixXd dense_j() const;

    double mse(const Eigen::VectorXd& m) const; // vs x_true; NaN if unknown

private:
    SensingMatrix matrix_;
    Eigen::VectorXd y_;
    std::optional<Eigen::VectorXd> x_true_;
    Eigen::VectorXd h_;
};

// Samples x ~ prior, n ~ N(0, 1/xi) and A ~ ensemble, deterministic per
// seed. Sub-seeds for (A, x, n) are derived by counter splitting so each
// piece can be regenerated independently.
ProblemInstance make_synthetic_instance(const EnsembleSpec& ens, const Prior& prior,
                                        Eigen::Index k, std::uint64_t seed);

} // namespace ssmamp
