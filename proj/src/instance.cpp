#include "ssmamp/instance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssmamp {

ProblemInstance::ProblemInstance(SensingMatrix matrix, Eigen::VectorXd y,
                                 std::optional<Eigen::VectorXd> x_true)
    : matrix_(std::move(matrix)), y_(std::move(y)), x_true_(std::move(x_true)) {
    if (y_.size() != matrix_.n_rows())
        throw std::invalid_argument("ProblemInstance: y length must equal N");
    if (x_true_ && x_true_->size() != matrix_.n_cols())
        throw std::invalid_argument("ProblemInstance: x_true length must equal K");
    h_ = xi() * (matrix_.a.transpose() * y_);
}

Eigen::VectorXd ProblemInstance::apply_j(const Eigen::VectorXd& m) const {
    return xi() * (m - matrix_.a.transpose() * (matrix_.a * m));
}

Eigen::VectorXd ProblemInstance::residual_field(const Eigen::VectorXd& m) const {
    return matrix_.a.transpose() * (y_ - matrix_.a * m);
}

Eigen::MatrixXd ProblemInstance::dense_j() const {
    if (k() > 4096)
        throw std::invalid_argument("dense_j: refusing to materialize J for K > 4096");
    Eigen::MatrixXd j = -xi() * (matrix_.a.transpose() * matrix_.a);
    j.diagonal().array() += xi();
    return j;
}

double ProblemInstance::mse(const Eigen::VectorXd& m) const {
    if (!x_true_) return std::numeric_limits<double>::quiet_NaN();
    return (m - *x_true_).squaredNorm() / static_cast<double>(k());
}

ProblemInstance make_synthetic_instance(const EnsembleSpec& ens, const Prior& prior,
                                        Eigen::Index k, std::uint64_t seed) {
    const auto n = static_cast<Eigen::Index>(std::llround(ens.alpha * static_cast<double>(k)));
    SensingMatrix a = sample_matrix(ens, n, k, derive_seed(seed, 0));

    Rng x_rng(derive_seed(seed, 1));
    Eigen::VectorXd x = prior.sample_vector(k, x_rng);

    Rng n_rng(derive_seed(seed, 2));
    const double noise_sd = 1.0 / std::sqrt(ens.xi);
    Eigen::VectorXd noise(n);
    for (Eigen::Index i = 0; i < n; ++i) noise(i) = noise_sd * n_rng.normal();

    Eigen::VectorXd y = a.a * x + noise;
    return ProblemInstance(std::move(a), std::move(y), std::move(x));
}

} // namespace ssmamp
