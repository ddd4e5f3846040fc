#include "ssmamp/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace ssmamp {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi
// matrix, weights are mu0 * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
    const int n = static_cast<int>(offdiag.size()) + 1;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n - 1; ++k) {
        jacobi(k, k + 1) = offdiag(k);
        jacobi(k + 1, k) = offdiag(k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("quadrature: Jacobi eigensolve failed");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

} // namespace

QuadratureRule gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    Eigen::VectorXd off(order - 1);
    for (int k = 1; k < order; ++k) off(k - 1) = std::sqrt(k / 2.0);
    return golub_welsch(off, std::sqrt(M_PI));
}

QuadratureRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    Eigen::VectorXd off(order - 1);
    for (int k = 1; k < order; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(off, 2.0);
}

QuadratureRule normal_expectation_rule(int order) {
    QuadratureRule gh = gauss_hermite(order);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    for (int k = 0; k < order; ++k) {
        gh.nodes[k] *= std::sqrt(2.0);
        gh.weights[k] *= inv_sqrt_pi;
    }
    return gh;
}

} // namespace ssmamp
