#pragma once

#include "ssmamp/rmt.hpp"
#include "ssmamp/rng.hpp"

#include <Eigen/Dense>

#include <string>

namespace ssmamp {

enum class PriorKind { BernoulliGaussian, Gaussian };

// Scalar signal prior with closed-form posterior mean/variance under the
// Gaussian pseudo-likelihood exp(-v/2 (x - psi)^2).
//
// BernoulliGaussian(rho): x = 0 with prob 1-rho, else N(0, 1/rho), so the
// second moment is 1 regardless of rho (unit signal power convention).
// Gaussian(variance): plain zero-mean Gaussian.
struct Prior {
    PriorKind kind = PriorKind::BernoulliGaussian;
    double rho = 0.1;      // sparsity fraction (BernoulliGaussian)
    double variance = 1.0; // Gaussian kind only

    static Prior bernoulli_gaussian(double rho);
    static Prior gaussian(double variance);

    double second_moment() const;
    double slab_variance() const { return 1.0 / rho; } // BernoulliGaussian spike-free part

    double sample(Rng& rng) const;
    Eigen::VectorXd sample_vector(Eigen::Index n, Rng& rng) const;

    std::string describe() const;
};

struct DenoiseResult {
    double mean = 0.0;
    double variance = 0.0;
};

// Posterior mean/variance of q(x) ~ p(x) exp(-v/2 (x - psi)^2). v must be > 0.
DenoiseResult denoise(const Prior& prior, double psi, double v);

// d mean / d psi; equals v * posterior variance (Gaussian-family identity).
double denoise_derivative(const Prior& prior, double psi, double v);

// Componentwise denoising of a field; returns means and the average
// posterior variance (the normalized total variance).
struct VectorDenoiseResult {
    Eigen::VectorXd mean;
    double avg_variance = 0.0;
};
VectorDenoiseResult denoise_vector(const Prior& prior, const Eigen::VectorXd& psi, double v);

struct ReplicaFixedPoint {
    double chi = 0.0;
    double v = 0.0;
    int iterations = 0;
};

struct ReplicaOptions {
    int quadrature_order = 61;
    double tol = 1e-10;
    int max_iters = 10000;
    double damping = 0.5;
};

// Solves the replica fixed point chi = <(x - eta_v(theta + x))^2> with
// theta ~ N(0, 1/v) and v = xi - R(chi). Gauss-Hermite in theta (and in the
// slab component of x), damped outer iteration. Throws on non-convergence
// or if v <= 0 is encountered.
ReplicaFixedPoint replica_chi(const Prior& prior, const EnsembleSpec& ens,
                              const ReplicaOptions& opts = {});

// <(x - eta_v(sigma_x * x + theta))^2> with theta ~ N(0, theta_var):
// effective-channel mean squared error used by the state-evolution
// recursions. sigma_x = 1, theta_var = 1/v is the replica channel.
double effective_mse(const Prior& prior, double sigma_x, double theta_var, double v,
                     int quadrature_order = 61);

} // namespace ssmamp
