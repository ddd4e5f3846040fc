#include "ssmamp/prior.hpp"

#include "ssmamp/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ssmamp {

Prior Prior::bernoulli_gaussian(double rho) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("Prior: rho must be in (0, 1]");
    Prior p;
    p.kind = PriorKind::BernoulliGaussian;
    p.rho = rho;
    return p;
}

Prior Prior::gaussian(double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("Prior: variance must be positive");
    Prior p;
    p.kind = PriorKind::Gaussian;
    p.variance = variance;
    return p;
}

double Prior::second_moment() const {
    return kind == PriorKind::Gaussian ? variance : 1.0;
}

double Prior::sample(Rng& rng) const {
    if (kind == PriorKind::Gaussian) return std::sqrt(variance) * rng.normal();
    if (rng.uniform() <= rho) return std::sqrt(slab_variance()) * rng.normal();
    return 0.0;
}

Eigen::VectorXd Prior::sample_vector(Eigen::Index n, Rng& rng) const {
    Eigen::VectorXd x(n);
    for (Eigen::Index k = 0; k < n; ++k) x(k) = sample(rng);
    return x;
}

std::string Prior::describe() const {
    std::ostringstream os;
    if (kind == PriorKind::Gaussian)
        os << "gaussian(variance=" << variance << ")";
    else
        os << "bernoulli_gaussian(rho=" << rho << ")";
    return os.str();
}

DenoiseResult denoise(const Prior& prior, double psi, double v) {
    if (!(v > 0.0)) throw std::invalid_argument("denoise: v must be positive");
    if (!std::isfinite(psi)) throw std::invalid_argument("denoise: psi must be finite");

    if (prior.kind == PriorKind::Gaussian) {
        const double s = prior.variance;
        return {s * v * psi / (1.0 + s * v), s / (1.0 + s * v)};
    }

    // Spike-and-slab posterior: mixture of a point mass at 0 and a Gaussian
    // with precision a = 1/slab_var + v. The slab weight is computed in
    // logistic form so large v * psi^2 cannot overflow.
    const double rho = prior.rho;
    const double slab_var = prior.slab_variance();
    const double a = 1.0 / slab_var + v;
    const double slab_mean = v * psi / a;
    const double slab_post_var = 1.0 / a;
    const double r = (1.0 / slab_var) / a; // in (0, 1)
    const double g = 0.5 * v * psi * psi * (1.0 - r);
    const double odds0 = (1.0 - rho) / (rho * std::sqrt(r)); // spike/slab prior odds
    const double w_slab = 1.0 / (1.0 + odds0 * std::exp(-g));

    const double mean = w_slab * slab_mean;
    const double second = w_slab * (slab_mean * slab_mean + slab_post_var);
    return {mean, second - mean * mean};
}

double denoise_derivative(const Prior& prior, double psi, double v) {
    return v * denoise(prior, psi, v).variance;
}

VectorDenoiseResult denoise_vector(const Prior& prior, const Eigen::VectorXd& psi, double v) {
    VectorDenoiseResult out;
    out.mean.resize(psi.size());
    double var_sum = 0.0;
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
        const DenoiseResult r = denoise(prior, psi(k), v);
        out.mean(k) = r.mean;
        var_sum += r.variance;
    }
    out.avg_variance = psi.size() > 0 ? var_sum / static_cast<double>(psi.size()) : 0.0;
    return out;
}

double effective_mse(const Prior& prior, double sigma_x, double theta_var, double v,
                     int quadrature_order) {
    if (!(theta_var >= 0.0)) throw std::invalid_argument("effective_mse: negative field variance");
    const QuadratureRule rule = normal_expectation_rule(quadrature_order);
    const double sd = std::sqrt(theta_var);

    auto channel_mse = [&](double x) {
        double acc = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            const double psi = sigma_x * x + sd * rule.nodes[i];
            const double e = denoise(prior, psi, v).mean - x;
            acc += rule.weights[i] * e * e;
        }
        return acc;
    };

    if (prior.kind == PriorKind::Gaussian) {
        const double s = std::sqrt(prior.variance);
        double acc = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * channel_mse(s * rule.nodes[i]);
        return acc;
    }

    const double s = std::sqrt(prior.slab_variance());
    double slab = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        slab += rule.weights[i] * channel_mse(s * rule.nodes[i]);
    return (1.0 - prior.rho) * channel_mse(0.0) + prior.rho * slab;
}

ReplicaFixedPoint replica_chi(const Prior& prior, const EnsembleSpec& ens,
                              const ReplicaOptions& opts) {
    ens.validate();
    double chi = prior.second_moment();
    double v = 0.0;
    for (int it = 1; it <= opts.max_iters; ++it) {
        v = ens.xi - r_transform(ens, chi);
        if (!(v > 0.0))
            throw std::domain_error("replica_chi: v = xi - R(chi) is not positive");
        const double next = effective_mse(prior, 1.0, 1.0 / v, v, opts.quadrature_order);
        const double damped = (1.0 - opts.damping) * chi + opts.damping * next;
        const double delta = std::abs(damped - chi);
        chi = damped;
        if (delta < opts.tol) {
            v = ens.xi - r_transform(ens, chi);
            return {chi, v, it};
        }
    }
    std::ostringstream os;
    os << "replica_chi: no convergence after " << opts.max_iters
       << " iterations (last chi = " << chi << ")";
    throw std::runtime_error(os.str());
}

} // namespace ssmamp
