#pragma once

#include <vector>

namespace ssmamp {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Hermite rule for integral f(t) exp(-t^2) dt (physicists' weight).
// For E_{z~N(0,1)}[g(z)] use sum_i w_i g(sqrt(2) t_i) / sqrt(pi).
QuadratureRule gauss_hermite(int order);

// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int order);

// Convenience: nodes/weights for a standard-normal expectation,
// E[g(z)] ~= sum_i weights[i] * g(nodes[i]).
QuadratureRule normal_expectation_rule(int order);

} // namespace ssmamp
