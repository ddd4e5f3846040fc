#pragma once

#include "ssmamp/prior.hpp"
#include "ssmamp/rmt.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace ssmamp {

// Analytic predictors for the trajectory of the single-step memory
// dynamics. All of them are deterministic functions of the scalar
// sequences chi(t) (and v(t) where stated); chi(-1)-style boundary values
// follow the conventions zeta(-1) = 0, Q(-1) = 1, G(0,-1) = 0.

// zeta(t) = Q(t) sum_{tau<=t} a_{t+1-tau} / (chi(tau) Q(tau-1)), evaluated
// through the R-product ratios so Q never under/overflows. Output length T
// (t = 0..T-1); requires chi_seq.size() >= T.
std::vector<double> zeta_sequence(std::span<const double> chi_seq, const EnsembleSpec& ens,
                                  int T);

// sigma_x(t) = [zeta(t) xi - zeta(t-1) R(chi(t))] / v(t).
std::vector<double> sigma_x_sequence(std::span<const double> chi_seq,
                                     std::span<const double> v_seq, const EnsembleSpec& ens,
                                     int T);

// Memory coefficients G(t, t-1) for t = 0..T-1 (0 at t = 0).
std::vector<double> g_mem_sequence(std::span<const double> chi_seq, const EnsembleSpec& ens,
                                   int T);

// Long-term response diagnostic: G(t, tau) = a_{t-tau} prod_{s=tau..t-1}
// G(s+1, s) for t in (tau, T); entries with t <= tau are zero.
std::vector<double> response_sequence(std::span<const double> chi_seq, const EnsembleSpec& ens,
                                      int tau, int T);

// Field covariance matrix prediction: for t, t' < T,
//   C_theta(t,t') = zeta(t')/v(t') sigma_x(t)
//     + Q(t)Q(t')/(v(t)v(t')) sum_{tau<=t} sum_{s<=t'}
//       Co_{w^{t+1-tau} z^{t'+1-s}}[B] (C(tau,s) - chi(s) zeta(s-1))
//       / (chi(tau) chi(s) Q(tau-1) Q(s-1)).
// correlation supplies C(tau,s) (empirical, or diagonal from state
// evolution). The literal evaluation is asymmetric off the self-consistent
// manifold, so the symmetrized matrix (M + M^T)/2 is returned.
Eigen::MatrixXd c_theta_matrix(std::span<const double> chi_seq, std::span<const double> v_seq,
                               const Eigen::MatrixXd& correlation, const EnsembleSpec& ens);

// kappa(t) = [chi(t) - chi(t) zeta(t-1) + G(t,t-1)^2 kappa(t-1)]/(xi1 xi2),
// kappa(-1) = 0. Row-orthogonal ensembles only.
std::vector<double> kappa_sequence(std::span<const double> chi_seq,
                                   std::span<const double> zeta_seq,
                                   std::span<const double> g_mem_seq, const EnsembleSpec& ens);

// Diagonal C_theta(t,t) through the closed per-ensemble recursions:
//   row-orthogonal: zeta(t) sigma_x(t)/v(t) - R(chi(t))^2/(chi(t)^2 v(t)^2) kappa(t)
//   iid Gaussian:   the single-coefficient collapse of the double sum.
std::vector<double> c_theta_diag(std::span<const double> chi_seq, std::span<const double> v_seq,
                                 const EnsembleSpec& ens);

// State-evolution trajectory: chi[t] is the predicted MSE of m(t),
// c_theta[t] the variance of the zero-mean part of the field psi(t) that
// produces m(t+1), v[t] the matching denoiser precision.
struct SeTrajectory {
    std::vector<double> chi;     // length T
    std::vector<double> v;       // length T
    std::vector<double> c_theta; // length T
    std::vector<double> sigma_x; // length T
    std::vector<double> zeta;    // length T
};

// AMP state evolution (iid Gaussian ensemble, v(t) = xi - R(chi(t))):
//   C_theta(t,t) = 1/xi + chi(t)/alpha,
//   chi(t+1) = <(eta_{v(t)}(sqrt(C_theta(t,t)) z + x) - x)^2>.
SeTrajectory amp_state_evolution(const Prior& prior, const EnsembleSpec& ens, int T,
                                 int quadrature_order = 61);

// Deterministic chi(t) forward closure for the named ensembles: exact AMP
// state evolution for iid Gaussian; for row-orthogonal the diagonal
// kappa-recursion closed with the effective channel
// chi(t+1) = <(eta_{v(t)}(sigma_x(t) x + theta) - x)^2>, theta ~ N(0, C_theta(t,t)).
SeTrajectory se_trajectory(const Prior& prior, const EnsembleSpec& ens, int T,
                           int quadrature_order = 61);

// Marginal-statistics check of a field snapshot against the predicted law
// psi ~ sigma_x x + N(0, c_theta): variance gap, moment statistics and a
// Kolmogorov-Smirnov distance of (psi - sigma_x x)/sqrt(c_theta) vs N(0,1).
struct FieldCheckReport {
    double predicted_var = 0.0;
    double empirical_var = 0.0;
    double variance_gap_rel = 0.0;
    double mean = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double ks_distance = 0.0;
    Eigen::Index n = 0;
};

FieldCheckReport replica_field_check(const Eigen::VectorXd& psi, const Eigen::VectorXd& x_true,
                                     double sigma_x_t, double c_theta_tt);

} // namespace ssmamp
