#pragma once

#include "ssmamp/instance.hpp"
#include "ssmamp/prior.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssmamp {

enum class SolverPath { Generic, Specialized, Amp };
enum class ChiMode { Empirical, Replica };

std::string to_string(SolverPath path);
SolverPath solver_path_from_string(const std::string& name);
std::string to_string(ChiMode mode);
ChiMode chi_mode_from_string(const std::string& name);

// v(t) schedule. RTransform is v(t) = xi - R(chi(t)); the algorithm only
// needs v(t) -> v > 0, so a constant schedule is also supported.
struct VSchedule {
    enum class Kind { RTransform, Constant };
    Kind kind = Kind::RTransform;
    double value = 0.0; // Constant only

    static VSchedule r_transform() { return {Kind::RTransform, 0.0}; }
    static VSchedule constant(double v) { return {Kind::Constant, v}; }
};

// Thrown when a step produces non-finite fields or an invalid v.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    SolverPath path = SolverPath::Generic;
    int max_iters = 100;
    double tol = 1e-8; // on ||m(t+1) - m(t)||_2 / sqrt(K); +inf runs max_iters
    double damping = 0.0; // 0 disables; m <- (1-d) eta + d m_old
    ChiMode chi_mode = ChiMode::Empirical;
    VSchedule v_schedule{};
    std::optional<Eigen::VectorXd> init_m; // default zeros
    std::optional<double> init_chi;        // default prior second moment
    int tap_check_every = 0;               // 0: final record only
    int quadrature_order = 61;             // replica chi mode
    std::vector<int> snapshot_iters;       // keep psi(t) for these t
    double chi_floor = 1e-12;
};

// Per-iteration scalars of the dynamics. chi(t) drives everything: the
// memory coefficient G(t, t-1), the product Q(t) = Q(t-1) R(chi(t)) with
// Q(-1) = 1, and the zeta(t) sum. pi[tau] holds prod_{s=tau..t} R(chi(s))
// (the ratio Q(t)/Q(tau-1)), so the field sum never divides by a vanishing
// Q on long runs.
struct SolverState {
    int t = 0;
    Eigen::VectorXd m_curr, m_prev;
    std::vector<Eigen::VectorXd> u_history; // generic path; u(tau) stored in the
                                            // chi(tau) Q(tau-1) gauge (raw
                                            // memory-corrected residuals)
    Eigen::VectorXd z1, z2; // specialized path fields; z1 doubles as the AMP z
    Eigen::VectorXd psi;    // field of the last executed step
    Eigen::VectorXd gamma;  // h + J m(t), diagnostic
    double chi_curr = 0.0, chi_prev = 0.0;
    double v_curr = 0.0;
    double q_curr = 1.0, q_prev = 1.0;
    double g_mem = 0.0;
    double zeta_curr = 0.0, zeta_prev = 0.0;
    double sigma_x_curr = 0.0;
    bool chi_clipped_last = false;

    std::vector<double> chi_history; // chi(0..t)
    std::vector<double> r_history;   // R(chi(0..t-1)) so far
    std::vector<double> pi;          // running R-products, see above

    int scalar_t = -1; // last t the scalar recursions were advanced to
    int psi_t = -1;    // t of the field currently held in psi
};

// Per-step configuration shared by the three step kernels.
struct StepContext {
    const Prior* prior = nullptr;
    VSchedule v_schedule{};
    double damping = 0.0;
    ChiMode chi_mode = ChiMode::Empirical;
    const std::vector<double>* chi_schedule = nullptr; // replica mode, index t
    const std::vector<double>* a_coeffs = nullptr;     // generic path
    double chi_floor = 1e-12;
};

struct TrajectoryRecord {
    int t = 0;
    double mse = 0.0; // vs x_true, NaN when unknown
    double chi = 0.0, v = 0.0, g_mem = 0.0, zeta = 0.0, q = 0.0;
    double sigma_x = 0.0;       // predicted signal coefficient of psi(t)
    double field_mean = 0.0;    // raw psi statistics (NaN on the final record)
    double field_var = 0.0;
    double field_var_emp = 0.0; // Var(psi - sigma_x x_true); NaN if no x_true
    double tap_r1 = 0.0, tap_r2 = 0.0; // NaN unless computed at this t
    bool chi_clipped = false;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    Eigen::VectorXd m_final;
    std::vector<std::pair<int, Eigen::VectorXd>> psi_snapshots;
    bool converged = false;
    std::string stop_reason;
    int iterations = 0; // steps executed; records.size() == iterations + 1

    // run metadata
    SolverPath path = SolverPath::Generic;
    ChiMode chi_mode = ChiMode::Empirical;
    double damping = 0.0;
    double tol = 0.0;
    int max_iters = 0;
    int truncation = 0;
    bool degenerate = false; // some chi hit the clip floor

    std::vector<double> chi_seq() const;
    std::vector<double> v_seq() const;
};

// Normalized total variance of the current field: the average posterior
// variance over components, clipped to [chi_floor, 10 * second moment].
double chi_update(const Prior& prior, const Eigen::VectorXd& psi, double v,
                  bool* clipped = nullptr, double chi_floor = 1e-12);

// Memory coefficient G(t, t-1) = (chi_t / chi_{t-1}) R(chi_{t-1}); defined
// as 0 at t = 0. Throws if chi_prev <= 0 for t > 0.
double memory_coefficient(double chi_curr, double chi_prev, const EnsembleSpec& ens, int t);

SolverState init_state(const ProblemInstance& instance, const Prior& prior,
                       const RunOptions& opts = {});

// One iteration of the generic single-step memory dynamics:
//   u(t)   = (h + J m(t) - G(t,t-1) m(t-1)) / (chi(t) Q(t-1))
//   psi(t) = (Q(t)/v(t)) sum_{tau<=t} a_{t+1-tau} u(tau)
//   m(t+1) = eta_{v(t)}(psi(t))
// followed by the chi/v/Q/G/zeta updates. Needs ctx.a_coeffs up to order
// t+1. Cost O(tK) plus one J-product.
void ssm_step_general(SolverState& state, const ProblemInstance& instance,
                      const StepContext& ctx);

// Row-orthogonal two-field form (constant memory in t):
//   z_i(t) = (h + J m(t) - xi_i m(t) + G(t,t-1) z_i(t-1)) / xi_i
//   m(t+1) = eta_{v(t)}(c(t) [z_1(t) - z_2(t)]),
//   c(t)   = (alpha/xi) R(chi(t)) / (chi(t) v(t)).
// Requires the row-orthogonal ensemble with alpha < 1 (xi_2 != 0).
void ssm_step_row_orthogonal(SolverState& state, const ProblemInstance& instance,
                             const StepContext& ctx);

// AMP specialization for the iid Gaussian ensemble:
//   z(t)   = A^T (y - A m(t)) + (1/xi) G(t,t-1) z(t-1)
//   m(t+1) = eta_{v(t)}(z(t) + m(t))
// with the v(t) = xi - R(chi(t)) schedule (constant schedules are rejected).
void amp_step(SolverState& state, const ProblemInstance& instance, const StepContext& ctx);

struct TapResidual {
    double r1 = 0.0;  // ||m - eta_v(psi)||_2 / sqrt(K)
    double r2 = 0.0;  // self-consistency gap of the inner chi fixed point
    double chi = 0.0; // converged inner chi
    double v = 0.0;
    int iterations = 0;
};

struct TapOptions {
    double tol = 1e-12;
    int max_iters = 10000;
    double damping = 0.5;
};

// Residuals of the TAP fixed-point equations at m. chi is solved from the
// self-consistency chi = avg posterior variance at psi(chi) with
// v = xi - R(chi) and psi = (h + J m - R(chi) m)/v. Both residuals vanish
// at an exact TAP solution.
TapResidual tap_residual(const ProblemInstance& instance, const Eigen::VectorXd& m,
                         const Prior& prior, const TapOptions& opts = {});

// Driver: iterates the selected path until the m-increment drops below tol
// or max_iters is hit. Divergence is captured into the trajectory's stop
// reason, not thrown.
Trajectory run(const ProblemInstance& instance, const Prior& prior, const RunOptions& opts);

} // namespace ssmamp
