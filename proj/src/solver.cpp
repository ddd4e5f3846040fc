#include "ssmamp/solver.hpp"

#include "ssmamp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ssmamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double clip_chi(double chi, double second_moment, double floor, bool* clipped) {
    const double ceil = 10.0 * second_moment;
    if (clipped) *clipped = false;
    if (!(chi > floor)) {
        if (clipped) *clipped = true;
        return floor;
    }
    if (chi > ceil) {
        if (clipped) *clipped = true;
        return ceil;
    }
    return chi;
}

// Advances the scalar recursions to time t = state.t: R(chi(t)), Q(t), the
// running R-products, v(t), G(t,t-1), zeta(t), sigma_x(t). Committed to the
// state only after everything validated, so a throw leaves it untouched.
void advance_scalars(SolverState& s, const EnsembleSpec& ens, const StepContext& ctx) {
    const int t = s.t;
    double g_mem = 0.0;
    if (t > 0) {
        if (!(s.chi_prev > 0.0))
            throw DivergenceError("memory coefficient: chi(t-1) <= 0");
        g_mem = (s.chi_curr / s.chi_prev) * s.r_history[static_cast<size_t>(t) - 1];
    }
    const double r_t = r_transform(ens, s.chi_curr);
    const double v_t = ctx.v_schedule.kind == VSchedule::Kind::Constant
                           ? ctx.v_schedule.value
                           : ens.xi - r_t;
    if (!(v_t > 0.0)) throw DivergenceError("v(t) <= 0 at t=" + std::to_string(t));

    std::vector<double> pi = s.pi;
    for (double& p : pi) p *= r_t;
    pi.push_back(r_t); // pi[tau] = prod_{s=tau..t} R(chi(s)) = Q(t)/Q(tau-1)

    const auto& a = *ctx.a_coeffs;
    double zeta = 0.0;
    for (int tau = 0; tau <= t; ++tau)
        zeta += a[static_cast<size_t>(t - tau)] * pi[tau] / s.chi_history[tau];

    // commit
    s.g_mem = g_mem;
    s.r_history.push_back(r_t);
    s.pi = std::move(pi);
    s.q_prev = s.q_curr;
    s.q_curr = s.q_prev * r_t;
    s.v_curr = v_t;
    s.zeta_prev = s.zeta_curr;
    s.zeta_curr = zeta;
    s.sigma_x_curr = (s.zeta_curr * ens.xi - s.zeta_prev * r_t) / v_t;
    s.scalar_t = t;
}

// Denoise the field, update chi, shift the iterates. Shared epilogue of the
// three step kernels.
void finish_step(SolverState& s, const StepContext& ctx) {
    if (!s.psi.allFinite())
        throw DivergenceError("non-finite field values at t=" + std::to_string(s.t));
    const VectorDenoiseResult den = denoise_vector(*ctx.prior, s.psi, s.v_curr);
    Eigen::VectorXd m_next = den.mean;
    if (ctx.damping > 0.0)
        m_next = (1.0 - ctx.damping) * m_next + ctx.damping * s.m_curr;
    if (!m_next.allFinite())
        throw DivergenceError("non-finite estimate at t=" + std::to_string(s.t));

    double chi_next;
    s.chi_clipped_last = false;
    if (ctx.chi_mode == ChiMode::Replica) {
        chi_next = (*ctx.chi_schedule)[static_cast<size_t>(s.t) + 1];
    } else {
        chi_next = clip_chi(den.avg_variance, ctx.prior->second_moment(), ctx.chi_floor,
                            &s.chi_clipped_last);
    }

    s.m_prev = std::move(s.m_curr);
    s.m_curr = std::move(m_next);
    s.chi_prev = s.chi_curr;
    s.chi_curr = chi_next;
    s.chi_history.push_back(chi_next);
    s.t += 1;
}

} // namespace

std::string to_string(SolverPath path) {
    switch (path) {
        case SolverPath::Generic: return "generic";
        case SolverPath::Specialized: return "specialized";
        case SolverPath::Amp: return "amp";
    }
    return "unknown";
}

SolverPath solver_path_from_string(const std::string& name) {
    if (name == "generic") return SolverPath::Generic;
    if (name == "specialized") return SolverPath::Specialized;
    if (name == "amp") return SolverPath::Amp;
    throw std::invalid_argument("unknown solver path: " + name);
}

std::string to_string(ChiMode mode) {
    return mode == ChiMode::Empirical ? "empirical" : "replica";
}

ChiMode chi_mode_from_string(const std::string& name) {
    if (name == "empirical") return ChiMode::Empirical;
    if (name == "replica") return ChiMode::Replica;
    throw std::invalid_argument("unknown chi mode: " + name);
}

std::vector<double> Trajectory::chi_seq() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.chi);
    return out;
}

std::vector<double> Trajectory::v_seq() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.v);
    return out;
}

double chi_update(const Prior& prior, const Eigen::VectorXd& psi, double v, bool* clipped,
                  double chi_floor) {
    const VectorDenoiseResult den = denoise_vector(prior, psi, v);
    return clip_chi(den.avg_variance, prior.second_moment(), chi_floor, clipped);
}

double memory_coefficient(double chi_curr, double chi_prev, const EnsembleSpec& ens, int t) {
    if (t == 0) return 0.0;
    if (!(chi_prev > 0.0))
        throw std::domain_error("memory_coefficient: chi_prev must be positive");
    return (chi_curr / chi_prev) * r_transform(ens, chi_prev);
}

SolverState init_state(const ProblemInstance& instance, const Prior& prior,
                       const RunOptions& opts) {
    SolverState s;
    const Eigen::Index k = instance.k();
    s.m_curr = opts.init_m.value_or(Eigen::VectorXd::Zero(k));
    if (s.m_curr.size() != k)
        throw std::invalid_argument("init_state: init_m has wrong length");
    s.m_prev = Eigen::VectorXd::Zero(k);
    s.z1 = Eigen::VectorXd::Zero(k);
    s.z2 = Eigen::VectorXd::Zero(k);
    s.chi_curr = opts.init_chi.value_or(prior.second_moment());
    if (!(s.chi_curr > 0.0)) throw std::invalid_argument("init_state: chi(0) must be positive");
    s.chi_prev = 0.0;
    s.chi_history = {s.chi_curr};
    s.q_curr = 1.0; // Q(-1)
    s.q_prev = 1.0;
    s.zeta_curr = 0.0; // zeta(-1)
    return s;
}

void ssm_step_general(SolverState& s, const ProblemInstance& instance, const StepContext& ctx) {
    const EnsembleSpec& ens = instance.ensemble();
    advance_scalars(s, ens, ctx);
    const int t = s.t;

    s.gamma = instance.h() + instance.apply_j(s.m_curr);
    Eigen::VectorXd numer = s.gamma;
    if (t > 0) numer -= s.g_mem * s.m_prev;
    s.u_history.push_back(std::move(numer));

    const auto& a = *ctx.a_coeffs;
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(instance.k());
    for (int tau = 0; tau <= t; ++tau) {
        const double w = a[static_cast<size_t>(t - tau)] * s.pi[tau] / s.chi_history[tau];
        if (w != 0.0) psi.noalias() += w * s.u_history[tau];
    }
    s.psi = psi / s.v_curr;
    s.psi_t = t;
    finish_step(s, ctx);
}

void ssm_step_row_orthogonal(SolverState& s, const ProblemInstance& instance,
                             const StepContext& ctx) {
    const EnsembleSpec& ens = instance.ensemble();
    if (ens.kind != EnsembleKind::RowOrthogonal)
        throw std::invalid_argument("ssm_step_row_orthogonal: ensemble is not row-orthogonal");
    const double x1 = ens.xi1(), x2 = ens.xi2();
    if (x2 == 0.0)
        throw std::invalid_argument(
            "ssm_step_row_orthogonal: alpha = 1 makes xi_2 = 0; use the generic path");
    advance_scalars(s, ens, ctx);
    const int t = s.t;
    const double r_t = s.r_history.back();

    s.gamma = instance.h() + instance.apply_j(s.m_curr);
    s.z1 = (s.gamma - x1 * s.m_curr + s.g_mem * s.z1).eval() / x1;
    s.z2 = (s.gamma - x2 * s.m_curr + s.g_mem * s.z2).eval() / x2;
    const double c_t = (ens.alpha / ens.xi) * r_t / (s.chi_curr * s.v_curr);
    s.psi = c_t * (s.z1 - s.z2);
    s.psi_t = t;
    finish_step(s, ctx);
}

void amp_step(SolverState& s, const ProblemInstance& instance, const StepContext& ctx) {
    const EnsembleSpec& ens = instance.ensemble();
    if (ens.kind != EnsembleKind::IidGaussian)
        throw std::invalid_argument("amp_step: ensemble is not iid Gaussian");
    if (ctx.v_schedule.kind != VSchedule::Kind::RTransform)
        throw std::invalid_argument("amp_step: the v(t) = xi - R(chi(t)) schedule is fixed");
    advance_scalars(s, ens, ctx);
    const int t = s.t;

    const Eigen::VectorXd resid = instance.residual_field(s.m_curr);
    s.gamma = ens.xi * (resid + s.m_curr);
    s.z1 = resid + (s.g_mem / ens.xi) * s.z1;
    s.psi = s.z1 + s.m_curr;
    s.psi_t = t;
    finish_step(s, ctx);
}

TapResidual tap_residual(const ProblemInstance& instance, const Eigen::VectorXd& m,
                         const Prior& prior, const TapOptions& opts) {
    if (!m.allFinite()) throw std::invalid_argument("tap_residual: m must be finite");
    const EnsembleSpec& ens = instance.ensemble();
    const Eigen::VectorXd base = instance.h() + instance.apply_j(m); // one J-product

    auto field_for = [&](double chi, double v) -> Eigen::VectorXd {
        return (base - r_transform(ens, chi) * m) / v;
    };
    auto avg_var = [&](double chi) {
        const double v = ens.xi - r_transform(ens, chi);
        if (!(v > 0.0)) throw std::domain_error("tap_residual: v = xi - R(chi) <= 0");
        return denoise_vector(prior, field_for(chi, v), v).avg_variance;
    };

    TapResidual out;
    double chi = prior.second_moment();
    double gap = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iters; ++it) {
        const double next = avg_var(chi);
        gap = std::abs(next - chi);
        chi = (1.0 - opts.damping) * chi + opts.damping * next;
        out.iterations = it;
        if (gap < opts.tol) break;
    }
    out.chi = chi;
    out.r2 = std::abs(avg_var(chi) - chi);
    out.v = ens.xi - r_transform(ens, chi);
    const Eigen::VectorXd psi = field_for(chi, out.v);
    const VectorDenoiseResult den = denoise_vector(prior, psi, out.v);
    out.r1 = (m - den.mean).norm() / std::sqrt(static_cast<double>(instance.k()));
    return out;
}

Trajectory run(const ProblemInstance& instance, const Prior& prior, const RunOptions& opts) {
    const EnsembleSpec& ens = instance.ensemble();
    ens.validate();
    if (opts.max_iters < 0) throw std::invalid_argument("run: max_iters must be >= 0");

    Trajectory traj;
    traj.path = opts.path;
    traj.chi_mode = opts.chi_mode;
    traj.damping = opts.damping;
    traj.tol = opts.tol;
    traj.max_iters = opts.max_iters;

    // Inverse-R coefficients up to the horizon (used for the generic field
    // sum and for zeta on every path). Custom ensembles may not have enough
    // cumulants for the full horizon; the series is then truncated and the
    // effective order recorded.
    int order = opts.max_iters + 2;
    if (ens.kind == EnsembleKind::Custom) {
        const int avail = static_cast<int>(ens.custom_cumulants.size()) - 1;
        if (avail < 1)
            throw std::invalid_argument("run: custom ensemble needs at least 2 cumulants");
        order = std::min(order, avail);
    }
    std::vector<double> a = r_inverse_coeffs(ens, order);
    a.resize(static_cast<size_t>(opts.max_iters) + 2, 0.0);
    traj.truncation = order;

    std::vector<double> chi_schedule;
    if (opts.chi_mode == ChiMode::Replica) {
        const SeTrajectory se = se_trajectory(prior, ens, opts.max_iters + 2,
                                              opts.quadrature_order);
        chi_schedule = se.chi;
    }

    StepContext ctx;
    ctx.prior = &prior;
    ctx.v_schedule = opts.v_schedule;
    ctx.damping = opts.damping;
    ctx.chi_mode = opts.chi_mode;
    ctx.chi_schedule = &chi_schedule;
    ctx.a_coeffs = &a;
    ctx.chi_floor = opts.chi_floor;

    SolverState state = init_state(instance, prior, opts);
    const double sqrt_k = std::sqrt(static_cast<double>(instance.k()));

    auto scalar_record = [&](int t, const Eigen::VectorXd& m) {
        TrajectoryRecord rec;
        rec.t = t;
        rec.mse = instance.mse(m);
        rec.chi = state.chi_history[static_cast<size_t>(t)];
        const bool have = state.scalar_t == t;
        rec.v = have ? state.v_curr : kNaN;
        rec.g_mem = have ? state.g_mem : kNaN;
        rec.zeta = have ? state.zeta_curr : kNaN;
        rec.q = have ? state.q_curr : kNaN;
        rec.sigma_x = have ? state.sigma_x_curr : kNaN;
        rec.field_mean = kNaN;
        rec.field_var = kNaN;
        rec.field_var_emp = kNaN;
        rec.tap_r1 = kNaN;
        rec.tap_r2 = kNaN;
        return rec;
    };

    auto fill_field_stats = [&](TrajectoryRecord& rec) {
        if (state.psi_t != rec.t) return;
        const auto k = static_cast<double>(state.psi.size());
        rec.field_mean = state.psi.mean();
        rec.field_var = (state.psi.array() - rec.field_mean).square().sum() / (k - 1.0);
        if (instance.x_true()) {
            const Eigen::VectorXd e = state.psi - rec.sigma_x * (*instance.x_true());
            const double em = e.mean();
            rec.field_var_emp = (e.array() - em).square().sum() / (k - 1.0);
        }
    };

    auto step_once = [&]() {
        switch (opts.path) {
            case SolverPath::Generic: ssm_step_general(state, instance, ctx); return;
            case SolverPath::Specialized: ssm_step_row_orthogonal(state, instance, ctx); return;
            case SolverPath::Amp: amp_step(state, instance, ctx); return;
        }
        throw std::logic_error("run: unreachable");
    };

    traj.stop_reason = "max_iters";
    for (int t = 0; t < opts.max_iters; ++t) {
        try {
            step_once();
        } catch (const DivergenceError& e) {
            TrajectoryRecord rec = scalar_record(t, state.m_curr);
            fill_field_stats(rec);
            rec.chi_clipped = state.chi_clipped_last;
            traj.records.push_back(std::move(rec));
            traj.iterations = t;
            traj.converged = false;
            traj.stop_reason = std::string("divergence: ") + e.what();
            traj.m_final = state.m_curr;
            return traj;
        }
        // state.t is now t+1; record t from the retained step values
        TrajectoryRecord rec = scalar_record(t, state.m_prev);
        fill_field_stats(rec);
        rec.chi_clipped = state.chi_clipped_last;
        if (opts.tap_check_every > 0 && t % opts.tap_check_every == 0) {
            const TapResidual tap = tap_residual(instance, state.m_prev, prior);
            rec.tap_r1 = tap.r1;
            rec.tap_r2 = tap.r2;
        }
        if (state.chi_clipped_last) traj.degenerate = true;
        const bool want_snapshot =
            std::find(opts.snapshot_iters.begin(), opts.snapshot_iters.end(), t) !=
            opts.snapshot_iters.end();
        if (want_snapshot) traj.psi_snapshots.emplace_back(t, state.psi);
        traj.records.push_back(std::move(rec));

        const double delta = (state.m_curr - state.m_prev).norm() / sqrt_k;
        if (delta < opts.tol) {
            traj.converged = true;
            traj.stop_reason = "tol";
            break;
        }
    }
    traj.iterations = state.t;

    // keep the field of the last executed step for post-hoc checks
    if (state.psi_t == state.t - 1 && state.psi_t >= 0) {
        const bool already =
            std::find(opts.snapshot_iters.begin(), opts.snapshot_iters.end(), state.psi_t) !=
            opts.snapshot_iters.end();
        if (!already) traj.psi_snapshots.emplace_back(state.psi_t, state.psi);
    }

    // final record: scalars for t = iterations, no field (no step executed)
    try {
        advance_scalars(state, ens, ctx);
    } catch (const std::exception&) {
        // leave NaNs; the scalar guard below handles it
    }
    TrajectoryRecord final_rec = scalar_record(state.t, state.m_curr);
    try {
        const TapResidual tap = tap_residual(instance, state.m_curr, prior);
        final_rec.tap_r1 = tap.r1;
        final_rec.tap_r2 = tap.r2;
    } catch (const std::exception&) {
        // outside the model's valid regime; leave NaN
    }
    traj.records.push_back(std::move(final_rec));
    traj.m_final = state.m_curr;
    return traj;
}

} // namespace ssmamp
