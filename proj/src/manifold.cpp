#include "rim/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rim/errors.hpp"
#include "rim/parallel.hpp"

namespace rim {

namespace {

void check_grids(const TrajectorySegment& traj, const OuTrajectory& ou) {
    if (traj.dt != ou.dt) throw ValidationError("trajectory and OU grids use different dt");
    if (traj.index_min < ou.index_min || ou.index_max < 0) {
        throw ValidationError("OU window does not cover the trajectory horizon");
    }
    if (traj.index_min + traj.node_count() - 1 != 0) {
        throw ValidationError("trajectory must end at t = 0");
    }
}

void check_unstable_support(const SpectralVector& xi, const SpectralModel& model) {
    for (int k = model.split_index; k < model.mode_count; ++k) {
        if (xi[k] != 0.0) {
            throw ValidationError("xi must be supported on the unstable block");
        }
    }
}

// e^{-z(r)} F^{(R)}(e^{z(r)} v(r)) for every node, the data-parallel sweep.
std::vector<SpectralVector> nonlinearity_sweep(const TrajectorySegment& traj,
                                               const OuTrajectory& ou,
                                               const NonlinearitySpec& spec,
                                               const SpectralModel& model, int threads,
                                               bool truncated) {
    const long n_nodes = traj.node_count();
    std::vector<SpectralVector> out(static_cast<std::size_t>(n_nodes));
    parallel_for(static_cast<std::size_t>(n_nodes), threads, [&](std::size_t i) {
        const long idx = traj.index_min + static_cast<long>(i);
        const double z = ou.z_at_index(idx);
        const double up = std::exp(z);
        const SpectralVector scaled = vec_scale(traj.nodes[i], up);
        const SpectralVector f = truncated ? truncated_f(scaled, spec, model)
                                           : power_f(scaled, spec, model);
        out[i] = vec_scale(f, 1.0 / up);
    });
    return out;
}

// Stable-block prefix integrals S_k(i) = int_{-T}^{t_i} K_k(t_i, r) G_k(r) dr
// evaluated for all nodes via the one-step recurrence
//   S_k(i) = kappa * S_k(i-1) + dt/2 * (kappa * G_k(i-1) + G_k(i)),
//   kappa = e^{-lambda_k dt + Z_i - Z_{i-1}}.
void accumulate_stable(const std::vector<SpectralVector>& g, const OuTrajectory& ou,
                       const SpectralModel& model, long index_min, double dt,
                       std::vector<SpectralVector>& out) {
    const long n_nodes = static_cast<long>(g.size());
    for (int k = model.split_index; k < model.mode_count; ++k) {
        const double lam = model.eigenvalues[k];
        double s = 0.0;
        out[0][k] = 0.0;
        for (long i = 1; i < n_nodes; ++i) {
            const long idx = index_min + i;
            const double dz = ou.Z_at_index(idx) - ou.Z_at_index(idx - 1);
            const double kappa = std::exp(-lam * dt + dz);
            s = kappa * s + 0.5 * dt * (kappa * g[i - 1][k] + g[i][k]);
            out[i][k] = s;
        }
    }
}

// Unstable-block suffix integrals A_k(i) = int_0^{t_i} K_k(t_i, r) G_k(r) dr,
// swept downward from t = 0 with kappa = e^{lambda_k dt + Z_{i} - Z_{i+1}}.
void accumulate_unstable(const std::vector<SpectralVector>& g, const OuTrajectory& ou,
                         const SpectralModel& model, long index_min, double dt,
                         std::vector<SpectralVector>& out) {
    const long n_nodes = static_cast<long>(g.size());
    for (int k = 0; k < model.split_index; ++k) {
        const double lam = model.eigenvalues[k];
        double a = 0.0;
        for (long i = n_nodes - 2; i >= 0; --i) {
            const long idx = index_min + i;
            const double dz = ou.Z_at_index(idx) - ou.Z_at_index(idx + 1);
            const double kappa = std::exp(lam * dt + dz);
            a = kappa * a - 0.5 * dt * (g[i][k] + kappa * g[i + 1][k]);
            out[i][k] += a;
        }
    }
}

void add_semigroup_data(const SpectralVector& xi, const OuTrajectory& ou,
                        const SpectralModel& model, long index_min, double dt,
                        std::vector<SpectralVector>& out) {
    const long n_nodes = static_cast<long>(out.size());
    for (long i = 0; i < n_nodes; ++i) {
        const long idx = index_min + i;
        const double t = idx * dt;
        const double zi = ou.Z_at_index(idx);
        for (int k = 0; k < model.split_index; ++k) {
            out[i][k] += std::exp(-model.eigenvalues[k] * t + zi) * xi[k];
        }
    }
}

double tail_bound_at_zero(double l_f, double v_norm, double lambda_s, double beta,
                          double horizon) {
    // dropped stable mass int_{-inf}^{-T}, measured in the weighted norm at t = 0
    const double gap = lambda_s - beta;
    return l_f * v_norm * std::exp(-gap * horizon) / gap;
}

}  // namespace

TrajectorySegment zero_trajectory(const LpSolverConfig& cfg, const SpectralModel& model) {
    TrajectorySegment traj;
    traj.dt = cfg.dt;
    const long n = grid_index(cfg.horizon, cfg.dt);
    if (n <= 0) throw ValidationError("horizon must be a positive multiple of dt");
    traj.index_min = -n;
    traj.nodes.assign(static_cast<std::size_t>(n + 1), SpectralVector(model.mode_count));
    return traj;
}

double cbeta_norm(const TrajectorySegment& traj, double beta, const OuTrajectory& ou,
                  const SpectralModel& model) {
    check_grids(traj, ou);
    double sup = 0.0;
    for (long i = 0; i < traj.node_count(); ++i) {
        const long idx = traj.index_min + i;
        const double w = std::exp(beta * idx * traj.dt - ou.Z_at_index(idx));
        sup = std::max(sup, w * alpha_norm(traj.nodes[i], model));
    }
    return sup;
}

TrajectorySegment lp_apply(const TrajectorySegment& traj, const SpectralVector& xi,
                           const OuTrajectory& ou, const NonlinearitySpec& spec,
                           const SpectralModel& model, const LpSolverConfig& cfg) {
    check_grids(traj, ou);
    check_unstable_support(xi, model);

    const auto g = nonlinearity_sweep(traj, ou, spec, model, cfg.threads, true);

    TrajectorySegment out;
    out.dt = traj.dt;
    out.index_min = traj.index_min;
    out.nodes.assign(traj.nodes.size(), SpectralVector(model.mode_count));

    accumulate_stable(g, ou, model, traj.index_min, traj.dt, out.nodes);
    accumulate_unstable(g, ou, model, traj.index_min, traj.dt, out.nodes);
    add_semigroup_data(xi, ou, model, traj.index_min, traj.dt, out.nodes);
    return out;
}

TrajectorySegment lp_apply_reference(const TrajectorySegment& traj, const SpectralVector& xi,
                                     const OuTrajectory& ou, const NonlinearitySpec& spec,
                                     const SpectralModel& model, const LpSolverConfig& cfg) {
    check_grids(traj, ou);
    check_unstable_support(xi, model);
    (void)cfg;

    const long n_nodes = traj.node_count();
    std::vector<SpectralVector> g(static_cast<std::size_t>(n_nodes));
    for (long i = 0; i < n_nodes; ++i) {
        const long idx = traj.index_min + i;
        const double z = ou.z_at_index(idx);
        g[i] = vec_scale(truncated_f(vec_scale(traj.nodes[i], std::exp(z)), spec, model),
                         std::exp(-z));
    }

    TrajectorySegment out;
    out.dt = traj.dt;
    out.index_min = traj.index_min;
    out.nodes.assign(traj.nodes.size(), SpectralVector(model.mode_count));

    const double dt = traj.dt;
    for (long i = 0; i < n_nodes; ++i) {
        const long idx = traj.index_min + i;
        const double t = idx * dt;
        const double zi = ou.Z_at_index(idx);
        for (int k = 0; k < model.mode_count; ++k) {
            const double lam = model.eigenvalues[k];
            double acc = 0.0;
            if (k < model.split_index) {
                // - trapezoid over [t_i, 0] (the integral runs backward)
                for (long j = i; j < n_nodes; ++j) {
                    const long jdx = traj.index_min + j;
                    const double r = jdx * dt;
                    double w = (j == i || j == n_nodes - 1) ? 0.5 * dt : dt;
                    if (i == n_nodes - 1) w = 0.0;  // zero-length integral at t = 0
                    acc -= w * std::exp(-lam * (t - r) + zi - ou.Z_at_index(jdx)) * g[j][k];
                }
                acc += std::exp(-lam * t + zi) * xi[k];
            } else {
                for (long j = 0; j <= i; ++j) {
                    const long jdx = traj.index_min + j;
                    const double r = jdx * dt;
                    double w = (j == 0 || j == i) ? 0.5 * dt : dt;
                    if (i == 0) w = 0.0;  // zero-length integral at t = -T
                    acc += w * std::exp(-lam * (t - r) + zi - ou.Z_at_index(jdx)) * g[j][k];
                }
            }
            out.nodes[i][k] = acc;
        }
    }
    return out;
}

SolveResult solve_graph(const SpectralVector& xi, const OuTrajectory& ou,
                        const NonlinearitySpec& spec, const SpectralModel& model,
                        const LpSolverConfig& cfg) {
    check_unstable_support(xi, model);
    const double sc =
        sc_constant(1.0, spec.lipschitz, model.alpha, cfg.beta, model.lambda_u(), model.lambda_s());
    if (sc >= 1.0) {
        throw SolveError("contraction not certified: SC = " + std::to_string(sc) + " >= 1");
    }
    const double xi_norm = alpha_norm(xi, model);
    if (xi_norm > cfg.chart_radius_factor * spec.radius * (1.0 + 1e-12)) {
        throw SolveError("xi outside the chart radius: |xi|_alpha = " + std::to_string(xi_norm) +
                         " > " + std::to_string(cfg.chart_radius_factor * spec.radius));
    }

    SolveResult res;
    res.trajectory = zero_trajectory(cfg, model);
    check_grids(res.trajectory, ou);

    FixedPointReport rep;
    rep.sc_value = sc;

    double prev_inc = 0.0;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        TrajectorySegment next = lp_apply(res.trajectory, xi, ou, spec, model, cfg);
        TrajectorySegment diff = next;
        for (long i = 0; i < diff.node_count(); ++i) {
            diff.nodes[i] = vec_sub(next.nodes[i], res.trajectory.nodes[i]);
        }
        const double inc = cbeta_norm(diff, cfg.beta, ou, model);
        if (!std::isfinite(inc)) throw SolveError("non-finite Picard increment");
        if (it == 1) rep.first_increment = inc;
        const double ratio_floor = 1e-12 * (1.0 + cbeta_norm(next, cfg.beta, ou, model));
        if (it >= 2 && prev_inc > ratio_floor) {
            rep.observed_contraction = std::max(rep.observed_contraction, inc / prev_inc);
        }
        prev_inc = inc;
        res.trajectory = std::move(next);
        rep.iterations = it;
        rep.final_residual = inc;
        if (inc < cfg.tolerance) {
            rep.converged = true;
            break;
        }
    }
    if (!rep.converged) {
        throw SolveError("Picard iteration did not reach tolerance within " +
                         std::to_string(cfg.max_iterations) + " iterations");
    }

    double max_ratio = 0.0;
    for (long i = 0; i < res.trajectory.node_count(); ++i) {
        const long idx = res.trajectory.index_min + i;
        const double scaled =
            std::exp(ou.z_at_index(idx)) * alpha_norm(res.trajectory.nodes[i], model);
        max_ratio = std::max(max_ratio, scaled / spec.radius);
    }
    rep.max_ball_ratio = max_ratio;
    rep.cutoff_active = max_ratio > 1.0;
    rep.truncation_tail_bound =
        tail_bound_at_zero(spec.lipschitz, cbeta_norm(res.trajectory, cfg.beta, ou, model),
                           model.lambda_s(), cfg.beta, cfg.horizon);

    res.point.xi = xi;
    res.point.h_value = project(res.trajectory.nodes.back(), Block::stable, model);
    res.point.frame = ou.sigma == 0.0 ? Frame::deterministic : Frame::random;
    res.report = rep;
    return res;
}

namespace {

// int_{-T}^0 e^{lambda_k r - Z(r)} G_k(r) dr on the stable block, the shared
// tail integral of the ladder maps, via the same stable recurrence.
SpectralVector stable_integral_at_zero(const std::vector<SpectralVector>& g,
                                       const OuTrajectory& ou, const SpectralModel& model,
                                       long index_min, double dt) {
    std::vector<SpectralVector> acc(g.size(), SpectralVector(model.mode_count));
    accumulate_stable(g, ou, model, index_min, dt, acc);
    SpectralVector out(model.mode_count);
    for (int k = model.split_index; k < model.mode_count; ++k) out[k] = acc.back()[k];
    return out;
}

TrajectorySegment semigroup_orbit(const SpectralVector& xi, const OuTrajectory& ou,
                                  const SpectralModel& model, const LpSolverConfig& cfg) {
    TrajectorySegment traj = zero_trajectory(cfg, model);
    for (long i = 0; i < traj.node_count(); ++i) {
        const long idx = traj.index_min + i;
        const double t = idx * traj.dt;
        const double zi = ou.Z_at_index(idx);
        for (int k = 0; k < model.split_index; ++k) {
            traj.nodes[i][k] = std::exp(-model.eigenvalues[k] * t + zi) * xi[k];
        }
    }
    return traj;
}

}  // namespace

SpectralVector hbar1(const TrajectorySegment& v_star, const OuTrajectory& ou,
                     const NonlinearitySpec& spec, const SpectralModel& model,
                     const LpSolverConfig& cfg) {
    check_grids(v_star, ou);
    TrajectorySegment vu = v_star;
    for (auto& node : vu.nodes) node = project(node, Block::unstable, model);
    const auto g = nonlinearity_sweep(vu, ou, spec, model, cfg.threads, true);
    return stable_integral_at_zero(g, ou, model, vu.index_min, vu.dt);
}

SpectralVector hbar2(const SpectralVector& xi, const OuTrajectory& ou,
                     const NonlinearitySpec& spec, const SpectralModel& model,
                     const LpSolverConfig& cfg) {
    check_unstable_support(xi, model);
    const TrajectorySegment orbit = semigroup_orbit(xi, ou, model, cfg);
    const auto g = nonlinearity_sweep(orbit, ou, spec, model, cfg.threads, true);
    return stable_integral_at_zero(g, ou, model, orbit.index_min, orbit.dt);
}

SpectralVector hbar3(const SpectralVector& xi, const OuTrajectory& ou,
                     const NonlinearitySpec& spec, const SpectralModel& model,
                     const LpSolverConfig& cfg) {
    check_unstable_support(xi, model);
    const TrajectorySegment orbit = semigroup_orbit(xi, ou, model, cfg);
    const auto g = nonlinearity_sweep(orbit, ou, spec, model, cfg.threads, false);
    return stable_integral_at_zero(g, ou, model, orbit.index_min, orbit.dt);
}

bool closed_form_available(const SpectralModel& model) { return model.split_index == 1; }

SpectralVector closed_form_shape(const SpectralVector& xi, double p, const SpectralModel& model) {
    check_unstable_support(xi, model);
    if (!closed_form_available(model)) {
        throw ValidationError("resolvent form needs a single unstable mode; "
                              "use the quadrature route for split_index > 1");
    }
    NonlinearitySpec raw;
    raw.p = p;
    raw.signed_power = false;
    raw.radius = 1.0;
    const SpectralVector xs = project(power_f(xi, raw, model), Block::stable, model);
    return shifted_stable_resolvent(xs, -p * model.lambda_u(), model);
}

SpectralVector closed_form_shape_quadrature(const SpectralVector& xi, double p,
                                            const SpectralModel& model, double step,
                                            double horizon) {
    check_unstable_support(xi, model);
    for (int k = model.split_index; k < model.mode_count; ++k) {
        if (model.eigenvalues[k] - p * model.lambda_u() == 0.0) {
            throw ValidationError("resonant stable mode k = " + std::to_string(k + 1));
        }
    }
    NonlinearitySpec raw;
    raw.p = p;
    raw.signed_power = false;
    raw.radius = 1.0;

    long m = static_cast<long>(std::ceil(horizon / step - 1e-9));
    if (m % 2 == 1) ++m;  // Simpson needs an even cell count
    const double h = horizon / static_cast<double>(m);

    SpectralVector acc(model.mode_count);
    for (long j = 0; j <= m; ++j) {
        const double r = -horizon + j * h;
        double w = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        w *= h / 3.0;
        const SpectralVector orbit = semigroup_apply(xi, r, Block::unstable, model);
        const SpectralVector f = project(power_f(orbit, raw, model), Block::stable, model);
        for (int k = model.split_index; k < model.mode_count; ++k) {
            acc[k] += w * std::exp(model.eigenvalues[k] * r) * f[k];
        }
    }
    return acc;
}

SpectralVector transform_T(const SpectralVector& x, double z0) {
    return vec_scale(x, std::exp(-z0));
}

SpectralVector transform_T_inv(const SpectralVector& x, double z0) {
    return vec_scale(x, std::exp(z0));
}

SolveResult random_graph_point(const SpectralVector& xi, const OuTrajectory& ou,
                               const NonlinearitySpec& spec, const SpectralModel& model,
                               const LpSolverConfig& cfg) {
    const double z0 = ou.z_at_index(0);
    SolveResult res = solve_graph(transform_T(xi, z0), ou, spec, model, cfg);
    res.point.xi = xi;
    res.point.h_value = transform_T_inv(res.point.h_value, z0);
    res.point.frame = Frame::random_original;
    return res;
}

SolveResult deterministic_graph(const SpectralVector& xi, const NonlinearitySpec& spec,
                                const SpectralModel& model, const LpSolverConfig& cfg) {
    const OuTrajectory ou = deterministic_ou(-cfg.horizon, 0.0, cfg.dt);
    SolveResult res = solve_graph(xi, ou, spec, model, cfg);
    res.point.frame = Frame::deterministic;
    return res;
}

SpectralVector flow_truncated(const SpectralVector& x0, const OuTrajectory& ou,
                              const NonlinearitySpec& spec, const SpectralModel& model,
                              double t_start, double delta_t, double dt_flow) {
    const long i0 = grid_index(t_start, ou.dt);
    const long m = grid_index(dt_flow, ou.dt);
    if (m <= 0) throw ValidationError("dt_flow must be a positive grid multiple");
    const long total = grid_index(delta_t, ou.dt);
    if (total % m != 0) throw ValidationError("delta_t must be a multiple of dt_flow");
    const long steps = total / m;
    if (i0 + total > ou.index_max) throw ValidationError("OU window too short for the flow");

    const double delta = m * ou.dt;
    SpectralVector v = x0;
    for (long s = 0; s < steps; ++s) {
        const long idx = i0 + s * m;
        const double z = ou.z_at_index(idx);
        const double dz = ou.Z_at_index(idx + m) - ou.Z_at_index(idx);
        const SpectralVector nl =
            vec_scale(truncated_f(vec_scale(v, std::exp(z)), spec, model), std::exp(-z));
        for (int k = 0; k < model.mode_count; ++k) {
            const double a = -model.eigenvalues[k] * delta + dz;
            const double phi1 = std::abs(a) < 1e-12 ? 1.0 : std::expm1(a) / a;
            v[k] = std::exp(a) * v[k] + delta * phi1 * nl[k];
        }
    }
    return v;
}

}  // namespace rim
