#pragma once

#include "rim/nonlinear.hpp"
#include "rim/spectral.hpp"
#include "rim/stochastic.hpp"

namespace rim {

// Backward-in-time trajectory on the shared grid: node i holds v(t) at
// t = (index_min + i) * dt, ending at t = 0.
struct TrajectorySegment {
    double dt = 0.0;
    long index_min = 0;  // -n for n steps
    std::vector<SpectralVector> nodes;

    long node_count() const { return static_cast<long>(nodes.size()); }
    double time_of(long i) const { return (index_min + i) * dt; }
};

struct LpSolverConfig {
    double beta = 0.0;        // in (lambda_u, lambda_s)
    double horizon = 0.0;     // T > 0, multiple of dt
    double dt = 1e-2;
    int max_iterations = 200;
    double tolerance = 1e-10;            // fixed-point residual in the weighted norm
    double target_sc = 0.5;              // used when resolving the truncation radius
    double chart_radius_factor = 0.5;    // accepted |xi|_alpha as a fraction of R
    int threads = 1;
};

enum class Frame { random, random_original, deterministic };

struct ManifoldPoint {
    SpectralVector xi;       // unstable support
    SpectralVector h_value;  // stable support
    Frame frame = Frame::random;
};

struct FixedPointReport {
    int iterations = 0;
    double observed_contraction = 0.0;  // max ratio of successive increment norms
    double final_residual = 0.0;
    double sc_value = 0.0;
    double truncation_tail_bound = 0.0;
    double first_increment = 0.0;  // ||v^1 - v^0|| in the weighted norm
    bool converged = false;
    bool cutoff_active = false;   // cut-off left its plateau along the solution
    double max_ball_ratio = 0.0;  // max_t |e^z v|_alpha / R
};

struct SolveResult {
    TrajectorySegment trajectory;
    ManifoldPoint point;
    FixedPointReport report;
};

TrajectorySegment zero_trajectory(const LpSolverConfig& cfg, const SpectralModel& model);

// sup over nodes of e^{beta t - Z(t)} |v(t)|_alpha
double cbeta_norm(const TrajectorySegment& traj, double beta, const OuTrajectory& ou,
                  const SpectralModel& model);

// One application of the Lyapunov-Perron operator
//   J(v, xi)(t) = e^{-L_u t + Z(t)} xi
//               + int_0^t   e^{-L_u(t-r) + Z(t)-Z(r)} e^{-z(r)} F_u^{(R)}(e^{z(r)} v(r)) dr
//               + int_{-T}^t e^{-L_s(t-r) + Z(t)-Z(r)} e^{-z(r)} F_s^{(R)}(e^{z(r)} v(r)) dr
// by composite trapezoid on the shared grid. The per-mode prefix recurrences
// keep every step factor of order exp(O(dt)), so stiff stable modes never
// overflow. The nonlinearity sweep across nodes runs in parallel.
TrajectorySegment lp_apply(const TrajectorySegment& traj, const SpectralVector& xi,
                           const OuTrajectory& ou, const NonlinearitySpec& spec,
                           const SpectralModel& model, const LpSolverConfig& cfg);

// Direct-formula serial reference for lp_apply: evaluates every kernel term
// e^{-lambda_k (t_i - r_j) + Z_i - Z_j} explicitly, O(n^2) in the node count.
// Kept for testing the fast kernel and as the benchmark baseline.
TrajectorySegment lp_apply_reference(const TrajectorySegment& traj, const SpectralVector& xi,
                                     const OuTrajectory& ou, const NonlinearitySpec& spec,
                                     const SpectralModel& model, const LpSolverConfig& cfg);

// Picard iteration of lp_apply from v = 0 until the increment norm falls
// under cfg.tolerance. Requires SC < 1 for the given spec. The graph value is
// h(omega, xi) = P_s v*(0).
SolveResult solve_graph(const SpectralVector& xi, const OuTrajectory& ou,
                        const NonlinearitySpec& spec, const SpectralModel& model,
                        const LpSolverConfig& cfg);

// Ladder of approximations to h, all evaluated at t = 0 over [-T, 0]:
//   hbar1: stable integral with v replaced by its unstable projection
//   hbar2: v replaced by the pure semigroup orbit e^{-L_u r + Z(r)} xi
//   hbar3: same orbit with the untruncated nonlinearity
SpectralVector hbar1(const TrajectorySegment& v_star, const OuTrajectory& ou,
                     const NonlinearitySpec& spec, const SpectralModel& model,
                     const LpSolverConfig& cfg);
SpectralVector hbar2(const SpectralVector& xi, const OuTrajectory& ou,
                     const NonlinearitySpec& spec, const SpectralModel& model,
                     const LpSolverConfig& cfg);
SpectralVector hbar3(const SpectralVector& xi, const OuTrajectory& ou,
                     const NonlinearitySpec& spec, const SpectralModel& model,
                     const LpSolverConfig& cfg);

// Leading-order shape (L_s - p L_u)^{-1} P_s(xi^p). For a single unstable mode
// L_u acts as the scalar lambda_u and the resolvent form applies; otherwise
// only the quadrature form below is meaningful.
SpectralVector closed_form_shape(const SpectralVector& xi, double p, const SpectralModel& model);

// Independent route: int_{-T_q}^0 e^{L_s r} P_s[(e^{-L_u r} xi)^p] dr by
// composite Simpson. Valid for any split index.
SpectralVector closed_form_shape_quadrature(const SpectralVector& xi, double p,
                                            const SpectralModel& model, double step,
                                            double horizon);

// whether the scalar resolvent fast path applies
bool closed_form_available(const SpectralModel& model);

SpectralVector transform_T(const SpectralVector& x, double z0);      // x e^{-z0}
SpectralVector transform_T_inv(const SpectralVector& x, double z0);  // x e^{z0}

// Graph point in the original coordinates: xi + e^{z(0)} h(omega, e^{-z(0)} xi).
SolveResult random_graph_point(const SpectralVector& xi, const OuTrajectory& ou,
                               const NonlinearitySpec& spec, const SpectralModel& model,
                               const LpSolverConfig& cfg);

// sigma = 0 branch: identical code path over an injected zero noise sample.
SolveResult deterministic_graph(const SpectralVector& xi, const NonlinearitySpec& spec,
                                const SpectralModel& model, const LpSolverConfig& cfg);

// Exponential-Euler flow of dv/dt = -Lv + z v + e^{-z} F^(R)(e^z v) from the
// grid time t_start over delta_t: linear part exact per mode (including the
// pathwise integral of z), nonlinearity frozen per step. dt_flow and delta_t
// must be grid multiples.
SpectralVector flow_truncated(const SpectralVector& x0, const OuTrajectory& ou,
                              const NonlinearitySpec& spec, const SpectralModel& model,
                              double t_start, double delta_t, double dt_flow);

}  // namespace rim
