// Timing comparison of the Lyapunov-Perron kernel implementations:
//   reference  - direct O(n^2) kernel evaluation, serial
//   fast/1     - prefix-recurrence kernel, single thread
//   fast/N     - prefix-recurrence kernel, OpenMP nonlinearity sweep
// The fast kernel must match the reference to ~1e-12 and itself bit-for-bit
// across thread counts; tests/test_parallel.cpp asserts both.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "rim/manifold.hpp"
#include "rim/parallel.hpp"
#include "rim/rng.hpp"

using namespace rim;

namespace {

double time_ms(int reps, const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    const int modes = argc > 1 ? std::stoi(argv[1]) : 16;
    const int nodes_pow = argc > 2 ? std::stoi(argv[2]) : 2000;

    const SpectralModel model = build_sine_model(modes, 3.0, 0.0, 4 * modes);
    NonlinearitySpec spec;
    spec.p = 2.0;
    spec.radius = 0.1;
    spec.lipschitz = 0.4;

    LpSolverConfig cfg;
    cfg.beta = 0.5 * (model.lambda_u() + model.lambda_s());
    cfg.dt = 1e-2;
    cfg.horizon = nodes_pow * cfg.dt;

    const WienerPath path = sample_wiener(7, -(cfg.horizon + 5.0), 0.0, cfg.dt);
    const OuTrajectory ou = ou_trajectory(path, 0.1, 5.0);

    TrajectorySegment traj = zero_trajectory(cfg, model);
    Rng rng(11);
    for (auto& node : traj.nodes) {
        for (int k = 0; k < model.mode_count; ++k) node[k] = 0.02 * rng.normal();
    }
    SpectralVector xi(model.mode_count);
    xi[0] = 0.04;

    std::printf("lp_apply kernel, %d modes, %ld nodes\n", modes, traj.node_count());

    const double t_ref = time_ms(1, [&] {
        (void)lp_apply_reference(traj, xi, ou, spec, model, cfg);
    });
    std::printf("  reference (serial, O(n^2))  %10.2f ms\n", t_ref);

    cfg.threads = 1;
    const double t_fast1 = time_ms(5, [&] { (void)lp_apply(traj, xi, ou, spec, model, cfg); });
    std::printf("  fast kernel, 1 thread       %10.2f ms   (x%.1f)\n", t_fast1, t_ref / t_fast1);

    cfg.threads = 0;  // hardware concurrency
    const int hw = resolve_threads(0);
    const double t_fastn = time_ms(5, [&] { (void)lp_apply(traj, xi, ou, spec, model, cfg); });
    std::printf("  fast kernel, %2d threads     %10.2f ms   (x%.1f)\n", hw, t_fastn,
                t_ref / t_fastn);
    return 0;
}
