// The fast Lyapunov-Perron kernel against its serial reference, and the
// thread-count independence contract of parallel_for.

#include <vector>

#include "doctest.h"
#include "rim/manifold.hpp"
#include "rim/parallel.hpp"
#include "rim/rng.hpp"

using namespace rim;

namespace {

struct KernelFixture {
    SpectralModel model = build_sine_model(8, 3.0, 0.25, 32);
    NonlinearitySpec spec;
    LpSolverConfig cfg;
    OuTrajectory ou;
    TrajectorySegment traj;
    SpectralVector xi;

    KernelFixture() {
        spec.p = 2.0;
        spec.radius = 0.15;
        spec.lipschitz = 0.5;
        cfg.beta = 0.5 * (model.lambda_u() + model.lambda_s());
        cfg.dt = 1e-2;
        cfg.horizon = 1.5;  // short horizon keeps the O(n^2) reference cheap
        cfg.threads = 1;
        const WienerPath path = sample_wiener(404, -(cfg.horizon + 5.0), 0.0, cfg.dt);
        ou = ou_trajectory(path, 0.2, 5.0);
        traj = zero_trajectory(cfg, model);
        Rng rng(71);
        for (auto& node : traj.nodes) {
            for (int k = 0; k < model.mode_count; ++k) node[k] = 0.01 * rng.normal();
        }
        xi = SpectralVector(model.mode_count);
        xi[0] = 0.03;
    }
};

}  // namespace

TEST_CASE("fast kernel matches the direct-formula reference") {
    const KernelFixture f;
    const TrajectorySegment fast = lp_apply(f.traj, f.xi, f.ou, f.spec, f.model, f.cfg);
    const TrajectorySegment ref = lp_apply_reference(f.traj, f.xi, f.ou, f.spec, f.model, f.cfg);
    REQUIRE(fast.node_count() == ref.node_count());
    for (long i = 0; i < fast.node_count(); ++i) {
        for (int k = 0; k < f.model.mode_count; ++k) {
            const double a = fast.nodes[static_cast<std::size_t>(i)][k];
            const double b = ref.nodes[static_cast<std::size_t>(i)][k];
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("kernel output is bit-identical across thread counts") {
    KernelFixture f;
    f.cfg.threads = 1;
    const TrajectorySegment one = lp_apply(f.traj, f.xi, f.ou, f.spec, f.model, f.cfg);
    for (int threads : {2, 4, 8}) {
        f.cfg.threads = threads;
        const TrajectorySegment many = lp_apply(f.traj, f.xi, f.ou, f.spec, f.model, f.cfg);
        for (long i = 0; i < one.node_count(); ++i) {
            for (int k = 0; k < f.model.mode_count; ++k) {
                CHECK(many.nodes[static_cast<std::size_t>(i)][k] ==
                      one.nodes[static_cast<std::size_t>(i)][k]);
            }
        }
    }
}

TEST_CASE("parallel_for covers every index exactly once, any thread count") {
    for (int threads : {1, 2, 7}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
        for (int h : hits) CHECK(h == 1);
    }
    // zero-length loop is a no-op
    parallel_for(0, 4, [&](std::size_t) { CHECK(false); });
}
