#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "rim/errors.hpp"
#include "rim/rng.hpp"
#include "rim/stochastic.hpp"

using namespace rim;

TEST_CASE("wiener paths: anchoring, determinism, variance") {
    const WienerPath p = sample_wiener(42, -2.0, 3.0, 0.01);
    CHECK(p.at_index(0) == 0.0);
    CHECK(p.index_min == -200);
    CHECK(p.index_max == 300);

    const WienerPath q = sample_wiener(42, -2.0, 3.0, 0.01);
    for (long i = p.index_min; i <= p.index_max; ++i) {
        CHECK(p.at_index(i) == q.at_index(i));
    }

    CHECK_THROWS_AS(sample_wiener(1, 0.5, 1.0, 0.01), ValidationError);
    CHECK_THROWS_AS(sample_wiener(1, -1.0, 1.0, -0.1), ValidationError);

    // Var(omega(1)) = 1 over many paths; both sides of the glue point
    const int n = 10000;
    double s_fwd = 0.0, s2_fwd = 0.0, s_bwd = 0.0, s2_bwd = 0.0;
    for (int i = 0; i < n; ++i) {
        const WienerPath w = sample_wiener(derive_seed(7, 1, i), -1.0, 1.0, 0.05);
        const double a = w.at_index(20);   // omega(1)
        const double b = w.at_index(-20);  // omega(-1)
        s_fwd += a;
        s2_fwd += a * a;
        s_bwd += b;
        s2_bwd += b * b;
    }
    const double var_fwd = s2_fwd / n - (s_fwd / n) * (s_fwd / n);
    const double var_bwd = s2_bwd / n - (s_bwd / n) * (s_bwd / n);
    const double band = 5.0 * std::sqrt(2.0 / n);
    CHECK(std::abs(var_fwd - 1.0) < band);
    CHECK(std::abs(var_bwd - 1.0) < band);
    CHECK(std::abs(s_fwd / n) < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("path shift: flow property") {
    const WienerPath p = sample_wiener(9, -3.0, 3.0, 0.01);

    const WienerPath id = shift_path(p, 0.0);
    for (long i = p.index_min; i <= p.index_max; ++i) CHECK(id.at_index(i) == p.at_index(i));

    const WienerPath s1 = shift_path(p, 0.5);
    CHECK(s1.at_index(0) == 0.0);
    // shifted value at -s equals -omega(s)
    CHECK(s1.at_index(-50) == doctest::Approx(-p.at_index(50)).epsilon(1e-15));

    const WienerPath s2 = shift_path(s1, 0.25);
    const WienerPath s12 = shift_path(p, 0.75);
    for (long i = s2.index_min; i <= s2.index_max; ++i) {
        CHECK(s2.at_index(i) == doctest::Approx(s12.at_index(i)).epsilon(1e-13));
    }

    CHECK_THROWS_AS(shift_path(p, 4.0), ValidationError);    // window exhausted
    CHECK_THROWS_AS(shift_path(p, 0.005), ValidationError);  // off grid
}

TEST_CASE("OU trajectory: degenerate path, stationary variance, residual") {
    const double dt = 0.01;

    // omega = 0 gives z = 0, Z = 0 exactly
    const OuTrajectory zero = ou_trajectory(zero_path(-45.0, 1.0, dt), 0.5, 40.0);
    for (double z : zero.z_values) CHECK(z == 0.0);
    for (double Z : zero.Z_values) CHECK(Z == 0.0);

    CHECK_THROWS_AS(ou_trajectory(zero_path(-10.0, 1.0, dt), 0.5, 40.0), ValidationError);

    // stationary variance sigma^2 / 2 at sigma = 0.5: 2 Var = sigma^2
    const double sigma = 0.5;
    const int n = 10000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const WienerPath w = sample_wiener(derive_seed(11, 2, i), -40.0, 0.0, 0.02);
        const OuTrajectory ou = ou_trajectory(w, sigma, 40.0);
        const double z0 = ou.z_at_index(0);
        s += z0;
        s2 += z0 * z0;
    }
    const double var = s2 / n - (s / n) * (s / n);
    const double target = sigma * sigma / 2.0;
    const double stderr_var = target * std::sqrt(2.0 / (n - 1.0));
    CHECK(std::abs(var - target) < 3.0 * stderr_var);

    // one-step residual of dz + z dt = sigma dW in the trapezoid convention
    const WienerPath w = sample_wiener(77, -45.0, 2.0, dt);
    const OuTrajectory ou = ou_trajectory(w, sigma, 40.0);
    CHECK(sde_residual_max(ou) <= 10.0 * dt * dt);

    // Z is anchored and consistent: Z(t) + z(t) - z(0) = sigma * omega(t)
    CHECK(ou.Z_at_index(0) == 0.0);
    for (long i : {-300L, -100L, 50L, 150L}) {
        const double lhs = ou.Z_at_index(i) + ou.z_at_index(i) - ou.z_at_index(0);
        const double rhs = sigma * w.at_index(i);
        CHECK(lhs == doctest::Approx(rhs).epsilon(5e-4));
    }
}

TEST_CASE("OU stationarity under the shift flow") {
    const double dt = 0.01;
    const double sigma = 0.3;
    for (int rep = 0; rep < 5; ++rep) {
        const WienerPath w = sample_wiener(derive_seed(3, 4, rep), -50.0, 2.0, dt);
        const OuTrajectory ou = ou_trajectory(w, sigma, 40.0);
        const OuTrajectory shifted = ou_trajectory(shift_path(w, 1.0), sigma, 40.0);
        for (long i : {-400L, -100L, 0L, 100L}) {
            const double a = shifted.z_at_index(i);
            const double b = ou.z_at_index(i + 100);
            const double tol = dt * dt * (1.0 + sigma * std::abs(w.at_index(100)));
            CHECK(std::abs(a - b) <= tol);
        }
    }
}

TEST_CASE("pathwise constants") {
    const double dt = 0.01;

    // injected zero path floors K1 at 1
    const OuTrajectory ou_flat = ou_trajectory(zero_path(-45.0, 0.0, dt), 0.5, 40.0);
    CHECK(k1_estimate(ou_flat) == 1.0);
    CHECK(kpm_estimate(ou_flat) == 2.0);
    CHECK(k3_estimate(ou_flat, 1.5, 1.5, 2.0) == 0.0);

    const OuTrajectory det = deterministic_ou(-5.0, 0.0, dt);
    CHECK_THROWS_AS(k1_estimate(det), ValidationError);

    // defining inequalities hold on the grid for every sample
    for (int rep = 0; rep < 20; ++rep) {
        const WienerPath w = sample_wiener(derive_seed(5, 6, rep), -45.0, 0.0, dt);
        const double sigma = 0.4;
        const OuTrajectory ou = ou_trajectory(w, sigma, 40.0);
        const double k1 = k1_estimate(ou);
        CHECK(k1 >= 1.0);
        const double z0 = ou.z_at_index(0);
        for (long i = w.index_min; i <= 0; ++i) {
            CHECK(z0 + sigma * w.at_index(i) <= sigma * (k1 + std::abs(i * dt)) + 1e-12);
        }
        const double kpm = kpm_estimate(ou);
        CHECK(kpm >= k1);
        for (long i = w.index_min; i <= 0; ++i) {
            CHECK(std::abs(w.at_index(i)) <= kpm + std::abs(i * dt) + 1e-12);
        }

        const double lambda_u = -2.0;
        const double gamma = 2.0, delta = 2.5;
        const double k2 = k2_estimate(ou, gamma, delta, lambda_u);
        for (long i = w.index_min; i <= 0; ++i) {
            const double tau = i * dt;
            const double num = std::abs(1.0 - std::exp(-lambda_u * tau + sigma * w.at_index(i)));
            CHECK(num <= k2 * gamma * std::exp(delta * std::abs(tau)) * (1.0 + 1e-12));
        }

        const double k3 = k3_estimate(ou, 1.0, 1.0, 2.0);
        for (long i = w.index_min; i <= 0; ++i) {
            const double r = i * dt;
            const double num = std::abs(1.0 - std::exp(sigma * w.at_index(i)));
            CHECK(num <= k3 * std::exp(std::abs(r)) * (1.0 + 1e-12));
        }
    }

    // parameter validation
    const WienerPath w = sample_wiener(1, -45.0, 0.0, dt);
    const OuTrajectory ou = ou_trajectory(w, 0.4, 40.0);
    CHECK_THROWS_AS(k2_estimate(ou, 1.0, 2.5, -2.0), ValidationError);  // gamma < -lambda_u
    CHECK_THROWS_AS(k2_estimate(ou, 2.0, 2.0, -2.0), ValidationError);  // delta too small
    CHECK_THROWS_AS(k3_estimate(ou, 0.3, 1.0, 2.0), ValidationError);   // gamma1 <= sigma
    CHECK_THROWS_AS(k3_estimate(ou, 1.0, 0.4, 2.0), ValidationError);   // delta1 <= sigma
}

TEST_CASE("K2 maximization against a dense 1-d oracle on the zero path") {
    // omega = 0: K2 = sup_{tau<=0} |1 - e^{-lambda_u tau}| / (gamma e^{delta |tau|})
    const double lambda_u = -2.0, gamma = 2.0, delta = 2.5;
    double oracle_sup = 0.0;
    for (int i = 0; i <= 2000000; ++i) {
        const double tau = -i * 1e-4;
        const double val =
            std::abs(1.0 - std::exp(-lambda_u * tau)) / (gamma * std::exp(delta * std::abs(tau)));
        oracle_sup = std::max(oracle_sup, val);
    }
    // sigma = 0.4 keeps the parameter window delta > -lambda_u + sigma open;
    // the K2 value itself does not depend on sigma for the zero path
    const OuTrajectory flat = ou_trajectory(zero_path(-45.0, 0.0, 0.01), 0.4, 40.0);
    const double k2 = k2_estimate(flat, gamma, delta, lambda_u);
    CHECK(k2 == doctest::Approx(oracle_sup).epsilon(1e-4));
    CHECK(k2 <= 0.5);
}

TEST_CASE("K1 - 1 mean: loose law diagnostic") {
    const int n = 4000;
    double acc = 0.0, acc_pm = 0.0;
    for (int i = 0; i < n; ++i) {
        const WienerPath w = sample_wiener(derive_seed(21, 8, i), -60.0, 0.0, 0.02);
        const OuTrajectory ou = ou_trajectory(w, 0.5, 40.0);
        acc += k1_estimate(ou) - 1.0;
        acc_pm += kpm_estimate(ou);
    }
    // Diagnostic only (not asserted against Exp(1)): the minimal certifying
    // constant with floor sits mostly at the floor, so the mean excess is far
    // below the Exp(1) mean. Pin the observed regime so silent regressions in
    // the sup/floor bookkeeping still trip something.
    const double mean = acc / n;
    CHECK(mean > 0.005);
    CHECK(mean < 0.5);
    CHECK(acc_pm / n > 2.0);
    CHECK(acc_pm / n < 2.5);
}

TEST_CASE("OU CSV round trip at 17 significant digits") {
    const WienerPath w = sample_wiener(33, -42.0, 1.0, 0.01);
    const OuTrajectory ou = ou_trajectory(w, 0.25, 40.0);
    const std::string path =
        (std::filesystem::temp_directory_path() / "rim_ou_fixture.csv").string();
    dump_ou_csv(ou, path);
    const OuTrajectory back = load_ou_csv(path);
    CHECK(back.index_min == ou.index_min);
    CHECK(back.index_max == ou.index_max);
    for (long i = ou.index_min; i <= ou.index_max; ++i) {
        CHECK(back.z_at_index(i) == ou.z_at_index(i));
        CHECK(back.Z_at_index(i) == ou.Z_at_index(i));
        CHECK(back.path.at_index(i) == ou.path.at_index(i));
    }
    std::filesystem::remove(path);
}
