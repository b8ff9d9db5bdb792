#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rim/errors.hpp"
#include "rim/rng.hpp"
#include "rim/spectral.hpp"

using namespace rim;

namespace {
SpectralModel remark_model() { return build_sine_model(8, 3.0, 0.0, 32); }

SpectralVector random_vector(Rng& rng, int n) {
    SpectralVector v(n);
    for (int k = 0; k < n; ++k) v[k] = rng.normal();
    return v;
}
}  // namespace

TEST_CASE("sine model: eigenvalues and splitting") {
    const SpectralModel m = remark_model();
    const double expected[] = {-2, 1, 6, 13, 22, 33, 46, 61};
    for (int k = 0; k < 8; ++k) CHECK(m.eigenvalues[k] == expected[k]);
    CHECK(m.split_index == 1);
    CHECK(m.lambda_u() == -2.0);
    CHECK(m.lambda_s() == 1.0);
    CHECK(m.shift_a == 3.0);  // smallest a with lambda_1 + a >= 1

    const SpectralModel deeper = build_sine_model(8, 5.0, 0.0, 32);
    CHECK(deeper.split_index == 2);
    CHECK(deeper.lambda_u() == -1.0);
    CHECK(deeper.lambda_s() == 4.0);

    CHECK_THROWS_AS(build_sine_model(4, 0.0, 0.0, 16), ValidationError);   // no unstable mode
    CHECK_THROWS_AS(build_sine_model(2, 100.0, 0.0, 8), ValidationError);  // no stable mode
    CHECK_THROWS_AS(build_sine_model(8, 3.0, 1.0, 32), ValidationError);   // alpha out of range
    CHECK_THROWS_AS(build_sine_model(8, 3.0, 0.0, 10), ValidationError);   // grid too small
}

TEST_CASE("projections: coordinate splitting and algebra") {
    const SpectralModel m = remark_model();
    SpectralVector v(8);
    for (int k = 0; k < 8; ++k) v[k] = k + 1.0;

    const SpectralVector u = project(v, Block::unstable, m);
    const SpectralVector s = project(v, Block::stable, m);
    CHECK(u[0] == 1.0);
    for (int k = 1; k < 8; ++k) CHECK(u[k] == 0.0);
    CHECK(s[0] == 0.0);
    for (int k = 1; k < 8; ++k) CHECK(s[k] == v[k]);

    // exact algebra on random vectors
    Rng rng(123);
    for (int rep = 0; rep < 20; ++rep) {
        const SpectralVector w = random_vector(rng, 8);
        const SpectralVector pu = project(w, Block::unstable, m);
        const SpectralVector ps = project(w, Block::stable, m);
        for (int k = 0; k < 8; ++k) {
            CHECK(pu[k] + ps[k] == w[k]);
            CHECK(project(pu, Block::unstable, m)[k] == pu[k]);
            CHECK(project(ps, Block::stable, m)[k] == ps[k]);
            CHECK(project(ps, Block::unstable, m)[k] == 0.0);
        }
    }
}

TEST_CASE("semigroup: directions, decay bound, composition") {
    const SpectralModel m = remark_model();
    SpectralVector e1(8), e2(8);
    e1[0] = 1.0;
    e2[1] = 1.0;

    const SpectralVector back = semigroup_apply(e1, -1.0, Block::unstable, m);
    CHECK(back[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

    SpectralVector v(8);
    for (int k = 0; k < 8; ++k) v[k] = 0.3 * (k + 1);
    const SpectralVector same = semigroup_apply(v, 0.0, Block::full, m);
    for (int k = 0; k < 8; ++k) CHECK(same[k] == v[k]);

    const SpectralVector fwd = semigroup_apply(e2, 2.0, Block::stable, m);
    CHECK(fwd[1] == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(alpha_norm(fwd, m) <= std::exp(-m.lambda_s() * 2.0) * alpha_norm(e2, m) + 1e-15);

    CHECK_THROWS_AS(semigroup_apply(e2, -0.5, Block::stable, m), ValidationError);
    CHECK_THROWS_AS(semigroup_apply(e1, 0.5, Block::unstable, m), ValidationError);

    // norm bounds with M = 1 and the semigroup property on random samples
    Rng rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        const SpectralVector w = random_vector(rng, 8);
        const SpectralVector ws = project(w, Block::stable, m);
        const SpectralVector wu = project(w, Block::unstable, m);
        const double t = 0.1 + 2.0 * rng.uniform();
        CHECK(alpha_norm(semigroup_apply(ws, t, Block::stable, m), m) <=
              std::exp(-m.lambda_s() * t) * alpha_norm(ws, m) * (1.0 + 1e-13));
        CHECK(alpha_norm(semigroup_apply(wu, -t, Block::unstable, m), m) <=
              std::exp(m.lambda_u() * t) * alpha_norm(wu, m) * (1.0 + 1e-13));

        const SpectralVector two_steps =
            semigroup_apply(semigroup_apply(ws, t, Block::stable, m), 0.5 * t, Block::stable, m);
        const SpectralVector one_step = semigroup_apply(ws, 1.5 * t, Block::stable, m);
        for (int k = 1; k < 8; ++k) {
            CHECK(two_steps[k] == doctest::Approx(one_step[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("grid transforms: synthesis, round trip, Parseval") {
    const SpectralModel m = remark_model();
    SpectralVector e1(8);
    e1[0] = 1.0;

    const GridField f = to_grid(e1, m);
    const double norm = std::sqrt(2.0 / oracle::kPi);
    for (int j = 0; j < m.grid_size; ++j) {
        const double x = (j + 1) * oracle::kPi / (m.grid_size + 1);
        CHECK(f.values[j] == doctest::Approx(norm * std::sin(x)).epsilon(1e-14));
    }

    GridField zero;
    zero.values.assign(m.grid_size, 0.0);
    for (double c : from_grid(zero, m).coeffs) CHECK(c == 0.0);

    Rng rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        const SpectralVector v = random_vector(rng, 8);
        const SpectralVector round = from_grid(to_grid(v, m), m);
        for (int k = 0; k < 8; ++k) CHECK(round[k] == doctest::Approx(v[k]).epsilon(1e-12));
        CHECK(grid_norm(to_grid(v, m), m) == doctest::Approx(e_norm(v)).epsilon(1e-12));
    }
}

TEST_CASE("grid analysis of sin^2 against the quadrature oracle") {
    const SpectralModel m = remark_model();
    // v = sin(x) in physical space: orthonormal coefficient sqrt(pi/2)
    SpectralVector v(8);
    v[0] = oracle::from_unit_coeff(1.0);

    GridField f = to_grid(v, m);
    for (double& x : f.values) x = x * x;
    const SpectralVector c = from_grid(f, m);

    // sin^2 carries an infinite sine tail (~1/k^3); grid analysis aliases it
    // at the 1e-5 level for this grid. The exact route lives in power_f.
    for (int k = 1; k <= 8; ++k) {
        const double unit = oracle::to_unit_coeff(c[k - 1]);
        const double expected = oracle::sine_power_coeff(2, k);
        CHECK(unit == doctest::Approx(expected).epsilon(2e-4));
        CHECK(expected == doctest::Approx(oracle::sine_square_coeff_exact(k)).epsilon(1e-12));
    }
    CHECK(oracle::sine_square_coeff_exact(1) == doctest::Approx(0.84883).epsilon(1e-4));
    CHECK(oracle::sine_square_coeff_exact(3) == doctest::Approx(-0.16977).epsilon(1e-4));
    CHECK(oracle::sine_square_coeff_exact(5) == doctest::Approx(-0.02425).epsilon(1e-3));
}

TEST_CASE("shifted stable resolvent") {
    const SpectralModel m = remark_model();

    SpectralVector w(8);
    w[2] = 1.0;  // e_3
    const SpectralVector out = shifted_stable_resolvent(w, 4.0, m);
    CHECK(out[2] == doctest::Approx(1.0 / 10.0).epsilon(1e-14));  // lambda_3 + 4 = 10

    const SpectralVector none = shifted_stable_resolvent(SpectralVector(8), 4.0, m);
    for (double c : none.coeffs) CHECK(c == 0.0);

    // P_s(sin^2 x) through the resolvent, unit-normalized convention
    // (grid-squared input, so compared at the grid-aliasing tolerance)
    SpectralVector v(8);
    v[0] = oracle::from_unit_coeff(1.0);
    GridField f = to_grid(v, m);
    for (double& x : f.values) x = x * x;
    const SpectralVector ps = project(from_grid(f, m), Block::stable, m);
    const SpectralVector shaped = shifted_stable_resolvent(ps, 4.0, m);
    CHECK(oracle::to_unit_coeff(shaped[2]) ==
          doctest::Approx(oracle::sine_square_coeff_exact(3) / 10.0).epsilon(2e-4));
    CHECK(oracle::to_unit_coeff(shaped[4]) ==
          doctest::Approx(oracle::sine_square_coeff_exact(5) / 26.0).epsilon(5e-3));
    CHECK(oracle::sine_square_coeff_exact(3) / 10.0 == doctest::Approx(-0.016977).epsilon(1e-4));
    CHECK(oracle::sine_square_coeff_exact(5) / 26.0 == doctest::Approx(-9.33e-4).epsilon(1e-3));

    CHECK_THROWS_AS(shifted_stable_resolvent(w, -6.0, m), ValidationError);  // resonance at k=3
}

TEST_CASE("alpha norm weights") {
    const SpectralModel flat = remark_model();  // alpha = 0
    Rng rng(5);
    const SpectralVector v = random_vector(rng, 8);
    CHECK(alpha_norm(v, flat) == e_norm(v));

    const SpectralModel half = build_sine_model(8, 3.0, 0.5, 32);
    double expected = 0.0;
    for (int k = 0; k < 8; ++k) {
        expected += std::pow(half.eigenvalues[k] + half.shift_a, 1.0) * v[k] * v[k];
    }
    CHECK(alpha_norm(v, half) == doctest::Approx(std::sqrt(expected)).epsilon(1e-14));
}
