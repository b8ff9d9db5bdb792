#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rim/errors.hpp"
#include "rim/nonlinear.hpp"
#include "rim/rng.hpp"

using namespace rim;

namespace {
SpectralModel remark_model() { return build_sine_model(8, 3.0, 0.0, 32); }

NonlinearitySpec quadratic(double radius) {
    NonlinearitySpec s;
    s.p = 2.0;
    s.radius = radius;
    return s;
}

SpectralVector random_ball(Rng& rng, double norm, const SpectralModel& m) {
    SpectralVector v(m.mode_count);
    for (int k = 0; k < m.mode_count; ++k) v[k] = rng.normal();
    const double a = alpha_norm(v, m);
    return vec_scale(v, norm / a);
}
}  // namespace

TEST_CASE("power_f: exact quadratic coefficients against the oracle") {
    const SpectralModel m = remark_model();
    const NonlinearitySpec spec = quadratic(1.0);

    for (double c : power_f(SpectralVector(8), spec, m).coeffs) CHECK(c == 0.0);

    // v = sin(x): unit-normalized square has coefficients b_k
    SpectralVector v(8);
    v[0] = oracle::from_unit_coeff(1.0);
    const SpectralVector sq = power_f(v, spec, m);
    for (int k = 1; k <= 8; ++k) {
        CHECK(oracle::to_unit_coeff(sq[k - 1]) ==
              doctest::Approx(oracle::sine_square_coeff_exact(k)).epsilon(1e-12));
    }

    // cross term: (sin x + sin 2x)^2 against the high-resolution oracle
    SpectralVector w(8);
    w[0] = oracle::from_unit_coeff(1.0);
    w[1] = oracle::from_unit_coeff(1.0);
    const SpectralVector sq2 = power_f(w, spec, m);
    for (int k = 1; k <= 8; ++k) {
        const double expected =
            2.0 / oracle::kPi *
            oracle::simpson(
                [&](double x) {
                    const double u = std::sin(x) + std::sin(2 * x);
                    return u * u * std::sin(k * x);
                },
                0.0, oracle::kPi, 20000);
        CHECK(oracle::to_unit_coeff(sq2[k - 1]) == doctest::Approx(expected).epsilon(1e-9));
    }

    // homogeneity
    Rng rng(4);
    const SpectralVector r = random_ball(rng, 0.7, m);
    const SpectralVector lhs = power_f(vec_scale(r, 3.0), spec, m);
    const SpectralVector rhs = vec_scale(power_f(r, spec, m), 9.0);
    for (int k = 0; k < 8; ++k) CHECK(lhs[k] == doctest::Approx(rhs[k]).epsilon(1e-10));

    NonlinearitySpec bad = spec;
    bad.p = 2.5;
    CHECK_THROWS_AS(power_f(v, bad, m), ValidationError);
}

TEST_CASE("power_f: cubic, signed and unsigned routes agree") {
    // odd powers stay sine-band-limited, so the collocation route is exact
    // too and the two paths must coincide to rounding
    const SpectralModel m = remark_model();
    NonlinearitySpec cubic;
    cubic.p = 3.0;
    cubic.radius = 1.0;
    NonlinearitySpec signed_cubic = cubic;
    signed_cubic.signed_power = true;

    Rng rng(17);
    for (int rep = 0; rep < 5; ++rep) {
        const SpectralVector v = random_ball(rng, 0.9, m);
        const SpectralVector a = power_f(v, cubic, m);
        const SpectralVector b = power_f(v, signed_cubic, m);
        for (int k = 0; k < 8; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-11));
    }
}

TEST_CASE("cut-off profile chi") {
    CHECK(chi(0.5) == 1.0);
    CHECK(chi(1.0) == 1.0);
    CHECK(chi(2.0) == 0.0);
    CHECK(chi(3.0) == 0.0);
    CHECK(chi(1.5) == doctest::Approx(0.5).epsilon(1e-14));

    // monotone nonincreasing, numerically C^1 across the seams
    double prev = 1.0;
    double prev_d = 0.0;
    const double h = 1e-5;
    for (double s = 0.5; s <= 2.5; s += 1e-3) {
        const double c = chi(s);
        CHECK(c <= prev + 1e-15);
        prev = c;
        const double d = (chi(s + h) - chi(s - h)) / (2.0 * h);
        CHECK(std::abs(d) < 4.0);                 // derivative bounded
        if (s > 0.6) CHECK(std::abs(d - prev_d) < 0.02);  // no jumps
        prev_d = d;
    }
    CHECK(std::abs((chi(1.0 + h) - chi(1.0 - h)) / (2.0 * h)) < 1e-6);
    CHECK(std::abs((chi(2.0 + h) - chi(2.0 - h)) / (2.0 * h)) < 1e-6);
}

TEST_CASE("truncated_f: plateau, support, seam") {
    const SpectralModel m = remark_model();
    const NonlinearitySpec spec = quadratic(0.2);
    Rng rng(6);

    const SpectralVector inside = random_ball(rng, 0.5 * spec.radius, m);
    const SpectralVector keep = truncated_f(inside, spec, m);
    const SpectralVector raw = power_f(inside, spec, m);
    for (int k = 0; k < 8; ++k) CHECK(keep[k] == raw[k]);

    const SpectralVector outside = random_ball(rng, 3.0 * spec.radius, m);
    for (double c : truncated_f(outside, spec, m).coeffs) CHECK(c == 0.0);

    const SpectralVector seam = random_ball(rng, spec.radius, m);
    const SpectralVector at_seam = truncated_f(seam, spec, m);
    const SpectralVector raw_seam = power_f(seam, spec, m);
    for (int k = 0; k < 8; ++k) CHECK(at_seam[k] == raw_seam[k]);

    // global boundedness of the truncated map
    double sup_ball = 0.0;
    for (int i = 0; i < 200; ++i) {
        sup_ball = std::max(
            sup_ball, e_norm(power_f(random_ball(rng, 2.0 * spec.radius, m), spec, m)));
    }
    for (int i = 0; i < 200; ++i) {
        const SpectralVector v = random_ball(rng, rng.uniform(0.0, 5.0) * spec.radius, m);
        CHECK(e_norm(truncated_f(v, spec, m)) <= sup_ball * (1.0 + 1e-9));
    }
}

TEST_CASE("lipschitz estimate: determinism, scaling, audit") {
    const SpectralModel m = remark_model();

    const auto a = lipschitz_estimate(quadratic(0.1), m, 1000, 99);
    const auto b = lipschitz_estimate(quadratic(0.1), m, 1000, 99);
    CHECK(a.l_f == b.l_f);
    CHECK(a.l_f == doctest::Approx(1.25 * a.max_quotient));
    CHECK(std::isfinite(a.l_f));
    CHECK(a.l_f > 0.0);
    CHECK(a.l_f <= 1.0);  // sanity ceiling used by the default configs

    // halving R with p = 2 roughly halves l_F
    const auto big = lipschitz_estimate(quadratic(0.1), m, 1000, 5);
    const auto small = lipschitz_estimate(quadratic(0.05), m, 1000, 5);
    const double ratio = small.l_f / big.l_f;
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);

    CHECK_THROWS_AS(lipschitz_estimate(quadratic(0.1), m, 100, 1), ValidationError);

    // audit: fresh pairs never violate the certified constant
    const NonlinearitySpec audited = [&] {
        NonlinearitySpec s = quadratic(0.1);
        s.lipschitz = a.l_f;
        return s;
    }();
    Rng rng(12345);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const SpectralVector v = random_ball(rng, 2.0 * audited.radius * rng.uniform(), m);
        const SpectralVector w = random_ball(rng, 2.0 * audited.radius * rng.uniform(), m);
        const double gap = alpha_norm(vec_sub(v, w), m);
        if (gap < 1e-14) continue;
        const double diff =
            e_norm(vec_sub(truncated_f(v, audited, m), truncated_f(w, audited, m)));
        if (diff > audited.lipschitz * gap) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("sc constant") {
    CHECK(sc_constant(1.0, 0.1, 0.0, 0.0, -2.0, 1.0) == doctest::Approx(0.15).epsilon(1e-14));
    CHECK(sc_constant(1.0, 0.0, 0.0, 0.0, -2.0, 1.0) == 0.0);
    const double expected = 0.1 * (0.5 + std::sqrt(oracle::kPi));
    CHECK(sc_constant(1.0, 0.1, 0.5, 0.0, -2.0, 1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(sc_constant(1.0, 0.1, 0.5, 0.0, -2.0, 1.0) == doctest::Approx(0.22725).epsilon(1e-4));
    CHECK_THROWS_AS(sc_constant(1.0, 0.1, 0.0, -3.0, -2.0, 1.0), ValidationError);
    CHECK_THROWS_AS(sc_constant(1.0, 0.1, 0.0, 1.0, -2.0, 1.0), ValidationError);
}

TEST_CASE("truncation radius choice") {
    const SpectralModel m = remark_model();
    const NonlinearitySpec base = quadratic(0.0);
    const double beta = 0.5 * (m.lambda_u() + m.lambda_s());

    const RadiusChoice mid = choose_truncation_radius(0.5, base, m, beta, 1000, 31);
    CHECK(mid.sc <= 0.5);
    CHECK(mid.sc >= 0.25);
    CHECK(mid.radius > 0.0);

    const RadiusChoice tight = choose_truncation_radius(0.25, base, m, beta, 1000, 31);
    CHECK(tight.radius < mid.radius);
    CHECK(tight.sc <= 0.25);

    CHECK_THROWS_AS(choose_truncation_radius(1.0, base, m, beta, 1000, 31), ValidationError);
    CHECK_THROWS_AS(choose_truncation_radius(-0.1, base, m, beta, 1000, 31), ValidationError);
}
