#include "rim/nonlinear.hpp"

#include <cmath>
#include <string>

#include "rim/errors.hpp"
#include "rim/rng.hpp"

namespace rim {

namespace {

bool is_positive_integer(double p) {
    return p >= 2.0 && std::abs(p - std::round(p)) < 1e-12;
}

double mollifier(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

constexpr double kPi = 3.14159265358979323846264338327950288;

// Trigonometric polynomial with sine part s[n] sin(nx) (n >= 1, s[0] unused)
// and cosine part c[n] cos(nx). Products of sine series leave the sine basis
// (even powers are cosine polynomials), so integer powers are folded exactly
// here instead of through the collocation grid: grid analysis would alias the
// infinite sine tail of even powers.
struct TrigPoly {
    std::vector<double> s;
    std::vector<double> c;
};

TrigPoly trig_multiply_by_sine(const TrigPoly& a, const std::vector<double>& u) {
    const int da = static_cast<int>(std::max(a.s.size(), a.c.size()));
    const int du = static_cast<int>(u.size());
    TrigPoly out;
    out.s.assign(da + du, 0.0);
    out.c.assign(da + du, 0.0);
    // sin(nx) sin(mx) = [cos((n-m)x) - cos((n+m)x)] / 2
    for (int n = 1; n < static_cast<int>(a.s.size()); ++n) {
        if (a.s[n] == 0.0) continue;
        for (int m = 1; m < du; ++m) {
            if (u[m] == 0.0) continue;
            const double w = 0.5 * a.s[n] * u[m];
            out.c[std::abs(n - m)] += w;
            out.c[n + m] -= w;
        }
    }
    // cos(nx) sin(mx) = [sin((n+m)x) - sin((n-m)x)] / 2
    for (int n = 0; n < static_cast<int>(a.c.size()); ++n) {
        if (a.c[n] == 0.0) continue;
        for (int m = 1; m < du; ++m) {
            if (u[m] == 0.0) continue;
            const double w = 0.5 * a.c[n] * u[m];
            out.s[n + m] += w;
            const int d = n - m;
            if (d > 0) {
                out.s[d] -= w;
            } else if (d < 0) {
                out.s[-d] += w;
            }
        }
    }
    return out;
}

// Exact Galerkin coefficients of v^p against the orthonormal sine basis.
SpectralVector integer_power_exact(const SpectralVector& v, int p, const SpectralModel& model) {
    const double to_unit = std::sqrt(2.0 / kPi);
    std::vector<double> u(static_cast<std::size_t>(model.mode_count) + 1, 0.0);
    for (int k = 1; k <= model.mode_count; ++k) u[k] = to_unit * v[k - 1];

    TrigPoly acc;
    acc.s = u;
    for (int q = 1; q < p; ++q) acc = trig_multiply_by_sine(acc, u);

    // project back: sine part is direct; cos(nx) contributes
    // (2/pi) * 2k/(k^2 - n^2) to sin(kx) when k + n is odd
    SpectralVector out(model.mode_count);
    for (int k = 1; k <= model.mode_count; ++k) {
        double bk = k < static_cast<int>(acc.s.size()) ? acc.s[k] : 0.0;
        for (int n = 0; n < static_cast<int>(acc.c.size()); ++n) {
            if (acc.c[n] == 0.0 || (k + n) % 2 == 0) continue;
            bk += acc.c[n] * (2.0 / kPi) * 2.0 * k /
                  (static_cast<double>(k) * k - static_cast<double>(n) * n);
        }
        out[k - 1] = bk / to_unit;
    }
    return out;
}

// Gaussian direction scaled to a prescribed alpha-norm.
SpectralVector random_alpha_ball(Rng& rng, double norm, const SpectralModel& model) {
    SpectralVector v(model.mode_count);
    for (int k = 0; k < model.mode_count; ++k) v[k] = rng.normal();
    const double a = alpha_norm(v, model);
    if (a == 0.0) return v;
    return vec_scale(v, norm / a);
}

}  // namespace

SpectralVector power_f(const SpectralVector& v, const NonlinearitySpec& spec,
                       const SpectralModel& model) {
    if (!spec.signed_power && !is_positive_integer(spec.p)) {
        throw ValidationError("power p must be an integer >= 2 unless signed_power is set");
    }
    if (spec.signed_power && spec.p <= 1.0) {
        throw ValidationError("power p must exceed 1");
    }
    if (!spec.signed_power) {
        return integer_power_exact(v, static_cast<int>(std::round(spec.p)), model);
    }
    // |u|^{p-1} u is not polynomial; evaluate it on the collocation grid
    GridField f = to_grid(v, model);
    const double q = spec.p - 1.0;
    for (double& x : f.values) x = std::pow(std::abs(x), q) * x;
    return from_grid(f, model);
}

double chi(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double up = mollifier(2.0 - s);
    const double down = mollifier(s - 1.0);
    return up / (up + down);
}

SpectralVector truncated_f(const SpectralVector& v, const NonlinearitySpec& spec,
                           const SpectralModel& model) {
    if (spec.radius <= 0.0) throw ValidationError("truncation radius must be positive");
    const double s = alpha_norm(v, model) / spec.radius;
    if (s >= 2.0) return SpectralVector(model.mode_count);
    const double c = chi(s);
    SpectralVector fv = power_f(v, spec, model);
    return c == 1.0 ? fv : vec_scale(fv, c);
}

LipschitzEstimate lipschitz_estimate(const NonlinearitySpec& spec, const SpectralModel& model,
                                     int n_pairs, std::uint64_t seed, double safety_factor) {
    if (n_pairs < 1000) throw ValidationError("lipschitz_estimate needs n_pairs >= 1000");
    Rng rng(seed);
    const double ball = 2.0 * spec.radius;
    double max_q = 0.0;
    int used = 0;
    for (int i = 0; i < n_pairs; ++i) {
        SpectralVector v = random_alpha_ball(rng, ball * rng.uniform(), model);
        SpectralVector w;
        if (i % 2 == 0) {
            // independent second point
            w = random_alpha_ball(rng, ball * rng.uniform(), model);
        } else {
            // nearby second point; clamp back into the ball
            const double eps = ball * std::pow(10.0, -4.0 * rng.uniform());
            w = vec_add(v, random_alpha_ball(rng, eps, model));
            const double an = alpha_norm(w, model);
            if (an > ball) w = vec_scale(w, ball / an);
        }
        const double gap = alpha_norm(vec_sub(v, w), model);
        if (gap < 1e-14) continue;
        const double diff = e_norm(vec_sub(truncated_f(v, spec, model), truncated_f(w, spec, model)));
        max_q = std::max(max_q, diff / gap);
        ++used;
    }
    if (used == 0) throw ValidationError("degenerate sampling: all pairs identical");
    LipschitzEstimate est;
    est.max_quotient = max_q;
    est.l_f = safety_factor * max_q;
    est.pairs_used = used;
    return est;
}

double sc_constant(double m_const, double l_f, double alpha, double beta, double lambda_u,
                   double lambda_s) {
    if (!(beta > lambda_u && beta < lambda_s)) {
        throw ValidationError("beta must lie in (lambda_u, lambda_s)");
    }
    if (alpha < 0.0 || alpha >= 1.0) throw ValidationError("alpha must lie in [0, 1)");
    const double term_u = 1.0 / (beta - lambda_u);
    const double term_s = std::tgamma(1.0 - alpha) / std::pow(lambda_s - beta, 1.0 - alpha);
    return m_const * l_f * (term_u + term_s);
}

RadiusChoice choose_truncation_radius(double target_sc, const NonlinearitySpec& spec,
                                      const SpectralModel& model, double beta,
                                      int n_pairs, std::uint64_t seed, double safety_factor) {
    if (target_sc <= 0.0 || target_sc >= 1.0) {
        throw ValidationError("target_sc must lie in (0, 1)");
    }
    const double lo_edge = 1e-8, hi_edge = 1e2;
    const double lambda_u = model.lambda_u(), lambda_s = model.lambda_s();

    auto sc_at = [&](double radius) {
        NonlinearitySpec s = spec;
        s.radius = radius;
        const auto est = lipschitz_estimate(s, model, n_pairs, seed, safety_factor);
        return std::pair<double, double>(sc_constant(1.0, est.l_f, model.alpha, beta, lambda_u,
                                                     lambda_s),
                                         est.l_f);
    };

    auto [sc_lo, lf_lo] = sc_at(lo_edge);
    if (sc_lo > target_sc) {
        throw ValidationError("no truncation radius in [1e-8, 1e2] reaches the SC target");
    }
    auto [sc_hi, lf_hi] = sc_at(hi_edge);
    if (sc_hi < 0.5 * target_sc) {
        throw ValidationError("SC stays below 0.5 * target over the whole radius bracket");
    }
    if (sc_hi <= target_sc) {
        return {hi_edge, lf_hi, sc_hi};
    }
    if (sc_lo >= 0.5 * target_sc) {
        return {lo_edge, lf_lo, sc_lo};
    }

    double lo = lo_edge, hi = hi_edge;
    for (int it = 0; it < 80; ++it) {
        const double mid = std::sqrt(lo * hi);  // bisect in log scale
        auto [sc_mid, lf_mid] = sc_at(mid);
        if (sc_mid >= 0.5 * target_sc && sc_mid <= target_sc) {
            return {mid, lf_mid, sc_mid};
        }
        (sc_mid > target_sc ? hi : lo) = mid;
    }
    throw ValidationError("radius bisection failed to land in the SC window");
}

}  // namespace rim
