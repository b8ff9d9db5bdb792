#pragma once

#include <cstdint>

#include "rim/spectral.hpp"

namespace rim {

// The power nonlinearity F(v) = v^p with a smooth cut-off at radius R in the
// alpha-norm. l_F is the certified Lipschitz constant of the truncated map
// from E^alpha into E, estimated empirically and carried with the spec.
struct NonlinearitySpec {
    double p = 2.0;
    bool signed_power = false;  // true: |u|^{p-1} u, allows non-integer p
    double radius = 0.1;        // R > 0
    double lipschitz = 0.0;     // l_F
};

// Pseudo-spectral v^p (dealiased by the model's grid headroom).
SpectralVector power_f(const SpectralVector& v, const NonlinearitySpec& spec,
                       const SpectralModel& model);

// C-infinity cut-off profile: 1 on [0,1], 0 on [2,inf), mollifier quotient on (1,2).
double chi(double s);

// chi(|v|_alpha / R) * F(v)
SpectralVector truncated_f(const SpectralVector& v, const NonlinearitySpec& spec,
                           const SpectralModel& model);

struct LipschitzEstimate {
    double l_f = 0.0;          // safety_factor * max sampled difference quotient
    double max_quotient = 0.0; // raw sampled maximum
    int pairs_used = 0;
};

// Randomized difference-quotient maximization over pairs in the ball
// |.|_alpha <= 2R. Deterministic for a fixed seed.
LipschitzEstimate lipschitz_estimate(const NonlinearitySpec& spec, const SpectralModel& model,
                                     int n_pairs, std::uint64_t seed,
                                     double safety_factor = 1.25);

// SC = M * l_F * [1/(beta - lambda_u) + Gamma(1 - alpha)/(lambda_s - beta)^{1-alpha}]
double sc_constant(double m_const, double l_f, double alpha, double beta, double lambda_u,
                   double lambda_s);

struct RadiusChoice {
    double radius = 0.0;
    double lipschitz = 0.0;
    double sc = 0.0;
};

// Bisection on R until sc_constant(1, l_F(R), ...) lands in
// [0.5 * target_sc, target_sc]. Rejects when no R in [1e-8, 1e2] brackets.
RadiusChoice choose_truncation_radius(double target_sc, const NonlinearitySpec& spec,
                                      const SpectralModel& model, double beta,
                                      int n_pairs, std::uint64_t seed,
                                      double safety_factor = 1.25);

}  // namespace rim
