#pragma once

#include <vector>

namespace rim {

// Finite-mode model of a self-adjoint operator L on (0, pi) with Dirichlet
// sine eigenbasis. Eigenvalues are ordered nondecreasing and split into an
// unstable block (lambda_k < 0, k <= split_index) and a stable block
// (lambda_k >= 0, k > split_index). shift_a makes L + a*id positive with
// lambda_1 + a >= 1 so fractional-power weights stay well scaled.
struct SpectralModel {
    int mode_count = 0;
    std::vector<double> eigenvalues;  // nondecreasing
    double shift_a = 0.0;
    double alpha = 0.0;     // fractional power exponent in [0, 1)
    int split_index = 0;    // N: number of unstable modes
    int grid_size = 0;      // collocation points x_j = j*pi/(grid_size+1)

    // precomputed tables
    std::vector<double> basis_table;    // grid_size x mode_count, e_k(x_j)
    std::vector<double> alpha_weights;  // (lambda_k + a)^alpha

    double lambda_u() const { return eigenvalues[split_index - 1]; }
    double lambda_s() const { return eigenvalues[split_index]; }
};

// Coefficient vector against the orthonormal eigenbasis e_k = sqrt(2/pi) sin(kx).
struct SpectralVector {
    std::vector<double> coeffs;

    SpectralVector() = default;
    explicit SpectralVector(int n) : coeffs(n, 0.0) {}
    int size() const { return static_cast<int>(coeffs.size()); }
    double& operator[](int k) { return coeffs[k]; }
    double operator[](int k) const { return coeffs[k]; }
};

// Physical-space samples at the collocation nodes.
struct GridField {
    std::vector<double> values;
};

enum class Block { unstable, stable, full };

// lambda_k = k^2 - shift_c with e_k(x) = sqrt(2/pi) sin(kx).
// Rejects spectra without a sign change (no unstable/stable splitting).
SpectralModel build_sine_model(int mode_count, double shift_c, double alpha, int grid_size);

SpectralVector project(const SpectralVector& v, Block part, const SpectralModel& model);

// Coefficientwise c_k -> exp(-lambda_k * t) * c_k on the selected block,
// zero elsewhere. Well-posed directions: stable needs t >= 0, unstable t <= 0,
// full t >= 0.
SpectralVector semigroup_apply(const SpectralVector& v, double t, Block part,
                               const SpectralModel& model);

GridField to_grid(const SpectralVector& v, const SpectralModel& model);
SpectralVector from_grid(const GridField& f, const SpectralModel& model);

// (L_s + mu)^{-1} on the stable block: c_k -> c_k / (lambda_k + mu) for
// k > N, zero on the unstable block. Rejects resonant modes lambda_k = -mu.
SpectralVector shifted_stable_resolvent(const SpectralVector& w, double mu,
                                        const SpectralModel& model);

double e_norm(const SpectralVector& v);
double alpha_norm(const SpectralVector& v, const SpectralModel& model);

// quadrature norm of a grid field: sqrt(pi/(G+1) * sum f_j^2)
double grid_norm(const GridField& f, const SpectralModel& model);

// small vector algebra helpers
SpectralVector vec_add(const SpectralVector& a, const SpectralVector& b);
SpectralVector vec_sub(const SpectralVector& a, const SpectralVector& b);
SpectralVector vec_scale(const SpectralVector& a, double c);

}  // namespace rim
