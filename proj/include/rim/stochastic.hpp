#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rim {

// Sampled two-sided Wiener path on the uniform grid t_i = i * dt,
// i in [index_min, index_max], with omega(0) = 0 exactly. Forward and
// backward halves are built from independent increment streams glued at 0.
struct WienerPath {
    double dt = 0.0;
    long index_min = 0;  // <= 0
    long index_max = 0;  // >= 0
    std::vector<double> values;
    std::uint64_t seed = 0;

    double t_min() const { return index_min * dt; }
    double t_max() const { return index_max * dt; }
    long node_count() const { return index_max - index_min + 1; }
    double at_index(long i) const { return values[static_cast<std::size_t>(i - index_min)]; }
    double& at_index(long i) { return values[static_cast<std::size_t>(i - index_min)]; }
};

// Stationary Ornstein-Uhlenbeck samples z(theta_t omega) for dz + z dt = sigma dW,
// with the running integral Z(t) = int_0^t z, Z(0) = 0. The generating path is
// kept so pathwise constants (K1, K2, K3) can be evaluated on the same grid.
struct OuTrajectory {
    double dt = 0.0;
    long index_min = 0;
    long index_max = 0;
    std::vector<double> z_values;
    std::vector<double> Z_values;
    double sigma = 0.0;
    double t_ou = 0.0;          // effective tail cutoff (grid aligned)
    double tail_bound = 0.0;    // bound on the dropped integral tail
    WienerPath path;            // generating path (windows may differ)

    double t_min() const { return index_min * dt; }
    double t_max() const { return index_max * dt; }
    double z_at_index(long i) const { return z_values[static_cast<std::size_t>(i - index_min)]; }
    double Z_at_index(long i) const { return Z_values[static_cast<std::size_t>(i - index_min)]; }
};

// Pathwise constants certifying the linear-growth and cut-off inequalities
// on the sampled grid.
struct TailConstants {
    double k1 = 1.0;
    double kpm = 2.0;
    double k2 = 0.0;
    double k3 = 0.0;
};

// Grid index of a time value; rejects off-grid times.
long grid_index(double t, double dt);

WienerPath sample_wiener(std::uint64_t seed, double t_min, double t_max, double dt);

// Path with omega identically zero (deterministic mode injection).
WienerPath zero_path(double t_min, double t_max, double dt);

// theta_s omega = omega(. + s) - omega(s) on the remaining window.
WienerPath shift_path(const WienerPath& path, double s);

// z(theta_t omega) = -sigma * int_{-T_ou}^0 e^tau omega(tau + t) dtau + sigma omega(t)
// by trapezoid quadrature on the grid; Z by cumulative trapezoid anchored at 0.
OuTrajectory ou_trajectory(const WienerPath& path, double sigma, double t_ou);

// z = Z = 0 on the given window; the sigma = 0 branch used by deterministic mode.
OuTrajectory deterministic_ou(double t_min, double t_max, double dt);

// K1 = max(1, sup_{t<=0} [z(0)/sigma + omega(t) - |t|]), so that
// z(0) + sigma*omega(t) <= sigma*(K1 + |t|) holds on the grid by construction.
double k1_estimate(const OuTrajectory& ou);
// K1(omega) + K1(-omega) where -omega is the negated path.
double kpm_estimate(const OuTrajectory& ou);

// K2 = sup_{tau<=0} |(1 - e^{-lambda_u tau + sigma omega(tau)}) / (gamma e^{delta |tau|})|
// requires gamma >= max(-lambda_u, sigma) and delta > -lambda_u + sigma.
double k2_estimate(const OuTrajectory& ou, double gamma, double delta, double lambda_u);

// K3 = sup_{r<=0} |(1 - e^{(p-1) sigma omega(r)}) / (gamma1 e^{(p-1) delta1 |r|})|
// requires gamma1 > sigma and delta1 > sigma.
double k3_estimate(const OuTrajectory& ou, double gamma1, double delta1, double p);

// Max over steps of |z_{i+1} - z_i + dt*(z_i + z_{i+1})/2 - sigma*(w_{i+1} - w_i)|,
// the one-step residual of dz + z dt = sigma dW with the integral taken in the
// piecewise-linear (trapezoid) sense used everywhere else in this module.
double sde_residual_max(const OuTrajectory& ou);

// CSV fixture dump/load (columns t, omega, z, Z) at 17 significant digits.
void dump_ou_csv(const OuTrajectory& ou, const std::string& path);
OuTrajectory load_ou_csv(const std::string& path);

}  // namespace rim
