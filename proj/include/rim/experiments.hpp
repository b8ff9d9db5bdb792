#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "rim/manifold.hpp"

namespace rim {

// Everything a study needs, with "auto" values resolved by resolve_setup.
// Deterministic: the same config always produces bit-identical results.
struct StudyConfig {
    // spectral
    int mode_count = 8;
    double shift_c = 3.0;
    double alpha = 0.0;
    int grid_size = 32;

    // nonlinear
    double p = 2.0;
    bool signed_power = false;
    double radius = 0.0;  // 0 => choose via target_sc bisection
    double target_sc = 0.5;
    int lipschitz_pairs = 2000;
    double safety_factor = 1.25;

    // manifold solver
    double beta = 0.0;     // 0 with beta_auto => spectral-gap midpoint
    bool beta_auto = true;
    double horizon = 0.0;  // 0 => 30/(lambda_s - beta), rounded to the grid
    double dt = 1e-2;
    int max_iterations = 200;
    double tolerance = 1e-10;
    double chart_radius_factor = 0.5;
    double xi_radius = 0.025;  // |xi|_alpha used by the solve subcommand

    // stochastic
    double t_ou = 40.0;

    // study
    std::vector<double> sigma_list;
    std::vector<double> radius_list;
    int n_samples = 1;
    std::uint64_t base_seed = 1;
    double dt_flow = 0.02;
    double delta_t = 0.1;
    bool deterministic = false;
    double failure_budget = 0.5;  // tolerated fraction of failed cells
    int threads = 1;
};

struct ResolvedSetup {
    SpectralModel model;
    NonlinearitySpec spec;
    LpSolverConfig cfg;
    double sc = 0.0;
};

// Fills beta/horizon defaults, estimates or resolves the truncation radius,
// and certifies SC for the resulting spec. Throws ValidationError on any
// violated precondition.
ResolvedSetup resolve_setup(const StudyConfig& config);

// Upper bound on admissible noise intensity for the shape theorem:
// min{(lambda_s - (p-1) lambda_u)/p, -lambda_u}.
double sigma_ceiling(const SpectralModel& model, double p);

struct CellRecord {
    std::string study;
    long cell_id = 0;
    std::uint64_t seed = 0;
    double sigma = 0.0;
    double r = 0.0;
    double err = 0.0;
    double bound = 0.0;
    int success = 0;
    int iterations = 0;
    double residual = 0.0;
    bool failed = false;
    std::string error;
    std::map<std::string, double> extra;  // study-specific diagnostics (JSON only)
};

struct StudyResult {
    std::string study;
    std::vector<CellRecord> cells;
    nlohmann::json aggregates;
    nlohmann::json fingerprint;  // resolved parameters and tolerances in force
    long failed_cells = 0;
};

// err(r) = ||h - (L_s - p L_u)^{-1} P_s xi^p|| per radius (and per noise sample
// when sigma_list is nonempty and deterministic is false); reports err/r^p and
// the fitted log-log slope.
StudyResult shape_error_sweep(const StudyConfig& config);

// (a) empirical P(K_pm > 1/sigma) per sigma; (b) success fraction of the shape
// bound with C calibrated on a pilot at the largest sigma and frozen.
StudyResult mc_probability(const StudyConfig& config);

// Flow x = xi + h(omega, xi) forward by delta_t and compare the stable part
// against the graph over the shifted noise; reports rho and its dt_flow
// refinement components.
StudyResult invariance_residual(const StudyConfig& config);

// Distributional and bound-shape diagnostics for K1, K_pm, K2, K3.
StudyResult k_diagnostics(const StudyConfig& config);

// serialization
std::string result_to_csv(const StudyResult& result);
nlohmann::json result_to_json(const StudyResult& result);

}  // namespace rim
