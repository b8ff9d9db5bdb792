#include "rim/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "rim/errors.hpp"
#include "rim/rng.hpp"

namespace rim {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kTagSolve = 6;

std::string default_output_dir(Subcommand sub) {
    const char* root = std::getenv("RIM_OUTPUT_ROOT");
    const std::string base = root != nullptr ? root : "runs";
    return base + "/" + subcommand_name(sub);
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

std::string frame_name(Frame f) {
    switch (f) {
        case Frame::random: return "random";
        case Frame::random_original: return "random_original";
        case Frame::deterministic: return "deterministic";
    }
    return "unknown";
}

nlohmann::json solve_summary(const StudyConfig& config, const ResolvedSetup& setup,
                             const SolveResult& solve, double sigma, std::uint64_t seed) {
    nlohmann::json doc;
    doc["schema_version"] = "1";
    doc["study"] = "solve";
    doc["xi"] = solve.point.xi.coeffs;
    doc["h"] = solve.point.h_value.coeffs;
    doc["frame"] = frame_name(solve.point.frame);
    doc["iterations"] = solve.report.iterations;
    doc["contraction"] = solve.report.observed_contraction;
    doc["residual"] = solve.report.final_residual;
    doc["sc"] = solve.report.sc_value;
    doc["tail_bound"] = solve.report.truncation_tail_bound;
    doc["cutoff_active"] = solve.report.cutoff_active;
    doc["sigma"] = sigma;
    doc["seed"] = seed;
    nlohmann::json f;
    f["radius"] = setup.spec.radius;
    f["lipschitz"] = setup.spec.lipschitz;
    f["beta"] = setup.cfg.beta;
    f["horizon"] = setup.cfg.horizon;
    f["dt"] = setup.cfg.dt;
    f["tolerance"] = setup.cfg.tolerance;
    f["xi_radius"] = config.xi_radius;
    doc["fingerprint"] = f;
    return doc;
}

int run_impl(const RunManifest& manifest) {
    if (manifest.config_path.empty()) {
        std::cerr << "error: no config file given\n";
        return 2;
    }
    if (!fs::exists(manifest.config_path)) {
        std::cerr << "error: config file not found: " << manifest.config_path << "\n";
        return 2;
    }

    StudyConfig config;
    try {
        config = parse_config_file(manifest.config_path);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (manifest.seed_override) config.base_seed = *manifest.seed_override;
    if (manifest.deterministic) {
        config.deterministic = true;
        config.sigma_list.clear();
    }

    if (manifest.subcommand == Subcommand::validate) {
        const ValidationReport report = validate_config(config);
        if (report.clean()) {
            std::cout << "config ok\n";
            return 0;
        }
        for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
        return 2;
    }

    const ValidationReport report = validate_config(config);
    if (!report.clean()) {
        for (const auto& v : report.violations) std::cerr << "violation: " << v << "\n";
        return 2;
    }

    const fs::path out_dir = manifest.output_dir.empty() ? default_output_dir(manifest.subcommand)
                                                         : manifest.output_dir;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << out_dir << "\n";
        return 4;
    }
    if (fs::exists(out_dir / "summary.json") && !manifest.force) {
        std::cerr << "error: " << out_dir
                  << " already holds a completed run; pass --force to overwrite\n";
        return 4;
    }

    write_file(out_dir / "config_echo.ini", config_echo(config));

    nlohmann::json summary;
    if (manifest.subcommand == Subcommand::solve) {
        const ResolvedSetup setup = resolve_setup(config);
        SpectralVector xi(setup.model.mode_count);
        xi[0] = config.xi_radius;
        const bool det = config.deterministic || config.sigma_list.empty();
        const double sigma = det ? 0.0 : config.sigma_list.front();
        SolveResult solve;
        std::uint64_t seed = 0;
        if (det) {
            solve = deterministic_graph(xi, setup.spec, setup.model, setup.cfg);
        } else {
            seed = derive_seed(config.base_seed, kTagSolve, 0);
            const WienerPath path =
                sample_wiener(seed, -(setup.cfg.horizon + config.t_ou), 0.0, setup.cfg.dt);
            const OuTrajectory ou = ou_trajectory(path, sigma, config.t_ou);
            solve = random_graph_point(xi, ou, setup.spec, setup.model, setup.cfg);
        }
        summary = solve_summary(config, setup, solve, sigma, seed);
    } else {
        StudyResult result;
        switch (manifest.subcommand) {
            case Subcommand::shape_study: result = shape_error_sweep(config); break;
            case Subcommand::mc_probability: result = mc_probability(config); break;
            case Subcommand::invariance: result = invariance_residual(config); break;
            case Subcommand::k_diagnostics: result = k_diagnostics(config); break;
            default: break;
        }
        write_file(out_dir / "cells.csv", result_to_csv(result));
        summary = result_to_json(result);
        const double frac = result.cells.empty()
                                ? 0.0
                                : static_cast<double>(result.failed_cells) / result.cells.size();
        if (frac > config.failure_budget) {
            summary["meta"]["generated_at"] = timestamp_utc();
            write_file(out_dir / "summary.json", summary.dump(2) + "\n");
            std::cerr << "error: " << result.failed_cells << " of " << result.cells.size()
                      << " cells failed, beyond the failure budget\n";
            return 3;
        }
    }

    // the single nondeterministic field, excluded from regression comparison
    summary["meta"]["generated_at"] = timestamp_utc();
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    std::cout << subcommand_name(manifest.subcommand) << ": wrote " << (out_dir / "summary.json").string()
              << "\n";
    return 0;
}

}  // namespace

int run(const RunManifest& manifest) {
    try {
        return run_impl(manifest);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SolveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace rim
