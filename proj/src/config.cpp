#include "rim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rim/errors.hpp"

namespace rim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("key '" + key + "': cannot parse number '" + v + "'");
    }
}

long parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("key '" + key + "': cannot parse integer '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw ValidationError("key '" + key + "': cannot parse seed '" + v + "'");
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError("key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(trim(item), key));
    }
    return out;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += fmt(xs[i]);
    }
    return out;
}

}  // namespace

std::string subcommand_name(Subcommand s) {
    switch (s) {
        case Subcommand::solve: return "solve";
        case Subcommand::shape_study: return "shape-study";
        case Subcommand::mc_probability: return "mc-probability";
        case Subcommand::invariance: return "invariance";
        case Subcommand::k_diagnostics: return "k-diagnostics";
        case Subcommand::validate: return "validate";
    }
    return "unknown";
}

StudyConfig parse_config_text(const std::string& text) {
    StudyConfig c;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ValidationError("line " + std::to_string(line_no) + ": malformed section");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "spectral" && section != "nonlinear" && section != "manifold" &&
                section != "stochastic" && section != "experiments" && section != "cli") {
                throw ValidationError("line " + std::to_string(line_no) + ": unknown section [" +
                                      section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string qual = section + "." + key;

        if (section == "spectral") {
            if (key == "mode_count") c.mode_count = static_cast<int>(parse_int(value, qual));
            else if (key == "shift_c") c.shift_c = parse_double(value, qual);
            else if (key == "alpha") c.alpha = parse_double(value, qual);
            else if (key == "grid_size") c.grid_size = static_cast<int>(parse_int(value, qual));
            else throw ValidationError("unknown key '" + qual + "'");
        } else if (section == "nonlinear") {
            if (key == "p") c.p = parse_double(value, qual);
            else if (key == "signed_power") c.signed_power = parse_bool(value, qual);
            else if (key == "radius") c.radius = value == "auto" ? 0.0 : parse_double(value, qual);
            else if (key == "target_sc") c.target_sc = parse_double(value, qual);
            else if (key == "lipschitz_pairs") c.lipschitz_pairs = static_cast<int>(parse_int(value, qual));
            else if (key == "safety_factor") c.safety_factor = parse_double(value, qual);
            else throw ValidationError("unknown key '" + qual + "'");
        } else if (section == "manifold") {
            if (key == "beta") {
                c.beta_auto = value == "auto";
                if (!c.beta_auto) c.beta = parse_double(value, qual);
            } else if (key == "horizon") {
                c.horizon = value == "auto" ? 0.0 : parse_double(value, qual);
            } else if (key == "dt") c.dt = parse_double(value, qual);
            else if (key == "max_iterations") c.max_iterations = static_cast<int>(parse_int(value, qual));
            else if (key == "tolerance") c.tolerance = parse_double(value, qual);
            else if (key == "chart_radius_factor") c.chart_radius_factor = parse_double(value, qual);
            else if (key == "xi_radius") c.xi_radius = parse_double(value, qual);
            else throw ValidationError("unknown key '" + qual + "'");
        } else if (section == "stochastic") {
            if (key == "t_ou") c.t_ou = parse_double(value, qual);
            else if (key == "sigma_list") c.sigma_list = parse_list(value, qual);
            else throw ValidationError("unknown key '" + qual + "'");
        } else if (section == "experiments") {
            if (key == "radius_list") c.radius_list = parse_list(value, qual);
            else if (key == "n_samples") c.n_samples = static_cast<int>(parse_int(value, qual));
            else if (key == "base_seed") c.base_seed = parse_u64(value, qual);
            else if (key == "dt_flow") c.dt_flow = parse_double(value, qual);
            else if (key == "delta_t") c.delta_t = parse_double(value, qual);
            else if (key == "deterministic") c.deterministic = parse_bool(value, qual);
            else if (key == "failure_budget") c.failure_budget = parse_double(value, qual);
            else throw ValidationError("unknown key '" + qual + "'");
        } else if (section == "cli") {
            if (key == "threads") c.threads = static_cast<int>(parse_int(value, qual));
            else throw ValidationError("unknown key '" + qual + "'");
        } else {
            throw ValidationError("line " + std::to_string(line_no) + ": key outside any section");
        }
    }
    return c;
}

StudyConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_echo(const StudyConfig& c) {
    std::ostringstream out;
    out << "[spectral]\n";
    out << "mode_count = " << c.mode_count << "\n";
    out << "shift_c = " << fmt(c.shift_c) << "\n";
    out << "alpha = " << fmt(c.alpha) << "\n";
    out << "grid_size = " << c.grid_size << "\n\n";
    out << "[nonlinear]\n";
    out << "p = " << fmt(c.p) << "\n";
    out << "signed_power = " << (c.signed_power ? "true" : "false") << "\n";
    out << "radius = " << (c.radius > 0.0 ? fmt(c.radius) : std::string("auto")) << "\n";
    out << "target_sc = " << fmt(c.target_sc) << "\n";
    out << "lipschitz_pairs = " << c.lipschitz_pairs << "\n";
    out << "safety_factor = " << fmt(c.safety_factor) << "\n\n";
    out << "[manifold]\n";
    out << "beta = " << (c.beta_auto ? std::string("auto") : fmt(c.beta)) << "\n";
    out << "horizon = " << (c.horizon > 0.0 ? fmt(c.horizon) : std::string("auto")) << "\n";
    out << "dt = " << fmt(c.dt) << "\n";
    out << "max_iterations = " << c.max_iterations << "\n";
    out << "tolerance = " << fmt(c.tolerance) << "\n";
    out << "chart_radius_factor = " << fmt(c.chart_radius_factor) << "\n";
    out << "xi_radius = " << fmt(c.xi_radius) << "\n\n";
    out << "[stochastic]\n";
    out << "t_ou = " << fmt(c.t_ou) << "\n";
    out << "sigma_list = " << fmt_list(c.sigma_list) << "\n\n";
    out << "[experiments]\n";
    out << "radius_list = " << fmt_list(c.radius_list) << "\n";
    out << "n_samples = " << c.n_samples << "\n";
    out << "base_seed = " << c.base_seed << "\n";
    out << "dt_flow = " << fmt(c.dt_flow) << "\n";
    out << "delta_t = " << fmt(c.delta_t) << "\n";
    out << "deterministic = " << (c.deterministic ? "true" : "false") << "\n";
    out << "failure_budget = " << fmt(c.failure_budget) << "\n\n";
    out << "[cli]\n";
    out << "threads = " << c.threads << "\n";
    return out.str();
}

ValidationReport validate_config(const StudyConfig& c) {
    ValidationReport report;
    auto flag = [&](const std::string& msg) { report.violations.push_back(msg); };

    SpectralModel model;
    bool have_model = false;
    try {
        model = build_sine_model(c.mode_count, c.shift_c, c.alpha, c.grid_size);
        have_model = true;
    } catch (const std::exception& e) {
        flag(std::string("spectral: ") + e.what());
    }

    if (!c.signed_power &&
        !(c.p >= 2.0 && std::abs(c.p - std::round(c.p)) < 1e-12)) {
        flag("nonlinear: p must be an integer >= 2 unless signed_power is set");
    }
    if (c.signed_power && c.p <= 1.0) flag("nonlinear: p must exceed 1");
    if (c.grid_size < std::ceil(0.5 * (c.p + 1.0) * c.mode_count)) {
        flag("spectral: grid_size below the dealiasing rule grid_size >= (p+1)/2 * mode_count");
    }
    if (c.radius <= 0.0 && !(c.target_sc > 0.0 && c.target_sc < 1.0)) {
        flag("nonlinear: target_sc must lie in (0, 1) when radius is auto");
    }
    if (c.tolerance <= 0.0) flag("manifold: tolerance must be positive");
    if (c.dt <= 0.0) flag("manifold: dt must be positive");
    if (c.max_iterations < 1) flag("manifold: max_iterations must be >= 1");
    if (c.t_ou <= 0.0) flag("stochastic: t_ou must be positive");
    if (c.n_samples < 1) flag("experiments: n_samples must be >= 1");
    if (!(c.failure_budget >= 0.0 && c.failure_budget <= 1.0)) {
        flag("experiments: failure_budget must lie in [0, 1]");
    }

    if (have_model) {
        const double lu = model.lambda_u();
        const double ls = model.lambda_s();
        if (!c.beta_auto && !(c.beta > lu && c.beta < ls)) {
            flag("manifold: beta must lie in the open interval (lambda_u, lambda_s) = (" +
                 std::to_string(lu) + ", " + std::to_string(ls) + ")");
        }
        const double ceiling = sigma_ceiling(model, c.p);
        if (!c.deterministic) {
            for (double s : c.sigma_list) {
                if (s <= 0.0) {
                    flag("stochastic: sigma must be positive (use deterministic mode for sigma = 0)");
                } else if (s >= ceiling) {
                    flag("stochastic: sigma = " + std::to_string(s) +
                         " violates sigma < min{(lambda_s-(p-1)lambda_u)/p, -lambda_u} = " +
                         std::to_string(ceiling));
                }
            }
        }
        if (report.clean()) {
            try {
                const ResolvedSetup setup = resolve_setup(c);
                if (setup.sc >= 1.0) {
                    flag("nonlinear: SC = " + std::to_string(setup.sc) +
                         " >= 1; contraction not certified for the resolved radius");
                }
                const double chart = setup.cfg.chart_radius_factor * setup.spec.radius;
                for (double r : c.radius_list) {
                    if (r > chart * (1.0 + 1e-12)) {
                        flag("experiments: radius " + std::to_string(r) +
                             " exceeds the chart acceptance |xi|_alpha <= " +
                             std::to_string(chart));
                    }
                }
                if (c.xi_radius > chart * (1.0 + 1e-12)) {
                    flag("manifold: xi_radius exceeds the chart acceptance |xi|_alpha <= " +
                         std::to_string(chart));
                }
                const double dt = setup.cfg.dt;
                auto on_grid = [&](double t) {
                    const double q = t / dt;
                    return std::abs(q - std::round(q)) <= 1e-6;
                };
                if (!on_grid(c.delta_t)) flag("experiments: delta_t must be a grid multiple of dt");
                if (!on_grid(c.dt_flow)) flag("experiments: dt_flow must be a grid multiple of dt");
            } catch (const std::exception& e) {
                flag(std::string("resolve: ") + e.what());
            }
        }
    }
    return report;
}

}  // namespace rim
