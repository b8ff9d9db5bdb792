#include "rim/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rim/errors.hpp"
#include "rim/rng.hpp"

namespace rim {

namespace {
constexpr std::uint64_t kForwardStream = 0x666f7277617264ULL;   // "forward"
constexpr std::uint64_t kBackwardStream = 0x6261636b77617264ULL;  // "backward"
}  // namespace

long grid_index(double t, double dt) {
    const double q = t / dt;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-6) {
        throw ValidationError("time " + std::to_string(t) + " is not on the grid of step " +
                              std::to_string(dt));
    }
    return static_cast<long>(r);
}

WienerPath sample_wiener(std::uint64_t seed, double t_min, double t_max, double dt) {
    if (dt <= 0.0) throw ValidationError("dt must be positive");
    if (t_min > 0.0 || t_max < 0.0) {
        throw ValidationError("path window must contain t = 0");
    }
    WienerPath p;
    p.dt = dt;
    p.index_min = grid_index(t_min, dt);
    p.index_max = grid_index(t_max, dt);
    p.seed = seed;
    p.values.assign(static_cast<std::size_t>(p.node_count()), 0.0);

    const double sq = std::sqrt(dt);
    Rng forward(derive_seed(seed, kForwardStream, 0));
    for (long i = 1; i <= p.index_max; ++i) {
        p.at_index(i) = p.at_index(i - 1) + sq * forward.normal();
    }
    // backward half: reflected indexing over an independent stream
    Rng backward(derive_seed(seed, kBackwardStream, 0));
    for (long i = -1; i >= p.index_min; --i) {
        p.at_index(i) = p.at_index(i + 1) + sq * backward.normal();
    }
    return p;
}

WienerPath zero_path(double t_min, double t_max, double dt) {
    if (dt <= 0.0) throw ValidationError("dt must be positive");
    if (t_min > 0.0 || t_max < 0.0) {
        throw ValidationError("path window must contain t = 0");
    }
    WienerPath p;
    p.dt = dt;
    p.index_min = grid_index(t_min, dt);
    p.index_max = grid_index(t_max, dt);
    p.seed = 0;
    p.values.assign(static_cast<std::size_t>(p.node_count()), 0.0);
    return p;
}

WienerPath shift_path(const WienerPath& path, double s) {
    const long j = grid_index(s, path.dt);
    if (j < path.index_min || j > path.index_max) {
        throw ValidationError("shift " + std::to_string(s) +
                              " exhausts the sampled window; sample a longer path");
    }
    WienerPath out;
    out.dt = path.dt;
    out.index_min = path.index_min - j;
    out.index_max = path.index_max - j;
    out.seed = path.seed;
    out.values.assign(static_cast<std::size_t>(out.node_count()), 0.0);
    const double base = path.at_index(j);
    for (long i = out.index_min; i <= out.index_max; ++i) {
        out.at_index(i) = path.at_index(i + j) - base;
    }
    return out;
}

OuTrajectory ou_trajectory(const WienerPath& path, double sigma, double t_ou) {
    if (sigma < 0.0) throw ValidationError("sigma must be >= 0");
    if (t_ou <= 0.0) throw ValidationError("t_ou must be positive");
    const double dt = path.dt;
    const long n_ou = static_cast<long>(std::ceil(t_ou / dt - 1e-9));
    const long lo = path.index_min + n_ou;
    if (lo > 0 || path.index_max < 0) {
        throw ValidationError("path window too short for the OU tail cutoff: need t_min <= -t_ou");
    }

    OuTrajectory ou;
    ou.dt = dt;
    ou.index_min = lo;
    ou.index_max = path.index_max;
    ou.sigma = sigma;
    ou.t_ou = n_ou * dt;
    ou.path = path;
    const std::size_t n_nodes = static_cast<std::size_t>(ou.index_max - ou.index_min + 1);
    ou.z_values.assign(n_nodes, 0.0);
    ou.Z_values.assign(n_nodes, 0.0);

    // A(i) = sum_{j=0}^{n_ou} e^{(j - n_ou) dt} omega(i - n_ou + j); slides with i.
    const double decay = std::exp(-dt);
    const double tail_weight = std::exp(-ou.t_ou);
    double acc = 0.0;
    for (long j = 0; j <= n_ou; ++j) {
        acc += std::exp((j - n_ou) * dt) * path.at_index(path.index_min + j);
    }
    double max_abs_omega = 0.0;
    for (long i = path.index_min; i <= path.index_max; ++i) {
        max_abs_omega = std::max(max_abs_omega, std::abs(path.at_index(i)));
    }
    ou.tail_bound = sigma * tail_weight * (max_abs_omega + ou.t_ou + 1.0);

    for (long i = lo; i <= ou.index_max; ++i) {
        const double w_head = path.at_index(i);
        const double w_tail = path.at_index(i - n_ou);
        const double trap = dt * (acc - 0.5 * tail_weight * w_tail - 0.5 * w_head);
        ou.z_values[static_cast<std::size_t>(i - lo)] = sigma * w_head - sigma * trap;
        if (i < ou.index_max) {
            acc = decay * (acc - tail_weight * w_tail) + path.at_index(i + 1);
        }
    }

    // cumulative trapezoid of z anchored at Z(0) = 0
    const long zero_off = -lo;
    ou.Z_values[static_cast<std::size_t>(zero_off)] = 0.0;
    for (long i = 1; i <= ou.index_max; ++i) {
        const std::size_t a = static_cast<std::size_t>(zero_off + i);
        ou.Z_values[a] = ou.Z_values[a - 1] + 0.5 * dt * (ou.z_values[a - 1] + ou.z_values[a]);
    }
    for (long i = -1; i + zero_off >= 0; --i) {
        const std::size_t a = static_cast<std::size_t>(zero_off + i);
        ou.Z_values[a] = ou.Z_values[a + 1] - 0.5 * dt * (ou.z_values[a] + ou.z_values[a + 1]);
    }
    return ou;
}

OuTrajectory deterministic_ou(double t_min, double t_max, double dt) {
    OuTrajectory ou;
    ou.dt = dt;
    ou.index_min = grid_index(t_min, dt);
    ou.index_max = grid_index(t_max, dt);
    if (ou.index_min > 0 || ou.index_max < 0) {
        throw ValidationError("window must contain t = 0");
    }
    const std::size_t n = static_cast<std::size_t>(ou.index_max - ou.index_min + 1);
    ou.z_values.assign(n, 0.0);
    ou.Z_values.assign(n, 0.0);
    ou.sigma = 0.0;
    ou.t_ou = 0.0;
    ou.tail_bound = 0.0;
    ou.path = zero_path(t_min, t_max, dt);
    return ou;
}

namespace {
double k1_sup(const OuTrajectory& ou, double sign) {
    const double z0 = ou.z_at_index(0);
    const double base = sign * z0 / ou.sigma;
    double sup = -1e300;
    const long lo = ou.path.index_min;
    for (long i = lo; i <= 0; ++i) {
        const double t = i * ou.dt;
        const double cand = base + sign * ou.path.at_index(i) - std::abs(t);
        sup = std::max(sup, cand);
    }
    return std::max(1.0, sup);
}
}  // namespace

double k1_estimate(const OuTrajectory& ou) {
    if (ou.sigma <= 0.0) {
        throw ValidationError("pathwise constants are undefined for sigma = 0; "
                              "use the deterministic mode instead");
    }
    if (ou.index_min > 0) throw ValidationError("OU window has no backward part");
    return k1_sup(ou, +1.0);
}

double kpm_estimate(const OuTrajectory& ou) {
    if (ou.sigma <= 0.0) {
        throw ValidationError("pathwise constants are undefined for sigma = 0; "
                              "use the deterministic mode instead");
    }
    if (ou.index_min > 0) throw ValidationError("OU window has no backward part");
    return k1_sup(ou, +1.0) + k1_sup(ou, -1.0);
}

double k2_estimate(const OuTrajectory& ou, double gamma, double delta, double lambda_u) {
    if (ou.sigma <= 0.0) {
        throw ValidationError("pathwise constants are undefined for sigma = 0");
    }
    if (gamma < std::max(-lambda_u, ou.sigma)) {
        throw ValidationError("K2 requires gamma >= max(-lambda_u, sigma)");
    }
    if (delta <= -lambda_u + ou.sigma) {
        throw ValidationError("K2 requires delta > -lambda_u + sigma");
    }
    double sup = 0.0;
    for (long i = ou.path.index_min; i <= 0; ++i) {
        const double tau = i * ou.dt;
        const double num = std::abs(1.0 - std::exp(-lambda_u * tau + ou.sigma * ou.path.at_index(i)));
        const double den = gamma * std::exp(delta * std::abs(tau));
        sup = std::max(sup, num / den);
    }
    return sup;
}

double k3_estimate(const OuTrajectory& ou, double gamma1, double delta1, double p) {
    if (ou.sigma <= 0.0) {
        throw ValidationError("pathwise constants are undefined for sigma = 0");
    }
    if (gamma1 <= ou.sigma) throw ValidationError("K3 requires gamma1 > sigma");
    if (delta1 <= ou.sigma) throw ValidationError("K3 requires delta1 > sigma");
    const double pm1 = p - 1.0;
    double sup = 0.0;
    for (long i = ou.path.index_min; i <= 0; ++i) {
        const double r = i * ou.dt;
        const double num = std::abs(1.0 - std::exp(pm1 * ou.sigma * ou.path.at_index(i)));
        const double den = gamma1 * std::exp(pm1 * delta1 * std::abs(r));
        sup = std::max(sup, num / den);
    }
    return sup;
}

double sde_residual_max(const OuTrajectory& ou) {
    double worst = 0.0;
    for (long i = ou.index_min; i < ou.index_max; ++i) {
        const double z0 = ou.z_at_index(i);
        const double z1 = ou.z_at_index(i + 1);
        const double dw = ou.path.at_index(i + 1) - ou.path.at_index(i);
        const double res = z1 - z0 + 0.5 * ou.dt * (z0 + z1) - ou.sigma * dw;
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

void dump_ou_csv(const OuTrajectory& ou, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "t,omega,z,Z\n";
    char buf[160];
    for (long i = ou.index_min; i <= ou.index_max; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", i * ou.dt,
                      ou.path.at_index(i), ou.z_at_index(i), ou.Z_at_index(i));
        out << buf;
    }
    if (!out) throw IoError("failed writing " + path);
}

OuTrajectory load_ou_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV " + path);
    std::vector<double> t, w, z, Z;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double a, b, c, d;
        char comma;
        if (!(ss >> a >> comma >> b >> comma >> c >> comma >> d)) {
            throw IoError("malformed CSV row in " + path + ": " + line);
        }
        t.push_back(a);
        w.push_back(b);
        z.push_back(c);
        Z.push_back(d);
    }
    if (t.size() < 2) throw IoError("CSV " + path + " has fewer than two rows");
    OuTrajectory ou;
    ou.dt = t[1] - t[0];
    ou.index_min = grid_index(t.front(), ou.dt);
    ou.index_max = ou.index_min + static_cast<long>(t.size()) - 1;
    ou.z_values = z;
    ou.Z_values = Z;
    ou.path.dt = ou.dt;
    ou.path.index_min = ou.index_min;
    ou.path.index_max = ou.index_max;
    ou.path.values = w;
    return ou;
}

}  // namespace rim
