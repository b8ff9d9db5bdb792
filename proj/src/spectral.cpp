#include "rim/spectral.hpp"

#include <cmath>
#include <string>

#include "rim/errors.hpp"

namespace rim {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

void check_dimension(const SpectralVector& v, const SpectralModel& model) {
    if (v.size() != model.mode_count) {
        throw ValidationError("spectral vector dimension " + std::to_string(v.size()) +
                              " does not match model mode_count " +
                              std::to_string(model.mode_count));
    }
}
}  // namespace

SpectralModel build_sine_model(int mode_count, double shift_c, double alpha, int grid_size) {
    if (mode_count < 2) {
        throw ValidationError("mode_count must be >= 2");
    }
    if (alpha < 0.0 || alpha >= 1.0) {
        throw ValidationError("alpha must lie in [0, 1)");
    }
    if (grid_size < 2 * mode_count) {
        throw ValidationError("grid_size must be >= 2 * mode_count for dealiasing headroom");
    }

    SpectralModel m;
    m.mode_count = mode_count;
    m.alpha = alpha;
    m.grid_size = grid_size;
    m.eigenvalues.resize(mode_count);
    for (int k = 1; k <= mode_count; ++k) {
        m.eigenvalues[k - 1] = static_cast<double>(k) * k - shift_c;
    }

    int split = 0;
    for (int k = 0; k < mode_count; ++k) {
        if (m.eigenvalues[k] < 0.0) split = k + 1;
    }
    if (split == 0) {
        throw ValidationError("spectrum has no unstable mode (all eigenvalues >= 0); "
                              "no unstable/stable splitting exists");
    }
    if (split == mode_count) {
        throw ValidationError("spectrum has no stable mode (all eigenvalues < 0); "
                              "no unstable/stable splitting exists");
    }
    m.split_index = split;

    // smallest shift making lambda_1 + a >= 1
    m.shift_a = std::max(0.0, 1.0 - m.eigenvalues.front());

    m.alpha_weights.resize(mode_count);
    for (int k = 0; k < mode_count; ++k) {
        m.alpha_weights[k] = std::pow(m.eigenvalues[k] + m.shift_a, alpha);
    }

    const double norm = std::sqrt(2.0 / kPi);
    m.basis_table.resize(static_cast<std::size_t>(grid_size) * mode_count);
    for (int j = 0; j < grid_size; ++j) {
        const double x = (j + 1) * kPi / (grid_size + 1);
        for (int k = 0; k < mode_count; ++k) {
            m.basis_table[static_cast<std::size_t>(j) * mode_count + k] =
                norm * std::sin((k + 1) * x);
        }
    }
    return m;
}

SpectralVector project(const SpectralVector& v, Block part, const SpectralModel& model) {
    check_dimension(v, model);
    if (part == Block::full) {
        throw ValidationError("project expects part = unstable or stable");
    }
    SpectralVector out(model.mode_count);
    const int n = model.split_index;
    if (part == Block::unstable) {
        for (int k = 0; k < n; ++k) out[k] = v[k];
    } else {
        for (int k = n; k < model.mode_count; ++k) out[k] = v[k];
    }
    return out;
}

SpectralVector semigroup_apply(const SpectralVector& v, double t, Block part,
                               const SpectralModel& model) {
    check_dimension(v, model);
    if (part == Block::stable && t < 0.0) {
        throw ValidationError("stable semigroup requires t >= 0");
    }
    if (part == Block::unstable && t > 0.0) {
        throw ValidationError("unstable semigroup requires t <= 0");
    }
    if (part == Block::full && t < 0.0) {
        throw ValidationError("full semigroup requires t >= 0");
    }
    SpectralVector out(model.mode_count);
    const int n = model.split_index;
    const int lo = (part == Block::stable) ? n : 0;
    const int hi = (part == Block::unstable) ? n : model.mode_count;
    for (int k = lo; k < hi; ++k) {
        out[k] = std::exp(-model.eigenvalues[k] * t) * v[k];
    }
    return out;
}

GridField to_grid(const SpectralVector& v, const SpectralModel& model) {
    check_dimension(v, model);
    GridField f;
    f.values.assign(model.grid_size, 0.0);
    for (int j = 0; j < model.grid_size; ++j) {
        const double* row = &model.basis_table[static_cast<std::size_t>(j) * model.mode_count];
        double s = 0.0;
        for (int k = 0; k < model.mode_count; ++k) s += v[k] * row[k];
        f.values[j] = s;
    }
    return f;
}

SpectralVector from_grid(const GridField& f, const SpectralModel& model) {
    if (static_cast<int>(f.values.size()) != model.grid_size) {
        throw ValidationError("grid field size does not match model grid_size");
    }
    SpectralVector v(model.mode_count);
    const double w = kPi / (model.grid_size + 1);  // DST-I quadrature weight
    for (int k = 0; k < model.mode_count; ++k) {
        double s = 0.0;
        for (int j = 0; j < model.grid_size; ++j) {
            s += f.values[j] * model.basis_table[static_cast<std::size_t>(j) * model.mode_count + k];
        }
        v[k] = w * s;
    }
    return v;
}

SpectralVector shifted_stable_resolvent(const SpectralVector& w, double mu,
                                        const SpectralModel& model) {
    check_dimension(w, model);
    SpectralVector out(model.mode_count);
    for (int k = model.split_index; k < model.mode_count; ++k) {
        const double denom = model.eigenvalues[k] + mu;
        if (denom == 0.0) {
            throw ValidationError("resonant stable mode k = " + std::to_string(k + 1) +
                                  ": lambda_k + mu = 0");
        }
        out[k] = w[k] / denom;
    }
    return out;
}

double e_norm(const SpectralVector& v) {
    double s = 0.0;
    for (double c : v.coeffs) s += c * c;
    return std::sqrt(s);
}

double alpha_norm(const SpectralVector& v, const SpectralModel& model) {
    check_dimension(v, model);
    double s = 0.0;
    for (int k = 0; k < model.mode_count; ++k) {
        const double wc = model.alpha_weights[k] * v[k];
        s += wc * wc;
    }
    return std::sqrt(s);
}

double grid_norm(const GridField& f, const SpectralModel& model) {
    double s = 0.0;
    for (double x : f.values) s += x * x;
    return std::sqrt(s * kPi / (model.grid_size + 1));
}

SpectralVector vec_add(const SpectralVector& a, const SpectralVector& b) {
    SpectralVector out(a.size());
    for (int k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
    return out;
}

SpectralVector vec_sub(const SpectralVector& a, const SpectralVector& b) {
    SpectralVector out(a.size());
    for (int k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
    return out;
}

SpectralVector vec_scale(const SpectralVector& a, double c) {
    SpectralVector out(a.size());
    for (int k = 0; k < a.size(); ++k) out[k] = c * a[k];
    return out;
}

}  // namespace rim
