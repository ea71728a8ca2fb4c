#pragma once

// Lipschitz coefficient fields (gamma, rho) on the periodic (t, x) square,
// the built-in metric zoo, and spectral frequency truncation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clusterlab/fft.hpp"
#include "clusterlab/grid.hpp"

namespace clusterlab {

using Eigen::ArrayXXd;

/// 2x2 symmetric coefficient field gamma plus scalar density rho, sampled on
/// a periodic nt x nx grid over [0,1)^2. g00 pairs with the t-slot.
struct MetricField {
    std::string name;
    int nt = 0, nx = 0;
    ArrayXXd g00, g01, g11, rho;  // row it, col ix
    double lip_seminorm = 0.0;
    double perturbation_size = 0.0;

    double t_of(int it) const { return static_cast<double>(it) / nt; }
    double x_of(int ix) const { return static_cast<double>(ix) / nx; }

    bool positive_definite() const {
        for (int it = 0; it < nt; ++it)
            for (int ix = 0; ix < nx; ++ix) {
                if (g00(it, ix) <= 0 || rho(it, ix) <= 0) return false;
                if (g00(it, ix) * g11(it, ix) - g01(it, ix) * g01(it, ix) <= 0) return false;
            }
        return true;
    }
};

namespace detail {

inline double sup_abs(const ArrayXXd& a) { return a.abs().maxCoeff(); }

/// Sup of one-step difference quotients over both axes (periodic).
inline double grid_lip(const ArrayXXd& a, int nt, int nx) {
    double best = 0.0;
    for (int it = 0; it < nt; ++it)
        for (int ix = 0; ix < nx; ++ix) {
            double dt = std::abs(a((it + 1) % nt, ix) - a(it, ix)) * nt;
            double dx = std::abs(a(it, (ix + 1) % nx) - a(it, ix)) * nx;
            best = std::max({best, dt, dx});
        }
    return best;
}

}  // namespace detail

/// Triangle-wave distance to the nearest integer, period 1, slope +-1.
inline double dist_to_int(double x) {
    double f = x - std::floor(x);
    return std::min(f, 1.0 - f);
}

/// Builds a zoo metric sampled on an nt x nx grid. Names: flat, bump,
/// sawtooth (params: teeth, amplitude), smith_sogge (params: amplitude).
inline MetricField make_metric(const std::string& name, int nt, int nx,
                               const std::map<std::string, double>& params = {}) {
    auto param = [&](const std::string& key, double dflt) {
        auto it = params.find(key);
        return it == params.end() ? dflt : it->second;
    };
    MetricField m;
    m.name = name;
    m.nt = nt;
    m.nx = nx;
    m.g00 = ArrayXXd::Ones(nt, nx);
    m.g01 = ArrayXXd::Zero(nt, nx);
    m.g11 = ArrayXXd::Ones(nt, nx);
    m.rho = ArrayXXd::Ones(nt, nx);

    if (name == "flat") {
        // identity metric, nothing to do
    } else if (name == "bump") {
        double amp = param("amplitude", 0.1);
        for (int it = 0; it < nt; ++it)
            for (int ix = 0; ix < nx; ++ix) {
                double t = m.t_of(it), x = m.x_of(ix);
                double b = std::cos(kTwoPi * t) * std::cos(kTwoPi * x);
                m.g00(it, ix) = 1.0 + amp * b;
                m.g11(it, ix) = 1.0 - amp * b;
                m.g01(it, ix) = 0.5 * amp * std::sin(kTwoPi * t) * std::sin(kTwoPi * x);
                m.rho(it, ix) = 1.0 + 0.5 * amp * std::cos(kTwoPi * x);
            }
    } else if (name == "sawtooth") {
        // x-only sawtooth with unit Lipschitz constant at default amplitude
        double teeth = param("teeth", 8.0);
        double amp = param("amplitude", 1.0 / (2.0 * teeth));
        for (int ix = 0; ix < nx; ++ix) {
            double s = 2.0 * dist_to_int(teeth * m.x_of(ix)) - 0.5;
            for (int it = 0; it < nt; ++it) m.g11(it, ix) = 1.0 + amp * s;
        }
    } else if (name == "smith_sogge") {
        double amp = param("amplitude", 0.1);
        for (int ix = 0; ix < nx; ++ix) {
            double hat = 1.0 - 2.0 * periodic_dist(m.x_of(ix), 0.5);
            double root = 1.0 - amp * hat;
            for (int it = 0; it < nt; ++it) m.g11(it, ix) = root * root;
        }
    } else {
        throw std::invalid_argument("unknown metric: " + name);
    }

    m.lip_seminorm = std::max({detail::grid_lip(m.g00, nt, nx), detail::grid_lip(m.g01, nt, nx),
                               detail::grid_lip(m.g11, nt, nx), detail::grid_lip(m.rho, nt, nx)});
    m.perturbation_size = detail::sup_abs(m.g00 - 1.0) + detail::sup_abs(m.g01) +
                          detail::sup_abs(m.g11 - 1.0) + detail::sup_abs(m.rho - 1.0);
    if (m.perturbation_size > 0.25 + 1e-12)
        throw std::invalid_argument("metric '" + name + "' leaves the perturbative regime");
    return m;
}

inline const std::vector<std::string>& metric_zoo_names() {
    static const std::vector<std::string> names = {"flat", "bump", "sawtooth", "smith_sogge"};
    return names;
}

/// Raised-cosine low-pass weight: 1 below 0.9*cutoff, cos^2 rolloff to 0 at
/// cutoff. Smooth, monotone, and a pure function of |freq|/cutoff.
inline double lowpass_weight(double freq, double cutoff) {
    double a = std::abs(freq);
    if (a <= 0.9 * cutoff) return 1.0;
    if (a >= cutoff) return 0.0;
    double s = (a - 0.9 * cutoff) / (0.1 * cutoff);
    double c = std::cos(0.5 * 3.14159265358979323846 * s);
    return c * c;
}

/// Spectral truncation of a periodic 2D field to |freq| <= cutoff (angular,
/// Euclidean in the (t,x) dual variables). Nyquist of both axes must be at
/// least 2*cutoff so the rolloff band is fully resolved.
inline ArrayXXd truncate_frequency(const ArrayXXd& field, double cutoff) {
    const int nt = static_cast<int>(field.rows());
    const int nx = static_cast<int>(field.cols());
    if (kTwoPi * (nt / 2) < 2.0 * cutoff || kTwoPi * (nx / 2) < 2.0 * cutoff)
        throw std::invalid_argument("grid too coarse for cutoff " + std::to_string(cutoff));
    std::vector<cplx> buf(static_cast<size_t>(nt) * nx);
    for (int it = 0; it < nt; ++it)
        for (int ix = 0; ix < nx; ++ix) buf[static_cast<size_t>(it) * nx + ix] = field(it, ix);
    fft_forward_2d(buf.data(), nt, nx);
    for (int it = 0; it < nt; ++it) {
        double wt = kTwoPi * fft_mode(it, nt);
        for (int ix = 0; ix < nx; ++ix) {
            double wx = kTwoPi * fft_mode(ix, nx);
            buf[static_cast<size_t>(it) * nx + ix] *= lowpass_weight(std::hypot(wt, wx), cutoff);
        }
    }
    fft_inverse_2d(buf.data(), nt, nx);
    ArrayXXd out(nt, nx);
    for (int it = 0; it < nt; ++it)
        for (int ix = 0; ix < nx; ++ix) out(it, ix) = buf[static_cast<size_t>(it) * nx + ix].real();
    return out;
}

/// 1D variant for scalar profiles.
inline VectorXd truncate_frequency_1d(const VectorXd& field, double cutoff) {
    const int n = static_cast<int>(field.size());
    if (kTwoPi * (n / 2) < 2.0 * cutoff)
        throw std::invalid_argument("grid too coarse for cutoff " + std::to_string(cutoff));
    std::vector<cplx> buf(field.data(), field.data() + n);
    fft_forward(buf);
    for (int i = 0; i < n; ++i) buf[i] *= lowpass_weight(kTwoPi * fft_mode(i, n), cutoff);
    fft_inverse(buf);
    VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = buf[i].real();
    return out;
}

/// Truncates every coefficient of a metric at |freq| <= cutoff.
inline MetricField truncate_metric(const MetricField& m, double cutoff) {
    MetricField out = m;
    out.g00 = truncate_frequency(m.g00, cutoff);
    out.g01 = truncate_frequency(m.g01, cutoff);
    out.g11 = truncate_frequency(m.g11, cutoff);
    out.rho = truncate_frequency(m.rho, cutoff);
    return out;
}

}  // namespace clusterlab
