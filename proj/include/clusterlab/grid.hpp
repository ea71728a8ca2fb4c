#pragma once

// Periodic 1D grid on [0, period) and small helpers shared by the
// half-wave pipeline. The spatial period is 1 everywhere in the pipeline;
// frequencies then live on the lattice xi_k = 2*pi*k.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "clusterlab/fft.hpp"

namespace clusterlab {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Grid1D {
    int n = 0;
    double period = 1.0;

    double dx() const { return period / n; }
    double x(int j) const { return period * j / n; }
    /// Angular frequency of FFT bin i.
    double xi(int i) const { return kTwoPi * fft_mode(i, n) / period; }
    double nyquist() const { return kTwoPi * (n / 2) / period; }
};

/// Distance on the periodic interval [0, period).
inline double periodic_dist(double a, double b, double period = 1.0) {
    double d = std::fmod(std::abs(a - b), period);
    return std::min(d, period - d);
}

inline double periodic_wrap(double x, double period = 1.0) {
    double y = std::fmod(x, period);
    return y < 0 ? y + period : y;
}

/// Discrete L2 norm, ||f||^2 = (period/n) sum |f_j|^2.
inline double l2_norm(const VectorXcd& f, double period = 1.0) {
    return std::sqrt(f.squaredNorm() * period / f.size());
}

inline cplx inner(const VectorXcd& g, const VectorXcd& f, double period = 1.0) {
    return g.dot(f) * (period / f.size());
}

inline VectorXcd fft_of(const VectorXcd& f) {
    VectorXcd out = f;
    fft_forward(out.data(), static_cast<int>(out.size()));
    return out;
}

inline VectorXcd ifft_of(const VectorXcd& fhat) {
    VectorXcd out = fhat;
    fft_inverse(out.data(), static_cast<int>(out.size()));
    return out;
}

/// Fraction of spectral mass at angular frequencies |xi| > cutoff.
inline double spectral_mass_outside(const VectorXcd& f, const Grid1D& g, double cutoff) {
    VectorXcd fh = fft_of(f);
    double inside = 0.0, total = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double m = std::norm(fh[i]);
        total += m;
        if (std::abs(g.xi(i)) <= cutoff) inside += m;
    }
    return total > 0 ? (total - inside) / total : 0.0;
}

/// Applies a frequency multiplier m(xi) spectrally.
template <class Fn>
VectorXcd apply_multiplier(const VectorXcd& f, const Grid1D& g, Fn&& m) {
    VectorXcd fh = fft_of(f);
    for (int i = 0; i < g.n; ++i) fh[i] *= m(g.xi(i));
    return ifft_of(fh);
}

/// Default pipeline grid size for frequency parameter lam: a power of two
/// with comfortable headroom over the band |xi| <= lam and at least four
/// samples per lam^{-2/3} packet width.
inline int default_grid_size(double lam) {
    double need = std::max({3.0 * lam / 3.14159265358979, 4.0 * std::round(std::cbrt(lam * lam)), 64.0});
    int n = 64;
    while (n < need) n *= 2;
    return n;
}

}  // namespace clusterlab
