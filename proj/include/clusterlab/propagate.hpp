#pragma once

// Time evolution for D_t u = a^w(t,x,D) u with the symbol refrozen at every
// Runge-Kutta stage, plus the propagation diagnostics built on it:
// bicharacteristic centers, frequency-moment ratios, and the almost
// orthogonality of bush projectors.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "clusterlab/errors.hpp"
#include "clusterlab/grid.hpp"
#include "clusterlab/weyl.hpp"

namespace clusterlab {

/// Conservative default step for the RK4 scheme: keeps the unitarity drift
/// of band |a| <~ 1.05*lam spectra below 1e-6 per lam^{-1/3} slab.
inline double default_dt(double lam) { return 1.0 / (16.0 * lam); }

struct EvolveOptions {
    double dt = 0.0;              // 0 -> default_dt(lambda)
    int store_stride = 1;         // keep every k-th slice
    double unitarity_tol = 1e-6;  // allowed drift per lam^{-1/3} of elapsed time
    bool check_unitarity = true;
    bool check_band = true;       // spectral mass outside 3/4 lam stays < 1e-8
};

struct WaveField {
    double lambda = 0.0;
    double t0 = 0.0, t1 = 0.0, dt = 0.0;
    double freq_support = 0.0;  // declared band [-K, K]
    std::vector<double> times;
    std::vector<VectorXcd> slices;
    std::vector<double> l2_trace;   // per step, starting at t0
    double unitarity_drift = 0.0;   // max relative drift seen
    double band_leak = 0.0;         // max spectral mass beyond freq_support

    const VectorXcd& final_state() const { return slices.back(); }
};

namespace detail {

class Rk4Stepper {
public:
    Rk4Stepper(const SymbolGrid& symbol, int n) : ap_(symbol, n) {
        k1_.resize(n); k2_.resize(n); k3_.resize(n); k4_.resize(n); tmp_.resize(n);
    }

    // one step of u' = i a^w(t) u
    void step(VectorXcd& u, double t, double h) {
        constexpr cplx iu(0.0, 1.0);
        ap_.freeze(t);
        ap_.apply(u, k1_);
        tmp_ = u + (0.5 * h * iu) * k1_;
        ap_.freeze(t + 0.5 * h);
        ap_.apply(tmp_, k2_);
        tmp_ = u + (0.5 * h * iu) * k2_;
        ap_.apply(tmp_, k3_);
        tmp_ = u + (h * iu) * k3_;
        ap_.freeze(t + h);
        ap_.apply(tmp_, k4_);
        u += (h / 6.0 * iu) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

    const FastWeylApplier& applier() const { return ap_; }

private:
    FastWeylApplier ap_;
    VectorXcd k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace detail

/// Evolves u0 from t0 to t1. An optional per-step observer sees the state
/// after every step (and once at t0).
inline WaveField evolve(const SymbolGrid& symbol, const VectorXcd& u0, double t0, double t1,
                        EvolveOptions opt = {},
                        const std::function<void(int, double, const VectorXcd&)>& observer = {}) {
    const int n = static_cast<int>(u0.size());
    const double lam = symbol.lambda;
    Grid1D grid{n, 1.0};
    double dt = opt.dt > 0 ? opt.dt : default_dt(lam);
    if (dt > 0.5 / lam) throw step_size_error("dt exceeds 0.5/lambda", 0.5 / lam);
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t1 - t0) / dt - 1e-12)));
    dt = (t1 - t0) / steps;  // signed; backward evolution is allowed

    const double band = 0.75 * lam;
    if (opt.check_band && spectral_mass_outside(u0, grid, band) > 1e-8)
        throw band_error("initial data is not band-limited to (3/4) lambda");

    WaveField out;
    out.lambda = lam;
    out.t0 = t0;
    out.t1 = t1;
    out.dt = dt;
    out.freq_support = band;

    detail::Rk4Stepper stepper(symbol, n);
    VectorXcd u = u0;
    const double norm0 = l2_norm(u);
    out.l2_trace.push_back(norm0);
    out.times.push_back(t0);
    out.slices.push_back(u);
    if (observer) observer(0, t0, u);

    for (int s = 1; s <= steps; ++s) {
        stepper.step(u, t0 + (s - 1) * dt, dt);
        double t = t0 + s * dt;
        double nrm = l2_norm(u);
        out.l2_trace.push_back(nrm);
        if (norm0 > 0) {
            double drift = std::abs(nrm - norm0) / norm0;
            out.unitarity_drift = std::max(out.unitarity_drift, drift);
            if (opt.check_unitarity) {
                double allowed = opt.unitarity_tol * std::max(1.0, std::abs(t - t0) * std::cbrt(lam));
                if (drift > allowed) {
                    double suggested = dt * 0.8 * std::pow(allowed / drift, 0.2);
                    throw step_size_error("unitarity drift " + std::to_string(drift) +
                                              " exceeds tolerance; reduce dt",
                                          suggested);
                }
            }
        }
        bool keep = (s % opt.store_stride == 0) || s == steps;
        if (keep) {
            out.times.push_back(t);
            out.slices.push_back(u);
            if (opt.check_band) {
                double leak = spectral_mass_outside(u, grid, band);
                out.band_leak = std::max(out.band_leak, leak);
            }
        }
        if (observer) observer(s, t, u);
    }
    return out;
}

/// Final state only; used for the evolution-operator applications S(t1,t0)f.
inline VectorXcd evolve_final(const SymbolGrid& symbol, const VectorXcd& f, double t0, double t1,
                              double dt = 0.0) {
    if (t1 == t0) return f;
    EvolveOptions opt;
    opt.dt = dt;
    opt.store_stride = 1 << 30;
    opt.check_unitarity = false;
    opt.check_band = false;
    return evolve(symbol, f, t0, t1, opt).final_state();
}

/// x0 - t * d_xi a(0, x0, xi0), the symbol derivative taken by a centered
/// difference on the xi lattice; result wrapped to [0,1).
inline double bicharacteristic_center(const SymbolGrid& s, double x0, double xi0, double t) {
    int ix = static_cast<int>(std::lround(periodic_wrap(x0) * s.nx)) % s.nx;
    int k = static_cast<int>(std::lround(xi0 / kTwoPi));
    int ik = fft_bin(k, s.nxi);
    int kp = fft_bin(k + 1, s.nxi), km = fft_bin(k - 1, s.nxi);
    double dxi = (s.at(0, ix, kp) - s.at(0, ix, km)) / (2.0 * kTwoPi);
    return periodic_wrap(x0 - t * dxi);
}

/// Weighted frequency-moment sum sum_{j<=order} (lam^{-2/3} 2^{-m})^j
/// ||(D-xi0)^j u||_2, evaluated spectrally.
inline double frequency_moment_sum(const VectorXcd& u, const Grid1D& g, double lam, double xi0,
                                   int m, int order) {
    VectorXcd uh = fft_of(u);
    double w = std::pow(lam, -2.0 / 3.0) * std::pow(2.0, -m);
    double total = 0.0;
    for (int j = 0; j <= order; ++j) {
        double acc = 0.0;
        for (int i = 0; i < g.n; ++i) acc += std::norm(uh[i]) * std::pow(g.xi(i) - xi0, 2 * j);
        total += std::pow(w, j) * std::sqrt(acc);
    }
    return total;
}

/// Ratio sup_{t in [t0,t1]} of the weighted moment sum to its value at t0.
inline double frequency_localization_ratio(const SymbolGrid& symbol, const VectorXcd& u0,
                                           double xi0, int m, int order, double t0, double t1,
                                           double dt = 0.0) {
    if (t1 - t0 > std::pow(symbol.lambda, -1.0 / 3.0) + 1e-12)
        throw band_error("moment ratio interval longer than lambda^{-1/3}");
    Grid1D g{static_cast<int>(u0.size()), 1.0};
    double s0 = 0.0, worst = 0.0;
    EvolveOptions opt;
    opt.dt = dt;
    opt.store_stride = 1 << 30;
    opt.check_band = false;
    evolve(symbol, u0, t0, t1, opt, [&](int step, double, const VectorXcd& u) {
        double v = frequency_moment_sum(u, g, symbol.lambda, xi0, m, order);
        if (step == 0) s0 = v;
        worst = std::max(worst, v);
    });
    return s0 > 0 ? worst / s0 : 0.0;
}

/// Rank-one bush projector P f = 2^{-m} <w, f> w at a frozen time.
struct BushProjector {
    double t_center = 0.0;
    double x_center = 0.0;
    int m = 0;
    VectorXcd w;
    std::vector<double> xi_list;  // distinct packet frequency centers

    double norm_sq() const { return l2_norm(w) * l2_norm(w); }
    /// ||P|| = 2^{-m} ||w||^2.
    double projector_norm() const { return std::pow(2.0, -m) * norm_sq(); }
};

/// || P_1 S(t1,t0) P_0 ||_{L2->L2}; by rank-one structure this is
/// 2^{-m0-m1} |<w1, S w0>| ||w0|| ||w1||, one evolution + one inner product.
inline double almost_orthogonality(const BushProjector& b0, const BushProjector& b1,
                                   const SymbolGrid& symbol, double dt = 0.0) {
    VectorXcd sw0 = evolve_final(symbol, b0.w, b0.t_center, b1.t_center, dt);
    double ip = std::abs(inner(b1.w, sw0));
    return std::pow(2.0, -b0.m - b1.m) * ip * l2_norm(b0.w) * l2_norm(b1.w);
}

}  // namespace clusterlab
