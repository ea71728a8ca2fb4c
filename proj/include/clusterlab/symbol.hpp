#pragma once

// Half-wave symbols a(t, x, xi) on a (t, x, xi) lattice: factorization of the
// second-order operator, (t,x)-mollification, the global xi-extension, and
// symbol-class seminorm estimates.
//
// The xi lattice always coincides with the angular frequency lattice
// 2*pi*k of the spatial grid the symbol will act on.

#include <cmath>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "clusterlab/errors.hpp"
#include "clusterlab/fft.hpp"
#include "clusterlab/grid.hpp"
#include "clusterlab/metric.hpp"

namespace clusterlab {

/// One retained (t,x)-Fourier harmonic of a symbol: coefficient vector over
/// the xi lattice for the mode pair (kt, kx).
struct SymbolHarmonic {
    int kt = 0, kx = 0;
    VectorXcd coeff;  // indexed by xi bin
};

struct SymbolGrid {
    double lambda = 0.0;
    double delta = 1.0;       // class regularity exponent (1 or 2/3)
    int nt = 0, nx = 0, nxi = 0;
    double band_tx = 0.0;     // declared angular (t,x) bandwidth
    bool extended = false;
    double xi_valid = 0.0;    // factorization faithful on |xi| <= xi_valid
    std::vector<double> values;  // (it, ix, ik), ik fastest

    double& at(int it, int ix, int ik) {
        return values[(static_cast<size_t>(it) * nx + ix) * nxi + ik];
    }
    double at(int it, int ix, int ik) const {
        return values[(static_cast<size_t>(it) * nx + ix) * nxi + ik];
    }
    double t_of(int it) const { return static_cast<double>(it) / nt; }
    double x_of(int ix) const { return static_cast<double>(ix) / nx; }
    double xi_of(int ik) const { return kTwoPi * fft_mode(ik, nxi); }
    double xi_spacing() const { return kTwoPi; }

    bool on_t_grid(double t, int* index = nullptr) const {
        double u = periodic_wrap(t) * nt;
        int it = static_cast<int>(std::lround(u));
        if (std::abs(u - it) > 1e-9 * nt) return false;
        if (index) *index = it % nt;
        return true;
    }

    /// (t,x)-Fourier harmonics with |freq| <= band_tx, built on first use.
    const std::vector<SymbolHarmonic>& spectrum() const {
        if (spectrum_.empty()) build_spectrum();
        return spectrum_;
    }

    /// Symbol values at fixed time as an (nx x nxi) matrix, using the exact
    /// band-limited interpolation in t when t is off the grid.
    Eigen::MatrixXd slice_at(double t) const {
        Eigen::MatrixXd s(nx, nxi);
        int it = 0;
        if (on_t_grid(t, &it)) {
            for (int ix = 0; ix < nx; ++ix)
                for (int ik = 0; ik < nxi; ++ik) s(ix, ik) = at(it, ix, ik);
            return s;
        }
        s.setZero();
        for (const auto& h : spectrum()) {
            cplx pt = std::polar(1.0, kTwoPi * h.kt * t);
            for (int ix = 0; ix < nx; ++ix) {
                cplx p = pt * std::polar(1.0, kTwoPi * h.kx * x_of(ix));
                for (int ik = 0; ik < nxi; ++ik) s(ix, ik) += (p * h.coeff[ik]).real();
            }
        }
        return s;
    }

private:
    void build_spectrum() const {
        if (band_tx >= kTwoPi * std::min(nt, nx) / 2)
            throw invariant_error("symbol spectrum requested without mollified bandwidth");
        std::vector<cplx> plane(static_cast<size_t>(nt) * nx);
        std::vector<std::vector<cplx>> hats(static_cast<size_t>(nxi));
        // modes worth keeping per the declared band
        std::vector<std::pair<int, int>> modes;
        for (int it = 0; it < nt; ++it)
            for (int ix = 0; ix < nx; ++ix) {
                double wt = kTwoPi * fft_mode(it, nt), wx = kTwoPi * fft_mode(ix, nx);
                if (std::hypot(wt, wx) <= band_tx + 1e-9) modes.emplace_back(it, ix);
            }
        std::vector<VectorXcd> acc(modes.size(), VectorXcd::Zero(nxi));
        for (int ik = 0; ik < nxi; ++ik) {
            for (int it = 0; it < nt; ++it)
                for (int ix = 0; ix < nx; ++ix)
                    plane[static_cast<size_t>(it) * nx + ix] = at(it, ix, ik);
            fft_forward_2d(plane.data(), nt, nx);
            for (size_t m = 0; m < modes.size(); ++m)
                acc[m][ik] = plane[static_cast<size_t>(modes[m].first) * nx + modes[m].second];
        }
        for (size_t m = 0; m < modes.size(); ++m) {
            if (acc[m].lpNorm<Eigen::Infinity>() < 1e-14 * lambda) continue;
            SymbolHarmonic h;
            h.kt = fft_mode(modes[m].first, nt);
            h.kx = fft_mode(modes[m].second, nx);
            h.coeff = std::move(acc[m]);
            spectrum_.push_back(std::move(h));
        }
    }
    mutable std::vector<SymbolHarmonic> spectrum_;
};

/// Positive roots of the frozen quadratic -gamma.(tau,xi)^2 + lam^2*rho in
/// tau. Returns (a, a_tilde) with
///   -gamma.(tau,xi)^2 + lam^2 rho = -g00 (tau + a_tilde)(tau - a).
inline std::pair<double, double> halfwave_roots(double g00, double g01, double g11, double rho,
                                                double lam, double xi) {
    double disc = g01 * xi * g01 * xi + g00 * (lam * lam * rho - g11 * xi * xi);
    if (disc <= 0.0) throw factorization_error("nonpositive discriminant at xi=" + std::to_string(xi));
    double root = std::sqrt(disc);
    return {(-g01 * xi + root) / g00, (g01 * xi + root) / g00};
}

/// Factors the truncated metric into the two half-wave symbols on the
/// (t, x, xi) lattice of the metric grid. Values are faithful for
/// |xi| <= (3/4) lambda and padded with lambda beyond (the extension step
/// overwrites everything above (5/8) lambda anyway).
inline std::pair<SymbolGrid, SymbolGrid> factor_halfwave(const MetricField& metric, double lam) {
    if (!metric.positive_definite())
        throw factorization_error("metric is not positive definite");
    SymbolGrid a, at;
    a.lambda = at.lambda = lam;
    a.delta = at.delta = 1.0;
    a.nt = at.nt = metric.nt;
    a.nx = at.nx = metric.nx;
    a.nxi = at.nxi = metric.nx;
    a.band_tx = at.band_tx = kTwoPi * (std::min(metric.nt, metric.nx) / 2);
    a.xi_valid = at.xi_valid = 0.75 * lam;
    a.values.assign(static_cast<size_t>(a.nt) * a.nx * a.nxi, lam);
    at.values = a.values;
    for (int it = 0; it < a.nt; ++it)
        for (int ix = 0; ix < a.nx; ++ix)
            for (int ik = 0; ik < a.nxi; ++ik) {
                double xi = a.xi_of(ik);
                if (std::abs(xi) > a.xi_valid) continue;
                auto [r, rt] = halfwave_roots(metric.g00(it, ix), metric.g01(it, ix),
                                              metric.g11(it, ix), metric.rho(it, ix), lam, xi);
                a.at(it, ix, ik) = r;
                at.at(it, ix, ik) = rt;
            }
    return {a, at};
}

/// Max over valid nodes of the re-expanded factorization defect at both
/// roots tau = a and tau = -a_tilde, in units of lambda^2.
inline double factorization_residual(const MetricField& metric, const SymbolGrid& a,
                                     const SymbolGrid& at) {
    double worst = 0.0;
    double lam = a.lambda;
    for (int it = 0; it < a.nt; ++it)
        for (int ix = 0; ix < a.nx; ++ix)
            for (int ik = 0; ik < a.nxi; ++ik) {
                double xi = a.xi_of(ik);
                if (std::abs(xi) > a.xi_valid) continue;
                double g00 = metric.g00(it, ix), g01 = metric.g01(it, ix);
                double g11 = metric.g11(it, ix), rho = metric.rho(it, ix);
                double av = a.at(it, ix, ik), atv = at.at(it, ix, ik);
                for (double tau : {av, -atv}) {
                    double quad = -(g00 * tau * tau + 2.0 * g01 * tau * xi + g11 * xi * xi) +
                                  lam * lam * rho;
                    double fact = -g00 * (tau + atv) * (tau - av);
                    worst = std::max(worst, std::abs(quad - fact));
                }
            }
    return worst;
}

struct Acond1Failure {
    int it, ix, ik;
    double value;
    std::string what;
};

/// Verifies size and xi-concavity brackets on |xi| <= (5/8) lambda:
/// a in [lam/4, 4 lam] and the centered second xi-difference in
/// [-4/lam, -1/(4 lam)]. Returns the first offending node, if any.
inline std::optional<Acond1Failure> check_symbol_brackets(const SymbolGrid& s) {
    double lam = s.lambda;
    double h = s.xi_spacing();
    for (int it = 0; it < s.nt; ++it)
        for (int ix = 0; ix < s.nx; ++ix)
            for (int ik = 0; ik < s.nxi; ++ik) {
                double xi = s.xi_of(ik);
                if (std::abs(xi) > 0.625 * lam) continue;
                double v = s.at(it, ix, ik);
                if (v < 0.25 * lam || v > 4.0 * lam)
                    return Acond1Failure{it, ix, ik, v, "size bracket"};
                if (std::abs(xi) > 0.625 * lam - h) continue;  // stencil must stay in range
                int kp = fft_bin(fft_mode(ik, s.nxi) + 1, s.nxi);
                int km = fft_bin(fft_mode(ik, s.nxi) - 1, s.nxi);
                double dd = (s.at(it, ix, kp) - 2.0 * v + s.at(it, ix, km)) / (h * h);
                if (dd > -0.25 / lam || dd < -4.0 / lam)
                    return Acond1Failure{it, ix, ik, dd, "concavity bracket"};
            }
    return std::nullopt;
}

/// Truncates the (t,x) spectrum of every xi slice to |freq| <= cutoff
/// (raised-cosine window) and re-checks the symbol brackets.
inline SymbolGrid mollify_symbol(const SymbolGrid& s, double cutoff) {
    if (kTwoPi * (s.nt / 2) < 2.0 * cutoff || kTwoPi * (s.nx / 2) < 2.0 * cutoff)
        throw resolution_error("symbol grid too coarse for mollification cutoff");
    SymbolGrid out = s;
    out.band_tx = cutoff;
    std::vector<cplx> plane(static_cast<size_t>(s.nt) * s.nx);
    for (int ik = 0; ik < s.nxi; ++ik) {
        for (int it = 0; it < s.nt; ++it)
            for (int ix = 0; ix < s.nx; ++ix)
                plane[static_cast<size_t>(it) * s.nx + ix] = s.at(it, ix, ik);
        fft_forward_2d(plane.data(), s.nt, s.nx);
        for (int it = 0; it < s.nt; ++it) {
            double wt = kTwoPi * fft_mode(it, s.nt);
            for (int ix = 0; ix < s.nx; ++ix) {
                double wx = kTwoPi * fft_mode(ix, s.nx);
                plane[static_cast<size_t>(it) * s.nx + ix] *= lowpass_weight(std::hypot(wt, wx), cutoff);
            }
        }
        fft_inverse_2d(plane.data(), s.nt, s.nx);
        for (int it = 0; it < s.nt; ++it)
            for (int ix = 0; ix < s.nx; ++ix)
                out.at(it, ix, ik) = plane[static_cast<size_t>(it) * s.nx + ix].real();
    }
    if (auto fail = check_symbol_brackets(out))
        throw invariant_error("symbol bracket (" + fail->what + ") violated after mollification at node (" +
                              std::to_string(fail->it) + "," + std::to_string(fail->ix) + "," +
                              std::to_string(fail->ik) + "), value " + std::to_string(fail->value));
    return out;
}

/// Globally extends the symbol in xi: unchanged for |xi| <= (5/8) lambda,
/// identically lambda for |xi| >= (3/4 - c) lambda, with a sin^2 blend in
/// between. Requires c < 1/8 so the blend interval is nonempty. Extending an
/// already extended symbol is a no-op.
inline SymbolGrid extend_symbol(const SymbolGrid& s, double c = 0.1) {
    if (s.extended) return s;
    if (c <= 0.0 || c >= 0.125)
        throw invariant_error("xi-extension needs 0 < c < 1/8, got " + std::to_string(c));
    double lam = s.lambda;
    double lo = 0.625 * lam, hi = (0.75 - c) * lam;
    SymbolGrid out = s;
    out.extended = true;
    out.xi_valid = kTwoPi * (s.nxi / 2);  // whole lattice is now usable
    for (int ik = 0; ik < s.nxi; ++ik) {
        double axi = std::abs(s.xi_of(ik));
        if (axi <= lo) continue;
        double beta = 1.0;
        if (axi < hi) {
            double u = std::sin(0.5 * 3.14159265358979323846 * (axi - lo) / (hi - lo));
            beta = u * u;
        }
        for (int it = 0; it < s.nt; ++it)
            for (int ix = 0; ix < s.nx; ++ix)
                out.at(it, ix, ik) = (1.0 - beta) * s.at(it, ix, ik) + beta * lam;
    }
    return out;
}

/// Seminorm table C[{|alpha|, |beta|}] = sup |d^alpha_{t,x} d^beta_xi a|
/// * lam^{|beta| - delta*max(0,|alpha|-1)} / lam over the lattice with
/// |xi| <= (5/8) lambda, derivatives by centered differences.
inline std::map<std::pair<int, int>, double> symbol_seminorms(const SymbolGrid& s, double delta,
                                                              int max_order) {
    if (max_order > 4) throw resolution_error("seminorm order beyond grid resolution");
    auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
    // centered first/second difference along one axis of the value lattice
    auto deriv = [&](const std::vector<double>& v, int axis, int order) {
        std::vector<double> out(v.size());
        double h = axis == 0 ? 1.0 / s.nt : (axis == 1 ? 1.0 / s.nx : s.xi_spacing());
        for (int it = 0; it < s.nt; ++it)
            for (int ix = 0; ix < s.nx; ++ix)
                for (int ik = 0; ik < s.nxi; ++ik) {
                    auto val = [&](int dt, int dx, int dk) {
                        return v[(static_cast<size_t>(wrap(it + dt, s.nt)) * s.nx +
                                  wrap(ix + dx, s.nx)) * s.nxi + wrap(ik + dk, s.nxi)];
                    };
                    size_t idx = (static_cast<size_t>(it) * s.nx + ix) * s.nxi + ik;
                    int d0 = axis == 0 ? 1 : 0, d1 = axis == 1 ? 1 : 0, d2 = axis == 2 ? 1 : 0;
                    if (order == 1)
                        out[idx] = (val(d0, d1, d2) - val(-d0, -d1, -d2)) / (2.0 * h);
                    else
                        out[idx] = (val(d0, d1, d2) - 2.0 * v[idx] + val(-d0, -d1, -d2)) / (h * h);
                }
        return out;
    };

    std::map<std::pair<int, int>, double> table;
    double lam = s.lambda;
    for (int atot = 0; atot <= max_order; ++atot)
        for (int b = 0; b + atot <= max_order; ++b) {
            double worst = 0.0;
            for (int at = 0; at <= atot; ++at) {
                int ax = atot - at;
                std::vector<double> v = s.values;
                for (int rep = 0; rep < at / 2; ++rep) v = deriv(v, 0, 2);
                if (at % 2) v = deriv(v, 0, 1);
                for (int rep = 0; rep < ax / 2; ++rep) v = deriv(v, 1, 2);
                if (ax % 2) v = deriv(v, 1, 1);
                for (int rep = 0; rep < b / 2; ++rep) v = deriv(v, 2, 2);
                if (b % 2) v = deriv(v, 2, 1);
                // xi-derivatives widen the stencil; keep a safety margin
                double margin = (b > 0 ? b : 0) * s.xi_spacing();
                double sup = 0.0;
                for (int it = 0; it < s.nt; ++it)
                    for (int ix = 0; ix < s.nx; ++ix)
                        for (int ik = 0; ik < s.nxi; ++ik)
                            if (std::abs(s.xi_of(ik)) <= 0.625 * lam - margin)
                                sup = std::max(sup,
                                               std::abs(v[(static_cast<size_t>(it) * s.nx + ix) * s.nxi + ik]));
                worst = std::max(worst, sup);
            }
            double scale = std::pow(lam, b - delta * std::max(0, atot - 1)) / lam;
            table[{atot, b}] = worst * scale;
        }
    return table;
}

/// Convenience pipeline: truncate the metric at c*lam, factor, mollify at
/// c*lam, extend. Returns the propagation symbol a_lam.
inline SymbolGrid build_halfwave_symbol(const MetricField& metric, double lam, double c = 0.1) {
    MetricField trunc = truncate_metric(metric, c * lam);
    auto [a, atilde] = factor_halfwave(trunc, lam);
    (void)atilde;
    SymbolGrid alam = mollify_symbol(a, c * lam);
    return extend_symbol(alam, c);
}

/// The companion tube symbol: same pipeline re-mollified at c*lam^{2/3}.
inline SymbolGrid mollify_to_tube_scale(const SymbolGrid& alam, double c = 0.1) {
    SymbolGrid out = mollify_symbol(alam, c * std::pow(alam.lambda, 2.0 / 3.0));
    out.delta = 2.0 / 3.0;
    return out;
}

}  // namespace clusterlab
