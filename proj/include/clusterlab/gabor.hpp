#pragma once

// The lam^{2/3}-scaled tight Gabor frame on the periodic grid.
//
// Unit-scale window: phi_hat = sqrt(b) with b a raised-cosine partition,
//   b = 1 on |s| <= 7/8, b = cos^2(2 pi (|s| - 7/8)) on 7/8 <= |s| <= 9/8,
// so that sum_n |phi_hat(s - 2n)|^2 == 1 identically.
//
// Discretization: the position count per period is M = round(lam^{2/3}) and
// the frequency scale W equals M (the rounding is recorded on the frame).
// Frame elements, indexed by position m in [0,M) and modulation n,
//   phi_hat_{m,n}(k) = M^{-1/2} phi_hat((2 pi k - 2 W n)/W) e^{-2 pi i k m / M},
// form a Parseval frame on every field whose spectrum the modulation range
// covers: sum_T |<phi_T, f>|^2 = ||f||_2^2 exactly.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "clusterlab/errors.hpp"
#include "clusterlab/grid.hpp"

namespace clusterlab {

/// Raised-cosine spectral partition b(s).
inline double window_b(double s) {
    double a = std::abs(s);
    if (a <= 0.875) return 1.0;
    if (a >= 1.125) return 0.0;
    double c = std::cos(kTwoPi * (a - 0.875));
    return c * c;
}

inline double window_phi_hat(double s) { return std::sqrt(window_b(s)); }

/// sum_n b(s - 2n); equals 1 for every s.
inline double window_square_sum(double s) {
    double acc = 0.0;
    int n0 = static_cast<int>(std::floor(s / 2.0));
    for (int n = n0 - 2; n <= n0 + 2; ++n) acc += window_b(s - 2.0 * n);
    return acc;
}

struct GaborCoefficients {
    int positions = 0;
    int n_min = 0, n_max = 0;
    MatrixXcd c;  // (m, n - n_min)

    cplx at(int m, int n) const { return c(m, n - n_min); }
    double energy() const { return c.squaredNorm(); }

    struct Entry {
        int m, n;
        cplx value;
    };
    /// Sparse view; magnitudes below the threshold are dropped.
    std::vector<Entry> entries(double threshold = 1e-14) const {
        std::vector<Entry> out;
        for (int n = n_min; n <= n_max; ++n)
            for (int m = 0; m < positions; ++m)
                if (std::abs(at(m, n)) > threshold) out.push_back({m, n, at(m, n)});
        return out;
    }
};

class GaborFrame {
public:
    /// Frame for fields of size n on [0,1), band-limited to |xi| <= band
    /// (default (3/4) lam). Modulation indices are clipped to ceil(lam^{1/3}).
    GaborFrame(double lam, int n, double band = 0.0) : lambda_(lam), n_(n) {
        positions_ = static_cast<int>(std::lround(std::pow(lam, 2.0 / 3.0)));
        freq_scale_ = static_cast<double>(positions_);
        if (band <= 0.0) band = 0.75 * lam;
        int n_cap = static_cast<int>(std::ceil(std::cbrt(lam)));
        // cover every bump that meets the band, then pad by one for the rolloff
        int need = static_cast<int>(std::ceil((band / freq_scale_ + 1.125) / 2.0)) + 1;
        half_range_ = std::min(n_cap, need);
        window_k_.resize(2 * half_range_ + 1);
        for (int n_idx = -half_range_; n_idx <= half_range_; ++n_idx) {
            VectorXd w(n_);
            for (int i = 0; i < n_; ++i)
                w[i] = window_phi_hat((kTwoPi * fft_mode(i, n_) - xi_center(n_idx)) / freq_scale_);
            window_k_[n_idx + half_range_] = std::move(w);
        }
        // largest |xi| where the clipped modulation range still sums to one
        band_covered_ = (2.0 * half_range_ + 0.875) * freq_scale_;
    }

    double lambda() const { return lambda_; }
    int grid_size() const { return n_; }
    int positions() const { return positions_; }
    double x_spacing() const { return 1.0 / positions_; }
    double freq_scale() const { return freq_scale_; }
    double xi_spacing() const { return 2.0 * freq_scale_; }
    int n_min() const { return -half_range_; }
    int n_max() const { return half_range_; }
    double band_covered() const { return band_covered_; }

    double x_center(int m) const { return static_cast<double>(m) / positions_; }
    double xi_center(int n_idx) const { return 2.0 * freq_scale_ * n_idx; }

    /// phi_hat values over the xi lattice for modulation index n (no phase).
    const VectorXd& window_on_lattice(int n_idx) const { return window_k_[n_idx + half_range_]; }

    /// Grid samples of the frame element phi_{m,n}.
    VectorXcd packet(int m, int n_idx) const {
        const VectorXd& w = window_on_lattice(n_idx);
        VectorXcd hat(n_);
        double scale = 1.0 / std::sqrt(static_cast<double>(positions_));
        for (int i = 0; i < n_; ++i) {
            double phase = -kTwoPi * fft_mode(i, n_) * m / static_cast<double>(positions_);
            hat[i] = scale * w[i] * std::polar(1.0, phase);
        }
        return ifft_of(hat);
    }

    /// Frame element normalized to unit L2 norm.
    VectorXcd unit_packet(int m, int n_idx) const {
        VectorXcd p = packet(m, n_idx);
        return p / l2_norm(p);
    }

    double packet_norm(int n_idx) const {
        const VectorXd& w = window_on_lattice(n_idx);
        return std::sqrt(w.squaredNorm() / positions_);
    }

    /// Analysis: c_{m,n} = <phi_{m,n}, f>. Computed per modulation index by
    /// folding the windowed spectrum mod M and one inverse DFT of length M.
    GaborCoefficients analyze(const VectorXcd& f) const {
        if (f.size() != n_) throw band_error("analyze: field length mismatch");
        VectorXcd fhat = fft_of(f);
        double outside = 0.0, total = 0.0;
        for (int i = 0; i < n_; ++i) {
            double m2 = std::norm(fhat[i]);
            total += m2;
            if (std::abs(kTwoPi * fft_mode(i, n_)) > band_covered_) outside += m2;
        }
        if (total > 0 && outside / total > 1e-8)
            throw band_error("analyze: field exceeds the band covered by the frame");

        GaborCoefficients out;
        out.positions = positions_;
        out.n_min = -half_range_;
        out.n_max = half_range_;
        out.c.resize(positions_, 2 * half_range_ + 1);
        double scale = 1.0 / std::sqrt(static_cast<double>(positions_));
        std::vector<cplx> fold(positions_);
        for (int n_idx = -half_range_; n_idx <= half_range_; ++n_idx) {
            const VectorXd& w = window_on_lattice(n_idx);
            std::fill(fold.begin(), fold.end(), cplx(0, 0));
            for (int i = 0; i < n_; ++i) {
                if (w[i] == 0.0) continue;
                int r = ((fft_mode(i, n_) % positions_) + positions_) % positions_;
                fold[r] += w[i] * fhat[i];
            }
            fft_inverse(fold.data(), positions_);
            for (int m = 0; m < positions_; ++m) out.c(m, n_idx + half_range_) = scale * fold[m];
        }
        return out;
    }

    /// Synthesis: f = sum_{m,n} c_{m,n} phi_{m,n}.
    VectorXcd synthesize(const GaborCoefficients& coeffs) const {
        if (coeffs.positions != positions_) throw band_error("synthesize: position count mismatch");
        VectorXcd fhat = VectorXcd::Zero(n_);
        double scale = 1.0 / std::sqrt(static_cast<double>(positions_));
        std::vector<cplx> chat(positions_);
        for (int n_idx = coeffs.n_min; n_idx <= coeffs.n_max; ++n_idx) {
            if (n_idx < -half_range_ || n_idx > half_range_) continue;
            for (int m = 0; m < positions_; ++m) chat[m] = coeffs.at(m, n_idx);
            fft_forward(chat.data(), positions_);  // (1/M) sum_m c e^{-2 pi i r m / M}
            const VectorXd& w = window_on_lattice(n_idx);
            for (int i = 0; i < n_; ++i) {
                if (w[i] == 0.0) continue;
                int r = ((fft_mode(i, n_) % positions_) + positions_) % positions_;
                fhat[i] += scale * w[i] * static_cast<double>(positions_) * chat[r];
            }
        }
        return ifft_of(fhat);
    }

private:
    double lambda_;
    int n_;
    int positions_;
    double freq_scale_;
    int half_range_;
    double band_covered_;
    std::vector<VectorXd> window_k_;
};

}  // namespace clusterlab
