#pragma once

// Discrete Weyl quantization on the periodic grid. The dense matrix is
//   A[j,l] = (1/n) sum_k a((x_j + x_l)/2, xi_k) exp(i (x_j - x_l) xi_k),
// midpoint values obtained by band-limited (trigonometric) interpolation of
// the sampled symbol. A matrix-free applier built from the symbol's (t,x)
// harmonics reproduces the same matrix exactly and is what the propagator
// uses: for a symbol harmonic e^{2 pi i kappa x} m(xi) the contribution is
// D_kappa F^{-1} diag(m) F D_kappa with D_kappa = diag(e^{i pi kappa x_j}).

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "clusterlab/errors.hpp"
#include "clusterlab/grid.hpp"
#include "clusterlab/symbol.hpp"

namespace clusterlab {

/// L2->L2 operator norm by power iteration on A^H A (deterministic start).
inline double operator_norm(const MatrixXcd& a, int iters = 60) {
    const int n = static_cast<int>(a.cols());
    VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(1.0 + 0.37 * std::sin(2.1 * i + 0.5), 0.11 * std::cos(1.3 * i));
    v.normalize();
    double s = 0.0;
    for (int it = 0; it < iters; ++it) {
        VectorXcd w = a.adjoint() * (a * v);
        double nw = w.norm();
        if (nw == 0.0) return 0.0;
        v = w / nw;
        s = nw;
    }
    return std::sqrt(s);
}

struct WeylOperator {
    MatrixXcd matrix;
    double time = 0.0;
    double lambda = 0.0;
    double hermitian_defect = 0.0;

    VectorXcd apply(const VectorXcd& f) const {
        if (f.size() != matrix.cols()) throw band_error("apply: length mismatch");
        return matrix * f;
    }
    double norm_bound() const { return operator_norm(matrix); }
};

namespace detail {

/// Midpoint table: values of the symbol column a(., xi_k) on the doubled
/// grid x = s/(2n), via zero-padded inverse FFT.
inline void half_grid_column(const VectorXcd& col_hat, int n, std::vector<cplx>& out2n) {
    out2n.assign(static_cast<size_t>(2 * n), cplx(0, 0));
    for (int i = 0; i < n; ++i) {
        int k = fft_mode(i, n);
        if (k == -n / 2) {  // split the Nyquist coefficient evenly
            out2n[fft_bin(-n / 2, 2 * n)] += 0.5 * col_hat[i];
            out2n[fft_bin(n / 2, 2 * n)] += 0.5 * col_hat[i];
        } else {
            out2n[fft_bin(k, 2 * n)] = col_hat[i];
        }
    }
    fft_inverse(out2n.data(), 2 * n);
}

inline double hermitian_defect_of(const MatrixXcd& a) {
    double na = a.norm();
    return na > 0 ? (a - a.adjoint()).norm() / na : 0.0;
}

}  // namespace detail

/// Dense Weyl matrix from symbol samples sigma(ix, ik) at one time.
inline WeylOperator build_weyl(const Eigen::MatrixXd& sigma, double lam, double time = 0.0) {
    const int n = static_cast<int>(sigma.rows());
    if (sigma.cols() != n) throw band_error("build_weyl: xi lattice must match the grid lattice");
    // interpolate each xi column onto the doubled x grid
    Eigen::MatrixXcd half(2 * n, n);  // (s, k)
    VectorXcd col(n);
    std::vector<cplx> interp;
    for (int ik = 0; ik < n; ++ik) {
        for (int ix = 0; ix < n; ++ix) col[ix] = sigma(ix, ik);
        fft_forward(col.data(), n);
        detail::half_grid_column(col, n, interp);
        for (int s = 0; s < 2 * n; ++s) half(s, ik) = interp[s];
    }
    // G(d, s) = (1/n) sum_k half(s, k) e^{2 pi i k d / n}: inverse FFT over k
    Eigen::MatrixXcd g(2 * n, n);
    VectorXcd row(n);
    for (int s = 0; s < 2 * n; ++s) {
        for (int ik = 0; ik < n; ++ik) row[ik] = half(s, ik) / static_cast<double>(n);
        fft_inverse(row.data(), n);
        for (int d = 0; d < n; ++d) g(s, d) = row[d];
    }
    WeylOperator op;
    op.lambda = lam;
    op.time = time;
    op.matrix.resize(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            op.matrix(j, l) = g((j + l) % (2 * n), (j - l + n) % n);
    op.hermitian_defect = detail::hermitian_defect_of(op.matrix);
    return op;
}

/// Dense Weyl matrix with exact midpoint evaluation of a callable symbol.
inline WeylOperator build_weyl(const std::function<double(double, double)>& symbol, int n,
                               double lam, double time = 0.0) {
    Grid1D grid{n, 1.0};
    WeylOperator op;
    op.lambda = lam;
    op.time = time;
    op.matrix.resize(n, n);
    // G(d, s) with exact half-grid symbol values
    Eigen::MatrixXcd g(2 * n, n);
    VectorXcd row(n);
    for (int s = 0; s < 2 * n; ++s) {
        double xm = static_cast<double>(s) / (2 * n);
        for (int ik = 0; ik < n; ++ik) row[ik] = symbol(xm, grid.xi(ik)) / static_cast<double>(n);
        fft_inverse(row.data(), n);
        for (int d = 0; d < n; ++d) g(s, d) = row[d];
    }
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            op.matrix(j, l) = g((j + l) % (2 * n), (j - l + n) % n);
    op.hermitian_defect = detail::hermitian_defect_of(op.matrix);
    return op;
}

/// Dense Weyl matrix for a symbol grid frozen at time t.
inline WeylOperator build_weyl(const SymbolGrid& s, double time) {
    return build_weyl(s.slice_at(time), s.lambda, time);
}

/// Matrix-free Weyl application for (t,x) band-limited symbols. freeze(t)
/// re-evaluates the time dependence; apply() then acts in O(bands * n log n).
class FastWeylApplier {
public:
    FastWeylApplier(const SymbolGrid& s, int n) : n_(n), lambda_(s.lambda) {
        if (s.nxi != n) throw band_error("applier: xi lattice must match the grid");
        std::map<int, std::vector<const SymbolHarmonic*>> by_kx;
        for (const auto& h : s.spectrum()) by_kx[h.kx].push_back(&h);
        for (auto& [kx, hs] : by_kx) {
            Band b;
            b.kx = kx;
            for (const auto* h : hs) b.t_terms.emplace_back(h->kt, h->coeff);
            b.phase.resize(n);
            for (int j = 0; j < n; ++j)
                b.phase[j] = std::polar(1.0, 3.14159265358979323846 * kx * j / static_cast<double>(n));
            b.mult = VectorXcd::Zero(n);
            bands_.push_back(std::move(b));
        }
        tmp_.resize(n);
        freeze(0.0);
    }

    void freeze(double t) {
        for (auto& b : bands_) {
            b.mult.setZero();
            for (const auto& [kt, coeff] : b.t_terms)
                b.mult += std::polar(1.0, kTwoPi * kt * t) * coeff;
        }
        frozen_time_ = t;
    }

    double frozen_time() const { return frozen_time_; }
    double lambda() const { return lambda_; }
    int size() const { return n_; }

    void apply(const VectorXcd& in, VectorXcd& out) const {
        out.setZero();
        for (const auto& b : bands_) {
            if (b.kx == 0) {
                tmp_ = in;
            } else {
                tmp_ = b.phase.cwiseProduct(in);
            }
            fft_forward(tmp_.data(), n_);
            tmp_ = tmp_.cwiseProduct(b.mult);
            fft_inverse(tmp_.data(), n_);
            if (b.kx == 0) {
                out += tmp_;
            } else {
                out += b.phase.cwiseProduct(tmp_);
            }
        }
    }

    VectorXcd apply(const VectorXcd& in) const {
        VectorXcd out(n_);
        apply(in, out);
        return out;
    }

private:
    struct Band {
        int kx;
        std::vector<std::pair<int, VectorXcd>> t_terms;
        VectorXcd phase;
        VectorXcd mult;
    };
    int n_;
    double lambda_;
    double frozen_time_ = 0.0;
    std::vector<Band> bands_;
    mutable VectorXcd tmp_;
};

/// || a^w b^w - (ab)^w ||_{L2->L2} * lambda at a frozen time; the first
/// order composition calculus says this stays O(1) under refinement.
inline double composition_defect(const SymbolGrid& a, const SymbolGrid& b, double time) {
    if (a.nx != b.nx || a.nxi != b.nxi) throw band_error("composition: mismatched lattices");
    Eigen::MatrixXd sa = a.slice_at(time), sb = b.slice_at(time);
    WeylOperator wa = build_weyl(sa, a.lambda, time);
    WeylOperator wb = build_weyl(sb, b.lambda, time);
    WeylOperator wab = build_weyl((sa.array() * sb.array()).matrix(), a.lambda, time);
    MatrixXcd defect = wa.matrix * wb.matrix - wab.matrix;
    return operator_norm(defect) * a.lambda;
}

}  // namespace clusterlab
