#pragma once

// Thin RAII layer over FFTW with a process-wide plan cache.
//
// Conventions used throughout the library:
//   forward:  fhat[k] = (1/n) sum_j f[j] exp(-2*pi*i*k*j/n)
//   inverse:  f[j]    =       sum_k fhat[k] exp(+2*pi*i*k*j/n)
// so that `inverse(forward(f)) == f` and Parseval reads
//   (1/n) sum_j |f[j]|^2 == sum_k |fhat[k]|^2.
// Plans are created with FFTW_ESTIMATE only: planning is then a pure
// function of the size, and transform results are run-to-run identical.

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace clusterlab {

using cplx = std::complex<double>;

namespace detail {

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        // Template buffer just for planning; execution uses new-array calls.
        fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
        fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!p) throw std::runtime_error("fftw planning failed for n=" + std::to_string(n));
        plans_.emplace(key, p);
        return p;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& kv : plans_) fftw_destroy_plan(kv.second);
    }
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline void execute(int n, int sign, cplx* data) {
    fftw_plan p = PlanCache::instance().get(n, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

}  // namespace detail

/// In-place forward DFT with 1/n normalization.
inline void fft_forward(cplx* data, int n) {
    detail::execute(n, FFTW_FORWARD, data);
    const double s = 1.0 / n;
    for (int i = 0; i < n; ++i) data[i] *= s;
}

/// In-place inverse DFT (no normalization; inverts fft_forward).
inline void fft_inverse(cplx* data, int n) {
    detail::execute(n, FFTW_BACKWARD, data);
}

inline void fft_forward(std::vector<cplx>& v) { fft_forward(v.data(), static_cast<int>(v.size())); }
inline void fft_inverse(std::vector<cplx>& v) { fft_inverse(v.data(), static_cast<int>(v.size())); }

/// Signed mode number for FFT bin i of an n-point transform.
inline int fft_mode(int i, int n) { return (i <= n / 2 - 1) ? i : i - n; }

/// FFT bin holding signed mode k (k in [-n/2, n/2-1]).
inline int fft_bin(int k, int n) { return (k >= 0) ? k : k + n; }

/// 2D forward DFT on row-major (nr x nc) data, normalized by 1/(nr*nc).
inline void fft_forward_2d(cplx* data, int nr, int nc) {
    for (int r = 0; r < nr; ++r) detail::execute(nc, FFTW_FORWARD, data + static_cast<size_t>(r) * nc);
    std::vector<cplx> col(nr);
    for (int c = 0; c < nc; ++c) {
        for (int r = 0; r < nr; ++r) col[r] = data[static_cast<size_t>(r) * nc + c];
        detail::execute(nr, FFTW_FORWARD, col.data());
        for (int r = 0; r < nr; ++r) data[static_cast<size_t>(r) * nc + c] = col[r];
    }
    const double s = 1.0 / (static_cast<double>(nr) * nc);
    const size_t total = static_cast<size_t>(nr) * nc;
    for (size_t i = 0; i < total; ++i) data[i] *= s;
}

inline void fft_inverse_2d(cplx* data, int nr, int nc) {
    for (int r = 0; r < nr; ++r) detail::execute(nc, FFTW_BACKWARD, data + static_cast<size_t>(r) * nc);
    std::vector<cplx> col(nr);
    for (int c = 0; c < nc; ++c) {
        for (int r = 0; r < nr; ++r) col[r] = data[static_cast<size_t>(r) * nc + c];
        detail::execute(nr, FFTW_BACKWARD, col.data());
        for (int r = 0; r < nr; ++r) data[static_cast<size_t>(r) * nc + c] = col[r];
    }
}

}  // namespace clusterlab
