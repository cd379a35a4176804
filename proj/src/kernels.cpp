#include "clumem/kernels.hpp"

#include <atomic>
#include <cmath>

namespace clumem {

namespace {

void sqdist_matrix_scalar(const double* a, std::size_t n, const double* b,
                          std::size_t m, std::size_t d, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a + i * d;
        double* row = out + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double* bj = b + j * d;
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = ai[c] - bj[c];
                s += diff * diff;
            }
            row[j] = s;
        }
    }
}

std::size_t argmin_sqdist_scalar(const double* p, const double* centers,
                                 std::size_t n, std::size_t d,
                                 double* sqdist_out) {
    std::size_t best = 0;
    double best_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double* c = centers + j * d;
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = p[k] - c[k];
            s += diff * diff;
        }
        if (j == 0 || s < best_sq) {
            best_sq = s;
            best = j;
        }
    }
    if (sqdist_out) *sqdist_out = best_sq;
    return best;
}

double pair_norm_sum_scalar(const double* a, const double* wa, std::size_t n,
                            const double* b, const double* wb, std::size_t m,
                            std::size_t d) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a + i * d;
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double* bj = b + j * d;
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = ai[c] - bj[c];
                s += diff * diff;
            }
            row += wb[j] * std::sqrt(s);
        }
        total += wa[i] * row;
    }
    return total;
}

const Ops kScalarOps = {
    "scalar",
    &sqdist_matrix_scalar,
    &argmin_sqdist_scalar,
    &pair_norm_sum_scalar,
};

std::atomic<bool> g_force_scalar{false};

} // namespace

const Ops* scalar_ops() { return &kScalarOps; }

#if !defined(CLUMEM_HAVE_AVX2)
const Ops* avx2_ops() { return nullptr; }
#endif

const Ops* active_ops() {
    if (g_force_scalar.load(std::memory_order_relaxed)) return &kScalarOps;
    if (const Ops* v = avx2_ops()) return v;
    return &kScalarOps;
}

void force_scalar(bool on) {
    g_force_scalar.store(on, std::memory_order_relaxed);
}

} // namespace clumem
