// AVX2 variants of the distance kernels. Only the d == 2 layouts are
// vectorized (the pipeline is planar); anything else forwards to the scalar
// reference implementation. Built with -mavx2 -mfma, selected at runtime.

#include "clumem/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace clumem {

namespace {

// loads points j..j+3 of an xy-interleaved array and splits coordinates
inline void load4_xy(const double* pts, __m256d& xs, __m256d& ys) {
    const __m256d v0 = _mm256_loadu_pd(pts);     // x0 y0 x1 y1
    const __m256d v1 = _mm256_loadu_pd(pts + 4); // x2 y2 x3 y3
    const __m256d t0 = _mm256_permute2f128_pd(v0, v1, 0x20); // x0 y0 x2 y2
    const __m256d t1 = _mm256_permute2f128_pd(v0, v1, 0x31); // x1 y1 x3 y3
    xs = _mm256_unpacklo_pd(t0, t1);
    ys = _mm256_unpackhi_pd(t0, t1);
}

inline double sqdist2(const double* p, const double* q) {
    const double dx = p[0] - q[0];
    const double dy = p[1] - q[1];
    return dx * dx + dy * dy;
}

void sqdist_matrix_avx2(const double* a, std::size_t n, const double* b,
                        std::size_t m, std::size_t d, double* out) {
    if (d != 2) {
        scalar_ops()->sqdist_matrix(a, n, b, m, d, out);
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const __m256d ax = _mm256_set1_pd(a[2 * i]);
        const __m256d ay = _mm256_set1_pd(a[2 * i + 1]);
        double* row = out + i * m;
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) {
            __m256d xs, ys;
            load4_xy(b + 2 * j, xs, ys);
            const __m256d dx = _mm256_sub_pd(xs, ax);
            const __m256d dy = _mm256_sub_pd(ys, ay);
            const __m256d sq = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
            _mm256_storeu_pd(row + j, sq);
        }
        for (; j < m; ++j) row[j] = sqdist2(a + 2 * i, b + 2 * j);
    }
}

std::size_t argmin_sqdist_avx2(const double* p, const double* centers,
                               std::size_t n, std::size_t d,
                               double* sqdist_out) {
    if (d != 2) return scalar_ops()->argmin_sqdist(p, centers, n, d, sqdist_out);
    const __m256d px = _mm256_set1_pd(p[0]);
    const __m256d py = _mm256_set1_pd(p[1]);
    std::size_t best = 0;
    double best_sq = sqdist2(p, centers);
    std::size_t j = 1;
    // ascending scan with strict less-than keeps the smallest-index tie rule
    alignas(32) double buf[4];
    for (; j + 4 <= n; j += 4) {
        __m256d xs, ys;
        load4_xy(centers + 2 * j, xs, ys);
        const __m256d dx = _mm256_sub_pd(xs, px);
        const __m256d dy = _mm256_sub_pd(ys, py);
        const __m256d sq = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
        _mm256_store_pd(buf, sq);
        for (int l = 0; l < 4; ++l) {
            if (buf[l] < best_sq) {
                best_sq = buf[l];
                best = j + static_cast<std::size_t>(l);
            }
        }
    }
    for (; j < n; ++j) {
        const double s = sqdist2(p, centers + 2 * j);
        if (s < best_sq) {
            best_sq = s;
            best = j;
        }
    }
    if (sqdist_out) *sqdist_out = best_sq;
    return best;
}

double pair_norm_sum_avx2(const double* a, const double* wa, std::size_t n,
                          const double* b, const double* wb, std::size_t m,
                          std::size_t d) {
    if (d != 2) return scalar_ops()->pair_norm_sum(a, wa, n, b, wb, m, d);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const __m256d ax = _mm256_set1_pd(a[2 * i]);
        const __m256d ay = _mm256_set1_pd(a[2 * i + 1]);
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) {
            __m256d xs, ys;
            load4_xy(b + 2 * j, xs, ys);
            const __m256d dx = _mm256_sub_pd(xs, ax);
            const __m256d dy = _mm256_sub_pd(ys, ay);
            const __m256d sq = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
            const __m256d norm = _mm256_sqrt_pd(sq);
            acc = _mm256_fmadd_pd(norm, _mm256_loadu_pd(wb + j), acc);
        }
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, acc);
        double row = lanes[0] + lanes[1] + lanes[2] + lanes[3];
        for (; j < m; ++j)
            row += wb[j] * std::sqrt(sqdist2(a + 2 * i, b + 2 * j));
        total += wa[i] * row;
    }
    return total;
}

const Ops kAvx2Ops = {
    "avx2",
    &sqdist_matrix_avx2,
    &argmin_sqdist_avx2,
    &pair_norm_sum_avx2,
};

} // namespace

const Ops* avx2_ops() {
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &kAvx2Ops : nullptr;
}

} // namespace clumem
