#pragma once

// Low-level numeric kernels behind the distance computations. A scalar
// reference implementation always exists; an AVX2 variant is selected at
// runtime when the binary was built with support and the CPU reports the
// feature. Both variants must agree to floating-point noise; the test suite
// enforces this.

#include <cstddef>

namespace clumem {

struct Ops {
    const char* name;

    // out[i*m + j] = squared Euclidean distance between a[i*d..] and b[j*d..]
    void (*sqdist_matrix)(const double* a, std::size_t n, const double* b,
                          std::size_t m, std::size_t d, double* out);

    // index of the center closest to p; ties resolve to the smallest index.
    // *sqdist_out receives the squared distance to that center.
    std::size_t (*argmin_sqdist)(const double* p, const double* centers,
                                 std::size_t n, std::size_t d,
                                 double* sqdist_out);

    // sum_i sum_j wa[i] * wb[j] * ||a_i - b_j||  (energy-distance building block)
    double (*pair_norm_sum)(const double* a, const double* wa, std::size_t n,
                            const double* b, const double* wb, std::size_t m,
                            std::size_t d);
};

const Ops* scalar_ops();

// null when the build has no AVX2 translation unit or the CPU lacks it
const Ops* avx2_ops();

// best available variant, honoring force_scalar
const Ops* active_ops();

// test hook: pin dispatch to the scalar path while true
void force_scalar(bool on);

} // namespace clumem
