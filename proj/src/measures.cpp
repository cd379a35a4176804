#include "clumem/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "clumem/kernels.hpp"
#include "clumem/ot.hpp"
#include "clumem/rng.hpp"

namespace clumem {

void EmpiricalMeasure::validate() const {
    if (d == 0) throw std::invalid_argument("measure: dimension is zero");
    if (weights.empty() || atoms.size() != weights.size() * d)
        throw std::invalid_argument("measure: atom/weight shape mismatch");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("measure: weights must be positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("measure: weights must sum to 1");
}

bool EmpiricalMeasure::is_uniform(double tol) const {
    if (weights.empty()) return false;
    const double w0 = 1.0 / static_cast<double>(weights.size());
    for (double w : weights)
        if (std::abs(w - w0) > tol) return false;
    return true;
}

std::int64_t window_lo(std::size_t k, std::size_t t, std::size_t) {
    return std::max<std::int64_t>(-static_cast<std::int64_t>(k),
                                  1 - static_cast<std::int64_t>(t));
}

std::int64_t window_hi(std::size_t k, std::size_t t, std::size_t T) {
    return std::min<std::int64_t>(static_cast<std::int64_t>(k) - 1,
                                  static_cast<std::int64_t>(T) -
                                      static_cast<std::int64_t>(t) - 1);
}

EmpiricalMeasure window_measure(const double* path, std::size_t T,
                                std::size_t d, std::size_t k, std::size_t t,
                                std::size_t stride) {
    if (T < 2) throw std::invalid_argument("window_measure: need T >= 2");
    if (k == 0) throw std::invalid_argument("window_measure: need k >= 1");
    if (t < 1 || t > T) throw std::invalid_argument("window_measure: t out of range");
    const std::int64_t lo = window_lo(k, t, T);
    const std::int64_t hi = window_hi(k, t, T);
    if (hi < lo) throw std::invalid_argument("window_measure: empty window");

    EmpiricalMeasure out;
    out.d = d;
    const std::size_t count = static_cast<std::size_t>(hi - lo + 1);
    out.atoms.reserve(count * d);
    out.weights.assign(count, 1.0 / static_cast<double>(count));
    for (std::int64_t i = lo; i <= hi; ++i) {
        // increment p_{t+i+1} - p_{t+i}; stored positions are 0-based
        const std::size_t hi_idx = static_cast<std::size_t>(
            static_cast<std::int64_t>(t) + i); // (t+i+1) - 1
        const double* a = path + (hi_idx - 1) * stride;
        const double* b = path + hi_idx * stride;
        for (std::size_t c = 0; c < d; ++c) out.atoms.push_back(b[c] - a[c]);
    }
    return out;
}

EmpiricalMeasure window_measure(const std::vector<double>& path, std::size_t T,
                                std::size_t d, std::size_t k, std::size_t t) {
    if (path.size() != T * d)
        throw std::invalid_argument("window_measure: path size mismatch");
    return window_measure(path.data(), T, d, k, t, d);
}

EmpiricalMeasure gaussian_sample_measure(const std::vector<double>& mu,
                                         double var, std::size_t M,
                                         std::uint64_t seed) {
    if (M < 1) throw std::invalid_argument("gaussian_sample_measure: M >= 1 required");
    if (!(var >= 0.0)) throw std::invalid_argument("gaussian_sample_measure: var < 0");
    const std::size_t d = mu.size();
    if (d == 0) throw std::invalid_argument("gaussian_sample_measure: empty mean");
    EmpiricalMeasure out;
    out.d = d;
    out.atoms.resize(M * d);
    out.weights.assign(M, 1.0 / static_cast<double>(M));
    Stream stream(seed, 0, "gaussian-sample");
    const double sd = std::sqrt(var);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t c = 0; c < d; ++c)
            out.atoms[i * d + c] = mu[c] + sd * stream.gaussian();
    return out;
}

double wasserstein2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    mu.validate();
    nu.validate();
    if (mu.d != nu.d) throw std::invalid_argument("wasserstein2: dimension mismatch");
    double wsum_mu = 0.0, wsum_nu = 0.0;
    for (double w : mu.weights) wsum_mu += w;
    for (double w : nu.weights) wsum_nu += w;
    if (std::abs(wsum_mu - wsum_nu) > 1e-9)
        throw std::invalid_argument("wasserstein2: weight sums differ");

    const std::size_t n = mu.size(), m = nu.size();
    std::vector<double> cost(n * m);
    active_ops()->sqdist_matrix(mu.atoms.data(), n, nu.atoms.data(), m, mu.d,
                                cost.data());

    double total; // squared cost under the optimal plan
    if (n == m && mu.is_uniform() && nu.is_uniform()) {
        // uniform equal-size case: an optimal plan is a permutation
        total = ot::assignment(cost.data(), n).cost / static_cast<double>(n);
    } else {
        total = ot::transport(mu.weights.data(), n, nu.weights.data(), m,
                              cost.data())
                    .cost;
    }
    return std::sqrt(std::max(total, 0.0));
}

double mmd_riesz(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    mu.validate();
    nu.validate();
    if (mu.d != nu.d) throw std::invalid_argument("mmd_riesz: dimension mismatch");
    const Ops* ops = active_ops();
    const double e_xy =
        ops->pair_norm_sum(mu.atoms.data(), mu.weights.data(), mu.size(),
                           nu.atoms.data(), nu.weights.data(), nu.size(), mu.d);
    const double e_xx =
        ops->pair_norm_sum(mu.atoms.data(), mu.weights.data(), mu.size(),
                           mu.atoms.data(), mu.weights.data(), mu.size(), mu.d);
    const double e_yy =
        ops->pair_norm_sum(nu.atoms.data(), nu.weights.data(), nu.size(),
                           nu.atoms.data(), nu.weights.data(), nu.size(), nu.d);
    const double sq = 2.0 * e_xy - e_xx - e_yy;
    return std::sqrt(std::max(sq, 0.0));
}

void measure_moments(const EmpiricalMeasure& mu, std::vector<double>& mean,
                     std::vector<double>& cov) {
    const std::size_t d = mu.d, n = mu.size();
    mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c)
            mean[c] += mu.weights[i] * mu.atoms[i * d + c];
    cov.assign(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = mu.weights[i];
        const double* x = mu.atom(i);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                cov[a * d + b] += w * (x[a] - mean[a]) * (x[b] - mean[b]);
    }
}

double sqrt_cov_det(const std::vector<double>& cov, std::size_t d) {
    double det;
    if (d == 1) {
        det = cov[0];
    } else if (d == 2) {
        det = cov[0] * cov[3] - cov[1] * cov[2];
    } else {
        // small dense LU with partial pivoting
        std::vector<double> a = cov;
        det = 1.0;
        for (std::size_t col = 0; col < d; ++col) {
            std::size_t piv = col;
            for (std::size_t row = col + 1; row < d; ++row)
                if (std::abs(a[row * d + col]) > std::abs(a[piv * d + col]))
                    piv = row;
            if (piv != col) {
                for (std::size_t c = 0; c < d; ++c)
                    std::swap(a[col * d + c], a[piv * d + c]);
                det = -det;
            }
            const double p = a[col * d + col];
            if (p == 0.0) return 0.0;
            det *= p;
            for (std::size_t row = col + 1; row < d; ++row) {
                const double f = a[row * d + col] / p;
                for (std::size_t c = col; c < d; ++c)
                    a[row * d + c] -= f * a[col * d + c];
            }
        }
    }
    return std::sqrt(std::max(det, 0.0));
}

MvDist mv_distances(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    mu.validate();
    nu.validate();
    if (mu.d != nu.d) throw std::invalid_argument("mv_distances: dimension mismatch");
    std::vector<double> ma, ca, mb, cb;
    measure_moments(mu, ma, ca);
    measure_moments(nu, mb, cb);
    MvDist out;
    double sq = 0.0;
    for (std::size_t c = 0; c < mu.d; ++c) {
        const double diff = ma[c] - mb[c];
        sq += diff * diff;
    }
    out.d_mean = std::sqrt(sq);
    out.d_var = std::abs(sqrt_cov_det(ca, mu.d) - sqrt_cov_det(cb, mu.d));
    return out;
}

MvDist mv_distances(const EmpiricalMeasure& mu, const std::vector<double>& m,
                    double var) {
    mu.validate();
    if (mu.d != m.size())
        throw std::invalid_argument("mv_distances: dimension mismatch");
    if (!(var >= 0.0)) throw std::invalid_argument("mv_distances: var < 0");
    std::vector<double> ma, ca;
    measure_moments(mu, ma, ca);
    MvDist out;
    double sq = 0.0;
    for (std::size_t c = 0; c < mu.d; ++c) {
        const double diff = ma[c] - m[c];
        sq += diff * diff;
    }
    out.d_mean = std::sqrt(sq);
    // det(var I) = var^d, so its root is var^(d/2)
    out.d_var = std::abs(sqrt_cov_det(ca, mu.d) -
                         std::pow(var, 0.5 * static_cast<double>(mu.d)));
    return out;
}

void dump_measure_csv(const EmpiricalMeasure& mu, const std::string& path) {
    mu.validate();
    if (mu.d != 2)
        throw std::invalid_argument("dump_measure_csv: d == 2 required");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("dump_measure_csv: cannot open " + path);
    f << "x,y,w\n";
    char buf[3 * 32 + 8];
    for (std::size_t i = 0; i < mu.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", mu.atoms[i * 2],
                      mu.atoms[i * 2 + 1], mu.weights[i]);
        f << buf;
    }
    if (!f) throw std::runtime_error("dump_measure_csv: write failed");
}

} // namespace clumem
