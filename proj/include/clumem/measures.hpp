#pragma once

// Sliding-window empirical measures over displacement increments and the
// three distances used by the membership objectives: exact Wasserstein-2,
// Riesz-kernel MMD, and the mean/variance moment distances.

#include <cstdint>
#include <string>
#include <vector>

namespace clumem {

struct EmpiricalMeasure {
    std::size_t d = 0;
    std::vector<double> atoms;   // n x d, row major
    std::vector<double> weights; // n, positive, summing to 1

    std::size_t size() const { return weights.size(); }
    const double* atom(std::size_t i) const { return atoms.data() + i * d; }

    void validate() const; // throws std::invalid_argument
    bool is_uniform(double tol = 1e-12) const;
};

// Window index bounds around center t (1-based) on horizon T:
// lo = max(-k, 1-t), hi = min(k-1, T-t-1). The window is the increment set
// {p_{t+i+1} - p_{t+i} : lo <= i <= hi}, which has 2k elements for interior
// t in [k+1, T-k] and truncates at the boundaries.
std::int64_t window_lo(std::size_t k, std::size_t t, std::size_t T);
std::int64_t window_hi(std::size_t k, std::size_t t, std::size_t T);

// Uniform measure on the windowed increments of a path. `path` points at T
// points of dimension d spaced `stride` doubles apart (stride = d for a
// dense path; larger strides address one trajectory inside an interleaved
// block). t is 1-based.
EmpiricalMeasure window_measure(const double* path, std::size_t T,
                                std::size_t d, std::size_t k, std::size_t t,
                                std::size_t stride);
EmpiricalMeasure window_measure(const std::vector<double>& path, std::size_t T,
                                std::size_t d, std::size_t k, std::size_t t);

// M i.i.d. draws from N(mu, var I) with uniform weights; pure in seed
EmpiricalMeasure gaussian_sample_measure(const std::vector<double>& mu,
                                         double var, std::size_t M,
                                         std::uint64_t seed);

// Exact W2: assignment fast path for uniform equal-size inputs, otherwise
// the transportation solver on the squared-distance cost matrix.
double wasserstein2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Riesz-kernel MMD, K(x,y) = -||x-y||; the squared form is clamped at zero
// before the root since it is a difference of large terms
double mmd_riesz(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

struct MvDist {
    double d_mean = 0.0;
    double d_var = 0.0;
};

// moment distances: ||E mu - E nu|| and |sqrt(det cov mu) - sqrt(det cov nu)|
MvDist mv_distances(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);
// analytic comparand N(m, var I): moments used in closed form
MvDist mv_distances(const EmpiricalMeasure& mu, const std::vector<double>& m,
                    double var);

// weighted mean and weighted population covariance (d x d, row major)
void measure_moments(const EmpiricalMeasure& mu, std::vector<double>& mean,
                     std::vector<double>& cov);
// sqrt of the determinant of a PSD covariance, clamped at zero
double sqrt_cov_det(const std::vector<double>& cov, std::size_t d);

// debug dump, header x,y,w (d == 2 only)
void dump_measure_csv(const EmpiricalMeasure& mu, const std::string& path);

} // namespace clumem
