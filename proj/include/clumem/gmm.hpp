#pragma once

// Two-mode isotropic Gaussian mixture fitted to displacement increments by
// EM, plus a pooled maximum-likelihood estimate of cluster motion.

#include <cstddef>
#include <vector>

namespace clumem {

struct SimulationRecord;

struct GmmParams {
    double alpha_in = 0.5;
    double alpha_out = 0.5;
    std::vector<double> mu_in;
    std::vector<double> mu_out;
    double var_in = 1.0;
    double var_out = 1.0;

    std::size_t dim() const { return mu_in.size(); }
    void validate() const; // throws std::invalid_argument
};

struct EmFitReport {
    GmmParams params;
    std::vector<double> loglik_trace; // one entry per E-step
    std::size_t iterations = 0;       // M-steps performed
    bool converged = false;
};

// isotropic density; normalization (2 pi var)^(-d/2)
double gaussian_pdf(const double* x, const double* mu, std::size_t d, double var);
double log_gaussian_pdf(const double* x, const double* mu, std::size_t d, double var);

// Deterministic symmetry-breaking init: equal weights, means at the sample
// mean +- one pooled stddev along the first axis, variances at half and
// twice the pooled variance.
GmmParams default_em_init(const double* x, std::size_t n, std::size_t d);

EmFitReport em_fit(const double* x, std::size_t n, std::size_t d,
                   const GmmParams& init, double tol = 1e-8,
                   std::size_t max_iter = 500);
EmFitReport em_fit(const double* x, std::size_t n, std::size_t d);
EmFitReport em_fit(const std::vector<double>& x, std::size_t d);

struct ClusterMotion {
    std::vector<double> mean;
    double var = 0.0;
};

// pooled MLE over the given increments (n x d)
ClusterMotion estimate_cluster_motion(const double* increments, std::size_t n,
                                      std::size_t d);
// pooled over all N clusters and T-1 steps of a record
ClusterMotion estimate_cluster_motion(const SimulationRecord& record);

// the particle's T-1 displacement increments, flattened
std::vector<double> particle_increments(const SimulationRecord& record);

} // namespace clumem
