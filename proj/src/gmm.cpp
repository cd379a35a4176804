#include "clumem/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "clumem/sim.hpp"

namespace clumem {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kVarFloor = 1e-10;
} // namespace

void GmmParams::validate() const {
    if (mu_in.size() != mu_out.size() || mu_in.empty())
        throw std::invalid_argument("gmm: mean vectors must share a positive dimension");
    if (!(alpha_in >= 0.0) || !(alpha_out >= 0.0))
        throw std::invalid_argument("gmm: weights must be nonnegative");
    if (std::abs(alpha_in + alpha_out - 1.0) > 1e-12)
        throw std::invalid_argument("gmm: weights must sum to 1");
    if (!(var_in > 0.0) || !(var_out > 0.0))
        throw std::invalid_argument("gmm: variances must be positive");
}

double log_gaussian_pdf(const double* x, const double* mu, std::size_t d,
                        double var) {
    if (!(var > 0.0)) throw std::invalid_argument("gaussian_pdf: var must be positive");
    double sq = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        const double diff = x[c] - mu[c];
        sq += diff * diff;
    }
    return -0.5 * static_cast<double>(d) * std::log(kTwoPi * var) -
           sq / (2.0 * var);
}

double gaussian_pdf(const double* x, const double* mu, std::size_t d,
                    double var) {
    return std::exp(log_gaussian_pdf(x, mu, d, var));
}

GmmParams default_em_init(const double* x, std::size_t n, std::size_t d) {
    if (n < 2) throw std::invalid_argument("em_fit: need at least 2 increments");
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) mean[c] += x[i * d + c];
    for (std::size_t c = 0; c < d; ++c) mean[c] /= static_cast<double>(n);

    double pooled = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = x[i * d + c] - mean[c];
            pooled += diff * diff;
        }
    pooled /= static_cast<double>(n * d);
    pooled = std::max(pooled, kVarFloor * 10.0);
    const double s = std::sqrt(pooled);

    GmmParams init;
    init.alpha_in = init.alpha_out = 0.5;
    init.mu_in = mean;
    init.mu_out = mean;
    init.mu_in[0] += s;
    init.mu_out[0] -= s;
    init.var_in = pooled / 2.0;
    init.var_out = pooled * 2.0;
    return init;
}

EmFitReport em_fit(const double* x, std::size_t n, std::size_t d,
                   const GmmParams& init, double tol, std::size_t max_iter) {
    if (n < 2) throw std::invalid_argument("em_fit: need at least 2 increments");
    init.validate();
    if (init.dim() != d)
        throw std::invalid_argument("em_fit: init dimension mismatch");

    double alpha[2] = {init.alpha_in, init.alpha_out};
    std::vector<double> mu[2] = {init.mu_in, init.mu_out};
    double var[2] = {init.var_in, init.var_out};

    std::vector<double> beta(n * 2);
    EmFitReport report;
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // E-step in log space
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = x + i * d;
            double lw[2];
            for (int j = 0; j < 2; ++j)
                lw[j] = std::log(alpha[j]) +
                        log_gaussian_pdf(xi, mu[j].data(), d, var[j]);
            const double m = std::max(lw[0], lw[1]);
            const double lse =
                m + std::log(std::exp(lw[0] - m) + std::exp(lw[1] - m));
            ll += lse;
            beta[i * 2 + 0] = std::exp(lw[0] - lse);
            beta[i * 2 + 1] = std::exp(lw[1] - lse);
        }
        report.loglik_trace.push_back(ll);
        if (iter > 0 && ll - prev_ll <= tol) {
            report.converged = true;
            break;
        }
        prev_ll = ll;

        // M-step
        for (int j = 0; j < 2; ++j) {
            double wsum = 0.0;
            std::vector<double> wmean(d, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double w = beta[i * 2 + j];
                wsum += w;
                for (std::size_t c = 0; c < d; ++c)
                    wmean[c] += w * x[i * d + c];
            }
            if (!(wsum > 0.0))
                throw std::runtime_error("em_fit: component weight collapsed to zero");
            for (std::size_t c = 0; c < d; ++c) wmean[c] /= wsum;

            double wsq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double* xi = x + i * d;
                double sq = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    const double diff = xi[c] - wmean[c];
                    sq += diff * diff;
                }
                wsq += beta[i * 2 + j] * sq;
            }
            const double v = wsq / (wsum * static_cast<double>(d));
            if (v < kVarFloor)
                throw std::runtime_error(
                    "em_fit: degenerate component collapse, variance " +
                    std::to_string(v));
            alpha[j] = wsum / static_cast<double>(n);
            mu[j] = std::move(wmean);
            var[j] = v;
        }
        report.iterations = iter + 1;
    }

    // label by ascending variance: component "in" is the tighter one
    int a = 0, b = 1;
    if (var[1] < var[0]) std::swap(a, b);
    report.params.alpha_in = alpha[a];
    report.params.alpha_out = alpha[b];
    report.params.mu_in = mu[a];
    report.params.mu_out = mu[b];
    report.params.var_in = var[a];
    report.params.var_out = var[b];
    // weights renormalized against accumulated round-off
    const double wtot = report.params.alpha_in + report.params.alpha_out;
    report.params.alpha_in /= wtot;
    report.params.alpha_out /= wtot;
    return report;
}

EmFitReport em_fit(const double* x, std::size_t n, std::size_t d) {
    return em_fit(x, n, d, default_em_init(x, n, d));
}

EmFitReport em_fit(const std::vector<double>& x, std::size_t d) {
    if (d == 0 || x.size() % d != 0)
        throw std::invalid_argument("em_fit: flat size not a multiple of d");
    return em_fit(x.data(), x.size() / d, d);
}

ClusterMotion estimate_cluster_motion(const double* increments, std::size_t n,
                                      std::size_t d) {
    if (n == 0)
        throw std::invalid_argument("estimate_cluster_motion: no increments");
    ClusterMotion out;
    out.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) out.mean[c] += increments[i * d + c];
    for (std::size_t c = 0; c < d; ++c) out.mean[c] /= static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = increments[i * d + c] - out.mean[c];
            sq += diff * diff;
        }
    out.var = sq / static_cast<double>(n * d);
    return out;
}

ClusterMotion estimate_cluster_motion(const SimulationRecord& record) {
    if (record.N == 0 || record.T < 2)
        throw std::invalid_argument(
            "estimate_cluster_motion: record has no cluster increments");
    const std::size_t d = record.d;
    std::vector<double> inc;
    inc.reserve(record.N * (record.T - 1) * d);
    for (std::size_t n = 0; n < record.N; ++n)
        for (std::size_t t = 0; t + 1 < record.T; ++t) {
            const double* a = record.cluster_at(t, n);
            const double* b = record.cluster_at(t + 1, n);
            for (std::size_t c = 0; c < d; ++c) inc.push_back(b[c] - a[c]);
        }
    return estimate_cluster_motion(inc.data(), inc.size() / d, d);
}

std::vector<double> particle_increments(const SimulationRecord& record) {
    if (record.T < 2)
        throw std::invalid_argument("particle_increments: record too short");
    const std::size_t d = record.d;
    std::vector<double> inc;
    inc.reserve((record.T - 1) * d);
    for (std::size_t t = 0; t + 1 < record.T; ++t) {
        const double* a = record.particle_at(t);
        const double* b = record.particle_at(t + 1);
        for (std::size_t c = 0; c < d; ++c) inc.push_back(b[c] - a[c]);
    }
    return inc;
}

} // namespace clumem
