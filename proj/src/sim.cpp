#include "clumem/sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "clumem/kernels.hpp"
#include "clumem/rng.hpp"

namespace clumem {

void SimConfig::validate() const {
    if (d < 1) throw std::invalid_argument("sim: d must be at least 1");
    if (T < 2) throw std::invalid_argument("sim: T must be at least 2");
    if (!(r > 0.0)) throw std::invalid_argument("sim: r must be positive");
    if (!(b > 0.0)) throw std::invalid_argument("sim: b must be positive");
    if (!(sigma_c >= 0.0) || !(sigma_pc >= 0.0) || !(sigma_out >= 0.0))
        throw std::invalid_argument("sim: stddevs must be nonnegative");
    if (!(sigma_out > sigma_c))
        throw std::invalid_argument("sim: requires sigma_out > sigma_c");
    if (m_c.size() != d || m_out.size() != d)
        throw std::invalid_argument("sim: drift vectors must have length d");
}

std::pair<std::size_t, double> nearest_cluster(const double* p,
                                               const double* centers,
                                               std::size_t n, std::size_t d) {
    if (n == 0) throw std::invalid_argument("nearest_cluster: no clusters");
    double sq = 0.0;
    const std::size_t idx = active_ops()->argmin_sqdist(p, centers, n, d, &sq);
    return {idx, std::sqrt(sq)};
}

SimulationRecord simulate(const SimConfig& config) {
    config.validate();
    const std::size_t d = config.d, T = config.T, N = config.N;

    SimulationRecord rec;
    rec.d = d;
    rec.T = T;
    rec.N = N;
    rec.particle.assign(T * d, 0.0);
    rec.clusters.assign(T * N * d, 0.0);
    rec.inside.assign(T, 0);
    rec.nearest.assign(T, -1);

    // stream per consumer: the particle sequence never depends on N
    Stream particle_stream(config.seed, 0, "particle");
    std::vector<Stream> cluster_streams;
    cluster_streams.reserve(N);
    for (std::size_t n = 0; n < N; ++n) {
        cluster_streams.emplace_back(config.seed, n + 1, "cluster");
        Stream init(config.seed, n + 1, "cluster-init");
        double* c0 = rec.clusters.data() + n * d;
        for (std::size_t c = 0; c < d; ++c)
            c0[c] = -config.b + 2.0 * config.b * init.uniform();
    }

    std::vector<double> step(d);
    for (std::size_t t = 0; t < T; ++t) {
        // classify at the pre-step position
        if (N > 0) {
            const auto [idx, dist] =
                nearest_cluster(rec.particle_at(t), rec.clusters_at(t), N, d);
            if (dist <= config.r) {
                rec.inside[t] = 1;
                rec.nearest[t] = static_cast<std::int64_t>(idx);
            }
        }
        if (t + 1 == T) break;

        // advance clusters to t+1
        const double* cur = rec.clusters_at(t);
        double* nxt = rec.clusters.data() + (t + 1) * N * d;
        for (std::size_t n = 0; n < N; ++n) {
            for (std::size_t c = 0; c < d; ++c) {
                const double s =
                    config.m_c[c] + config.sigma_c * cluster_streams[n].gaussian();
                nxt[n * d + c] = cur[n * d + c] + s;
            }
        }

        // advance particle; both branches consume d normals
        const double* p = rec.particle_at(t);
        double* q = rec.particle.data() + (t + 1) * d;
        if (rec.inside[t]) {
            const std::size_t n = static_cast<std::size_t>(rec.nearest[t]);
            for (std::size_t c = 0; c < d; ++c) {
                const double wiggle = config.sigma_pc * particle_stream.gaussian();
                const double carry = nxt[n * d + c] - cur[n * d + c];
                q[c] = p[c] + wiggle + carry;
            }
        } else {
            for (std::size_t c = 0; c < d; ++c)
                q[c] = p[c] + config.m_out[c] +
                       config.sigma_out * particle_stream.gaussian();
        }
    }
    return rec;
}

double ground_truth_fraction(const SimulationRecord& record) {
    if (record.T == 0) return 0.0;
    std::size_t count = 0;
    for (std::uint8_t f : record.inside) count += f;
    return static_cast<double>(count) / static_cast<double>(record.T);
}

namespace {

double occupancy_at(SimConfig probe, double b, std::size_t probes) {
    const std::uint64_t base_seed = probe.seed;
    probe.b = b;
    double acc = 0.0;
    for (std::size_t i = 0; i < probes; ++i) {
        probe.seed = hash64(base_seed, i, "calibrate");
        acc += ground_truth_fraction(simulate(probe));
    }
    return acc / static_cast<double>(probes);
}

} // namespace

double calibrate_arena(SimConfig base, double target, std::size_t probes,
                       double b_lo, double b_hi) {
    base.validate();
    if (probes == 0) throw std::invalid_argument("calibrate_arena: probes == 0");
    if (!(target > 0.0) || !(target < 1.0))
        throw std::invalid_argument("calibrate_arena: target must lie in (0,1)");
    if (!(b_lo > 0.0) || !(b_hi > b_lo))
        throw std::invalid_argument("calibrate_arena: bad bracket");

    if (occupancy_at(base, b_lo, probes) < target) return b_lo;
    for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (b_lo + b_hi);
        if (occupancy_at(base, mid, probes) >= target)
            b_lo = mid;
        else
            b_hi = mid;
    }
    return 0.5 * (b_lo + b_hi);
}

} // namespace clumem
