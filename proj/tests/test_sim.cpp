#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "clumem/rng.hpp"
#include "clumem/sim.hpp"

using namespace clumem;

namespace {

SimConfig small_config() {
    SimConfig c;
    c.d = 2;
    c.T = 200;
    c.N = 8;
    c.r = 0.7;
    c.b = 6.0;
    c.sigma_c = 0.4;
    c.sigma_pc = 0.1;
    c.sigma_out = 0.9;
    c.seed = 555;
    return c;
}

} // namespace

TEST_CASE("config validation rejects bad parameters") {
    CHECK_NOTHROW(small_config().validate());

    SimConfig c = small_config();
    c.T = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = small_config();
    c.d = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = small_config();
    c.r = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = small_config();
    c.r = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = small_config();
    c.b = -0.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = small_config();
    c.sigma_c = -0.1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = small_config();
    c.sigma_pc = -0.1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    // the outside spread must exceed the cluster spread for the two motion
    // modes to be distinguishable
    c = small_config();
    c.sigma_out = c.sigma_c;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = small_config();
    c.m_c = {0.3};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = small_config();
    c.m_out = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("record shape and start conditions") {
    const SimConfig c = small_config();
    const SimulationRecord rec = simulate(c);
    CHECK(rec.d == c.d);
    CHECK(rec.T == c.T);
    CHECK(rec.N == c.N);
    CHECK(rec.particle.size() == c.T * c.d);
    CHECK(rec.clusters.size() == c.T * c.N * c.d);
    CHECK(rec.inside.size() == c.T);
    CHECK(rec.nearest.size() == c.T);

    // particle starts at the origin
    CHECK(rec.particle[0] == 0.0);
    CHECK(rec.particle[1] == 0.0);

    // initial centers land in the arena box
    for (std::size_t n = 0; n < c.N; ++n) {
        const double* cc = rec.cluster_at(0, n);
        for (std::size_t j = 0; j < c.d; ++j) {
            CHECK(cc[j] >= -c.b);
            CHECK(cc[j] <= c.b);
        }
    }

    // nearest is set exactly when inside
    for (std::size_t t = 0; t < c.T; ++t) {
        if (rec.inside[t]) {
            CHECK(rec.nearest[t] >= 0);
            CHECK(rec.nearest[t] < static_cast<std::int64_t>(c.N));
        } else {
            CHECK(rec.nearest[t] == -1);
        }
    }
}

TEST_CASE("inside flag reflects the position at its own timepoint") {
    const SimConfig c = small_config();
    const SimulationRecord rec = simulate(c);
    for (std::size_t t = 0; t < c.T; ++t) {
        const auto [idx, dist] =
            nearest_cluster(rec.particle_at(t), rec.clusters_at(t), c.N, c.d);
        CHECK(static_cast<bool>(rec.inside[t]) == (dist <= c.r));
        if (rec.inside[t])
            CHECK(rec.nearest[t] == static_cast<std::int64_t>(idx));
    }
}

TEST_CASE("glued particle copies its cluster step exactly") {
    // one cluster pinned at the origin, huge radius, zero wiggle: every
    // particle increment must equal the cluster increment bit for bit
    SimConfig c;
    c.d = 2;
    c.T = 400;
    c.N = 1;
    c.r = 1e9;
    c.b = 1e-12;
    c.sigma_c = 0.4;
    c.sigma_pc = 0.0;
    c.sigma_out = 0.9;
    c.seed = 77;
    const SimulationRecord rec = simulate(c);
    for (std::size_t t = 0; t + 1 < c.T; ++t) {
        CHECK(rec.inside[t]);
        for (std::size_t j = 0; j < c.d; ++j) {
            const double dp = rec.particle_at(t + 1)[j] - rec.particle_at(t)[j];
            const double dc = rec.cluster_at(t + 1, 0)[j] - rec.cluster_at(t, 0)[j];
            // one rounding event per step; positions stay order 1e2
            CHECK(std::abs(dp - dc) < 1e-10);
        }
    }
}

TEST_CASE("glued particle with wiggle deviates by the wiggle spread") {
    SimConfig c;
    c.d = 2;
    c.T = 4000;
    c.N = 1;
    c.r = 1e9;
    c.b = 1e-12;
    c.sigma_c = 0.4;
    c.sigma_pc = 0.25;
    c.sigma_out = 0.9;
    c.seed = 78;
    const SimulationRecord rec = simulate(c);
    double sum = 0, sq = 0;
    std::size_t count = 0;
    for (std::size_t t = 0; t + 1 < c.T; ++t) {
        for (std::size_t j = 0; j < c.d; ++j) {
            const double w = (rec.particle_at(t + 1)[j] - rec.particle_at(t)[j]) -
                             (rec.cluster_at(t + 1, 0)[j] - rec.cluster_at(t, 0)[j]);
            sum += w;
            sq += w * w;
            ++count;
        }
    }
    const double mean = sum / count;
    const double var = sq / count - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(var == doctest::Approx(c.sigma_pc * c.sigma_pc).epsilon(0.08));
}

TEST_CASE("no clusters means every step diffuses outside") {
    SimConfig c;
    c.d = 2;
    c.T = 6000;
    c.N = 0;
    c.r = 0.7;
    c.b = 5.0;
    c.sigma_c = 0.4;
    c.sigma_pc = 0.1;
    c.m_out = {0.05, -0.02};
    c.sigma_out = 0.8;
    c.seed = 79;
    const SimulationRecord rec = simulate(c);
    CHECK(ground_truth_fraction(rec) == 0.0);
    double sum[2] = {0, 0};
    double sq[2] = {0, 0};
    const std::size_t n = c.T - 1;
    for (std::size_t t = 0; t + 1 < c.T; ++t) {
        for (std::size_t j = 0; j < 2; ++j) {
            const double inc = rec.particle_at(t + 1)[j] - rec.particle_at(t)[j];
            sum[j] += inc;
            sq[j] += inc * inc;
        }
    }
    for (std::size_t j = 0; j < 2; ++j) {
        const double mean = sum[j] / n;
        const double var = sq[j] / n - mean * mean;
        CHECK(std::abs(mean - c.m_out[j]) < 0.05);
        CHECK(var == doctest::Approx(c.sigma_out * c.sigma_out).epsilon(0.06));
    }
}

TEST_CASE("nearest_cluster hand values and tie breaking") {
    const double p[] = {0.0, 0.0};
    const double centers[] = {3.0, 4.0, -1.0, 0.0, 1.0, 0.0};
    const auto [idx, dist] = nearest_cluster(p, centers, 3, 2);
    CHECK(idx == 1); // distance 1 at indices 1 and 2; smallest index wins
    CHECK(dist == 1.0);
    CHECK_THROWS_AS(nearest_cluster(p, centers, 0, 2), std::invalid_argument);
}

TEST_CASE("same seed reproduces the record exactly") {
    const SimConfig c = small_config();
    const SimulationRecord a = simulate(c);
    const SimulationRecord b = simulate(c);
    CHECK(a.particle == b.particle);
    CHECK(a.clusters == b.clusters);
    CHECK(a.inside == b.inside);
    CHECK(a.nearest == b.nearest);

    SimConfig c2 = c;
    c2.seed = c.seed + 1;
    const SimulationRecord other = simulate(c2);
    CHECK(a.particle != other.particle);
}

TEST_CASE("ground_truth_fraction counts inside flags") {
    SimulationRecord rec;
    rec.d = 2;
    rec.T = 4;
    rec.N = 0;
    rec.inside = {1, 0, 0, 1};
    rec.nearest = {0, -1, -1, 0};
    CHECK(ground_truth_fraction(rec) == 0.5);
}

TEST_CASE("denser arenas hold the particle inside more often") {
    SimConfig c = small_config();
    c.T = 2000;
    c.b = 2.0;
    const double dense = ground_truth_fraction(simulate(c));
    c.b = 60.0;
    const double sparse = ground_truth_fraction(simulate(c));
    CHECK(dense > sparse);
}

TEST_CASE("calibrate_arena drives occupancy toward the target") {
    // a sizable crowd keeps the occupancy curve roughly monotone in b;
    // single-particle occupancy is noisy, so the band stays generous
    SimConfig base;
    base.d = 2;
    base.T = 600;
    base.N = 300;
    base.r = 0.7;
    base.b = 20.0;
    base.sigma_c = 0.4898979485566356;
    base.sigma_pc = 0.1;
    base.sigma_out = 0.7;
    base.m_c = {0.3, 0.3};
    base.m_out = {0.0, 0.0};
    base.seed = 555;
    const double target = 0.45;
    const std::size_t probes = 6;
    const double b = calibrate_arena(base, target, probes, 8.0, 60.0);
    CHECK(b > 8.0);
    CHECK(b < 60.0);
    base.b = b;
    double mean = 0.0;
    for (std::size_t i = 0; i < probes; ++i) {
        SimConfig probe = base;
        probe.seed = hash64(base.seed, i, "calibrate");
        mean += ground_truth_fraction(simulate(probe));
    }
    mean /= probes;
    CHECK(std::abs(mean - target) < 0.15);
}

TEST_CASE("calibrate_arena returns the lower bound when the target is out of reach") {
    SimConfig base = small_config();
    base.N = 0; // occupancy is identically zero
    CHECK(calibrate_arena(base, 0.3, 2, 1.25, 50.0) == 1.25);
}

TEST_CASE("calibrate_arena rejects bad arguments") {
    const SimConfig base = small_config();
    CHECK_THROWS_AS(calibrate_arena(base, 0.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_arena(base, 0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_arena(base, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_arena(base, 0.5, 4, -1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_arena(base, 0.5, 4, 5.0, 5.0), std::invalid_argument);
}
