// Acceptance gate for the toolkit. Each criterion prints exactly one
// PASS/FAIL line; the exit code is 0 only if every criterion passes.
// Run from anywhere; all artifacts go to a throwaway temp directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "clumem/experiment.hpp"
#include "clumem/gmm.hpp"
#include "clumem/io.hpp"
#include "clumem/measures.hpp"
#include "clumem/membership.hpp"
#include "clumem/ot.hpp"
#include "clumem/rng.hpp"
#include "clumem/sim.hpp"
#include "clumem/solve.hpp"

using namespace clumem;

namespace {

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void report(bool pass, const char* name, const std::string& detail) {
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
}

std::string fnum(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string fsci(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

// ---------------------------------------------------------------- table 1

bool check_table1() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Table1RowResult> rows =
        reproduce_table1(kDefaultMasterSeed, 10);
    const double secs = elapsed_s(t0);

    double worst = 0.0;
    std::string worst_at = "none";
    std::size_t scalars = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const Table1Scalar& s : rows[r].scalars) {
            const double dev = std::fabs(s.mean_estimate - s.truth);
            ++scalars;
            if (dev > worst) {
                worst = dev;
                worst_at = "row " + std::to_string(r + 1) + " " + s.name;
            }
        }
    }
    const bool pass = rows.size() == 5 && worst <= 0.06 && secs < 60.0;
    report(pass, "table1-recovery",
           "worst |mean-truth| " + fnum(worst) + " at " + worst_at +
               " (limit 0.06, " + std::to_string(scalars) + " scalars, " +
               fnum(secs, 1) + "s)");
    return pass;
}

// ------------------------------------------------- table 2 and orderings

struct Grid {
    std::vector<Table2Cell> cells;
    std::map<std::string, const Table2Cell*> by_id;

    double mean(const std::string& id) const {
        const auto it = by_id.find(id);
        if (it == by_id.end())
            throw std::runtime_error("missing grid cell " + id);
        return it->second->mean_accuracy;
    }
};

Grid build_grid() {
    Grid g;
    g.cells = reproduce_table2(experiment_defaults());
    for (const Table2Cell& c : g.cells) g.by_id[c.cell_id()] = &c;
    return g;
}

bool check_table2(const Grid& g) {
    struct Anchor {
        std::string id;
        double target;
    };
    std::vector<Anchor> anchors;
    // radius-only accuracy is variant- and distance-independent by
    // construction; every cell carrying it must sit on the same anchor
    for (const char* dist : {"mv", "ws", "mmd"})
        for (const char* var : {"gaussian", "closest"})
            anchors.push_back({std::string("so0.7_") + dist + "_" + var +
                                   "_br1_bs0",
                               0.70});
    anchors.push_back({"so0.7_ws_gaussian_br1_bs1", 0.89});
    anchors.push_back({"so0.7_ws_closest_br0_bs1", 0.90});
    anchors.push_back({"so0.7_mmd_closest_br1_bs1", 0.94});
    anchors.push_back({"so1_ws_gaussian_br1_bs1", 0.92});

    bool pass = true;
    double worst = 0.0;
    std::string worst_at = "none";
    for (const Anchor& a : anchors) {
        const double dev = std::fabs(g.mean(a.id) - a.target);
        if (dev > worst) {
            worst = dev;
            worst_at = a.id + " " + fnum(g.mean(a.id), 3) + " vs " +
                       fnum(a.target, 2);
        }
        if (dev > 0.05) pass = false;
    }
    report(pass, "table2-anchors",
           std::to_string(anchors.size()) + " anchors, worst dev " +
               fnum(worst) + " at " + worst_at + " (limit 0.05)");
    return pass;
}

bool check_ordering(const Grid& g) {
    // (a) running both penalties never lands more than 0.02 below the
    //     better single-penalty cell, on every distance/variant/set
    double margin_a = 1e9;
    std::string at_a = "none";
    for (const char* so : {"so0.7", "so1"}) {
        for (const char* dist : {"mv", "ws", "mmd"}) {
            for (const char* var : {"gaussian", "closest"}) {
                const std::string stem =
                    std::string(so) + "_" + dist + "_" + var + "_";
                const double both = g.mean(stem + "br1_bs1");
                const double solo = std::max(g.mean(stem + "br1_bs0"),
                                             g.mean(stem + "br0_bs1"));
                const double m = both - (solo - 0.02);
                if (m < margin_a) {
                    margin_a = m;
                    at_a = stem + "br1_bs1";
                }
            }
        }
    }
    // (b) at beta_r = 0, comparing against the nearest cluster's own
    //     window beats comparing against the fitted gaussian by >= 0.05
    //     on the sigma_out = 0.7 set
    double margin_b = 1e9;
    std::string at_b = "none";
    for (const char* dist : {"ws", "mmd"}) {
        const std::string stem = std::string("so0.7_") + dist + "_";
        const double m = g.mean(stem + "closest_br0_bs1") -
                         (g.mean(stem + "gaussian_br0_bs1") + 0.05);
        if (m < margin_b) {
            margin_b = m;
            at_b = stem + "closest_br0_bs1";
        }
    }
    const bool pass = margin_a >= 0.0 && margin_b >= 0.0;
    report(pass, "accuracy-ordering",
           "combined-vs-solo min slack " + fnum(margin_a) + " at " + at_a +
               "; cluster-vs-gaussian min slack " + fnum(margin_b) + " at " +
               at_b);
    return pass;
}

// ------------------------------------------------------- transport oracle

EmpiricalMeasure random_measure(Stream& rng, std::size_t n, bool uniform) {
    EmpiricalMeasure m;
    m.d = 2;
    m.atoms.resize(n * 2);
    for (double& a : m.atoms) a = rng.uniform() * 2.0 - 1.0;
    m.weights.assign(n, 1.0 / static_cast<double>(n));
    if (!uniform) {
        double sum = 0.0;
        for (double& w : m.weights) {
            w = 0.05 + rng.uniform();
            sum += w;
        }
        for (double& w : m.weights) w /= sum;
    }
    m.validate();
    return m;
}

double sqdist2(const double* a, const double* b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

bool check_transport_oracle() {
    Stream rng(20240, 0, "acceptance/ot");

    // equal-size uniform pairs against the brute-force matching minimum
    double worst_gap = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rng.next_u64() % 6;
        const EmpiricalMeasure mu = random_measure(rng, n, true);
        const EmpiricalMeasure nu = random_measure(rng, n, true);
        const double got = wasserstein2(mu, nu);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        double best = 1e300;
        do {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += sqdist2(mu.atom(i), nu.atom(perm[i]));
            best = std::min(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        const double want = std::sqrt(best / static_cast<double>(n));
        worst_gap = std::max(worst_gap, std::fabs(got - want));
    }
    const bool pass_match = worst_gap <= 1e-9;

    // unequal-weight pairs: the solver's cost never exceeds a sampled
    // feasible plan's cost (northwest-corner fills under random orderings,
    // plus the independent product coupling)
    std::size_t beaten = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 1 + rng.next_u64() % 5;
        const std::size_t m = 1 + rng.next_u64() % 5;
        const EmpiricalMeasure mu = random_measure(rng, n, false);
        const EmpiricalMeasure nu = random_measure(rng, m, false);
        std::vector<double> cost(n * m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                cost[i * m + j] = sqdist2(mu.atom(i), nu.atom(j));
        const ot::TransportPlan plan =
            ot::transport(mu.weights.data(), n, nu.weights.data(), m,
                          cost.data());

        for (int trial = 0; trial < 1000; ++trial) {
            double c = 0.0;
            if (trial == 0) {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < m; ++j)
                        c += mu.weights[i] * nu.weights[j] * cost[i * m + j];
            } else {
                std::vector<std::size_t> ri(n), cj(m);
                std::iota(ri.begin(), ri.end(), std::size_t{0});
                std::iota(cj.begin(), cj.end(), std::size_t{0});
                for (std::size_t i = n; i > 1; --i)
                    std::swap(ri[i - 1], ri[rng.next_u64() % i]);
                for (std::size_t j = m; j > 1; --j)
                    std::swap(cj[j - 1], cj[rng.next_u64() % j]);
                std::vector<double> sup = mu.weights, dem = nu.weights;
                std::size_t a = 0, b = 0;
                while (a < n && b < m) {
                    const std::size_t i = ri[a], j = cj[b];
                    const double f = std::min(sup[i], dem[j]);
                    c += f * cost[i * m + j];
                    sup[i] -= f;
                    dem[j] -= f;
                    if (sup[i] <= dem[j]) ++a;
                    if (dem[j] < 1e-15) ++b;
                }
            }
            if (c < plan.cost - 1e-9) ++beaten;
        }
    }
    const bool pass = pass_match && beaten == 0;
    report(pass, "transport-oracle",
           "matching gap " + fsci(worst_gap) +
               " over 200 pairs (limit 1e-9); solver beaten by " +
               std::to_string(beaten) + " of 100x1000 sampled plans");
    return pass;
}

// ----------------------------------------------------- invariant batteries

bool metric_axioms_hold(std::string& fail) {
    Stream rng(20240, 1, "acceptance/axioms");
    const auto dist = [](DistanceKind kind, const EmpiricalMeasure& a,
                         const EmpiricalMeasure& b) {
        return kind == DistanceKind::WS ? wasserstein2(a, b)
                                        : mmd_riesz(a, b);
    };
    for (int rep = 0; rep < 40; ++rep) {
        const EmpiricalMeasure a =
            random_measure(rng, 1 + rng.next_u64() % 6, rep % 2 == 0);
        const EmpiricalMeasure b =
            random_measure(rng, 1 + rng.next_u64() % 6, rep % 3 == 0);
        const EmpiricalMeasure c =
            random_measure(rng, 1 + rng.next_u64() % 6, false);
        for (DistanceKind kind : {DistanceKind::WS, DistanceKind::MMD}) {
            const char* tag = kind == DistanceKind::WS ? "w2" : "mmd";
            if (dist(kind, a, a) > 1e-9) {
                fail = std::string(tag) + " identity";
                return false;
            }
            if (std::fabs(dist(kind, a, b) - dist(kind, b, a)) > 1e-9) {
                fail = std::string(tag) + " symmetry";
                return false;
            }
            if (dist(kind, a, c) > dist(kind, a, b) + dist(kind, b, c) + 1e-9) {
                fail = std::string(tag) + " triangle";
                return false;
            }
        }
    }
    return true;
}

bool confidence_anchors_exact(std::string& fail) {
    const double R = 1.25; // representable so the anchor arguments are exact
    if (confidence_F(R, R) != 0.0 || confidence_F(0.25, R) != 0.0 ||
        confidence_F(R + 1.0, R) != 1.0 || confidence_F(5.0, R) != 1.0 ||
        confidence_F(R + 0.5, R) != 0.5) {
        fail = "distance confidence anchors";
        return false;
    }
    for (double h : {0.5, 0.7, 1.25}) {
        if (confidence_G(h, h) != 0.0 || confidence_G(0.0, h) != 1.0 ||
            confidence_G(2.0 * h, h) != 1.0) {
            fail = "threshold confidence anchors";
            return false;
        }
    }
    return true;
}

bool em_monotone(std::string& fail) {
    Stream rng(20240, 2, "acceptance/em");
    for (int rep = 0; rep < 50; ++rep) {
        // well-populated, separated modes: EM's single-point collapse guard
        // is a deliberate failure path and not under test here
        const std::size_t n = 200 + rng.next_u64() % 200;
        const double a_in = 0.3 + 0.4 * rng.uniform();
        const double mu_shift = 1.5 + 2.0 * rng.uniform();
        const double sd_in = 0.3 + 0.5 * rng.uniform();
        const double sd_out = sd_in * (1.3 + rng.uniform());
        const std::size_t n_in = static_cast<std::size_t>(a_in * n);
        std::vector<double> x(n * 2);
        for (std::size_t i = 0; i < n; ++i) {
            const bool in = i < n_in;
            const double mu = in ? 0.0 : mu_shift;
            const double sd = in ? sd_in : sd_out;
            x[i * 2] = rng.gaussian(mu, sd);
            x[i * 2 + 1] = rng.gaussian(0.0, sd);
        }
        const EmFitReport fit = em_fit(x, 2);
        for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i) {
            if (fit.loglik_trace[i] < fit.loglik_trace[i - 1] - 1e-9) {
                fail = "log-likelihood decreased on dataset " +
                       std::to_string(rep);
                return false;
            }
        }
    }
    return true;
}

MembershipObjective random_objective(Stream& rng) {
    MembershipObjective obj;
    obj.T = 8 + rng.next_u64() % 33;
    obj.k = 2;
    obj.beta_r = 0.2 + 1.8 * rng.uniform();
    obj.beta_s = 0.2 + 1.8 * rng.uniform();
    const std::size_t terms = 4 + rng.next_u64() % (3 * obj.T);
    for (std::size_t i = 0; i < terms; ++i) {
        QuadTerm q;
        q.t = 1 + rng.next_u64() % obj.T;
        q.target = rng.uniform() < 0.5 ? 0 : 1;
        // bounded away from zero: a lone vanishing weight makes the
        // coordinate effectively unconstrained, which the solvers resolve
        // by design at the init value rather than at the term target
        q.weight = 0.05 + 0.95 * rng.uniform();
        q.tag = rng.uniform() < 0.5 ? BetaTag::Radius : BetaTag::Similarity;
        obj.terms.push_back(q);
    }
    return obj;
}

bool solver_agrees(std::string& fail, double& worst) {
    Stream rng(20240, 3, "acceptance/solver");
    worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const MembershipObjective obj = random_objective(rng);
        SolverConfig sc;
        const MembershipEstimate exact = closed_form_minimize(obj, sc.init_value);
        const MembershipEstimate iter = adam_minimize(obj, sc);
        for (std::size_t t = 0; t < obj.T; ++t)
            worst = std::max(worst, std::fabs(iter.e[t] - exact.e[t]));
    }
    if (worst > 1e-3) {
        fail = "solver gap " + fsci(worst);
        return false;
    }
    return true;
}

bool gradient_matches(std::string& fail, double& worst) {
    Stream rng(20240, 4, "acceptance/grad");
    worst = 0.0;
    for (int rep = 0; rep < 30; ++rep) {
        const MembershipObjective obj = random_objective(rng);
        std::vector<double> e(obj.T);
        for (double& v : e) v = 0.1 + 0.8 * rng.uniform();
        std::vector<double> grad;
        objective_gradient(obj, e, grad);
        double scale = 1.0;
        for (double g : grad) scale = std::max(scale, std::fabs(g));
        const double h = 1e-6;
        for (std::size_t t = 0; t < obj.T; ++t) {
            std::vector<double> lo = e, hi = e;
            lo[t] -= h;
            hi[t] += h;
            const double fd =
                (objective_value(obj, hi) - objective_value(obj, lo)) /
                (2.0 * h);
            worst = std::max(worst, std::fabs(grad[t] - fd) / scale);
        }
    }
    if (worst > 1e-5) {
        fail = "gradient mismatch " + fsci(worst);
        return false;
    }
    return true;
}

bool check_invariants() {
    std::string fail;
    double solver_gap = 0.0, grad_gap = 0.0;
    const bool pass = metric_axioms_hold(fail) &&
                      confidence_anchors_exact(fail) && em_monotone(fail) &&
                      solver_agrees(fail, solver_gap) &&
                      gradient_matches(fail, grad_gap);
    report(pass, "invariant-suites",
           pass ? "metric axioms (40 triples), confidence anchors exact, "
                  "EM monotone (50 sets), solver gap " +
                      fsci(solver_gap) + " (limit 1e-3), gradient rel " +
                      fsci(grad_gap) + " (limit 1e-5)"
                : fail);
    return pass;
}

// ------------------------------------------------------------ determinism

bool check_determinism() {
    namespace fs = std::filesystem;
    const fs::path root =
        fs::temp_directory_path() / "clumem_acceptance_determinism";
    fs::remove_all(root);

    ExperimentConfig cfg = experiment_defaults();
    cfg.sim.T = 300;
    cfg.sim.N = 12;
    cfg.sim.b = 8.0;
    cfg.sim.sigma_c = 0.4898979485566356;
    cfg.runs = 2;
    cfg.trials = 100;
    cfg.master_seed = 9001;
    cfg.validate();

    ExperimentConfig grid_base = cfg;
    grid_base.runs = 2;

    std::vector<std::string> names;
    for (int pass = 0; pass < 2; ++pass) {
        const fs::path dir = root / ("pass" + std::to_string(pass));
        fs::create_directories(dir);
        const auto at = [&](const char* n) { return (dir / n).string(); };

        const SingleRun sr = run_single(cfg, 0);
        if (!sr.result.ok || !sr.have_estimate) {
            report(false, "csv-determinism",
                   "probe run failed: " + sr.result.error);
            return false;
        }
        write_particle_csv(sr.record, at("particle.csv"));
        write_clusters_csv(sr.record, at("clusters.csv"));
        export_trajectory_plotdata(sr.record, cfg.sim.r, at("trajectory.csv"));
        write_membership_csv(sr.record, sr.estimate, cfg.k,
                             at("membership.csv"));
        write_terms_csv(sr.objective, at("terms.csv"));
        write_thresholds_csv(sr.result.thresholds, at("thresholds.csv"));
        write_gmm_kv(sr.result.fit, at("gmm.kv"));

        const ExperimentReport rep = run_experiment(cfg, 1 + pass);
        NamedReport named;
        named.id = "probe";
        named.report = rep;
        write_report_csv(std::vector<NamedReport>{named}, at("report.csv"));

        // grid aggregation must not depend on the worker count either
        const std::vector<Table2Cell> cells =
            reproduce_table2(grid_base, 1 + pass);
        write_report_csv(cells, at("grid.csv"));

        write_table1_csv(reproduce_table1(cfg.master_seed, 2),
                         at("table1.csv"));

        if (pass == 0)
            for (const auto& entry : fs::directory_iterator(dir))
                names.push_back(entry.path().filename().string());
    }

    std::sort(names.begin(), names.end());
    std::size_t checked = 0;
    for (const std::string& n : names) {
        const std::string a = read_text_file((root / "pass0" / n).string());
        const std::string b = read_text_file((root / "pass1" / n).string());
        if (a != b) {
            report(false, "csv-determinism", n + " differs between passes");
            return false;
        }
        if (a.empty()) {
            report(false, "csv-determinism", n + " is empty");
            return false;
        }
        ++checked;
    }
    fs::remove_all(root);
    const bool pass = checked == 10;
    report(pass, "csv-determinism",
           std::to_string(checked) +
               " artifact files byte-identical across repeat runs and worker "
               "counts");
    return pass;
}

} // namespace

int main() {
    bool ok = true;
    try {
        ok &= check_table1();
        const Grid grid = build_grid();
        ok &= check_table2(grid);
        ok &= check_ordering(grid);
        ok &= check_transport_oracle();
        ok &= check_invariants();
        ok &= check_determinism();
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance: unhandled error: %s\n", e.what());
        return 2;
    }
    return ok ? 0 : 1;
}
