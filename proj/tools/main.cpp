// Command line front end: simulate / fit / membership / table1 / table2 /
// plotdata. Exit codes: 0 success, 1 configuration or usage error, 2 runtime
// failure.

#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "clumem/experiment.hpp"
#include "clumem/io.hpp"
#include "clumem/rng.hpp"

namespace fs = std::filesystem;
using namespace clumem;

namespace {

struct Common {
    std::string config;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string in;
    std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.config,
                    "configuration file (key = value lines)");
    cmd->add_option("--seed", common.seed,
                    "master seed, overrides the config file");
    cmd->add_option("--out", common.out, "output directory")
        ->capture_default_str();
    cmd->add_option("--jobs", common.jobs, "parallel runs")
        ->check(CLI::Range(std::size_t{1}, std::size_t{256}))
        ->capture_default_str();
}

ExperimentConfig load_base(const Common& common, bool seed_set,
                           KvFile* kv_out) {
    ExperimentConfig cfg = experiment_defaults();
    KvFile kv;
    if (!common.config.empty()) kv = parse_kv_file(common.config);
    try {
        cfg = config_from_kv(kv.base, cfg);
    } catch (const std::invalid_argument& ex) {
        throw std::invalid_argument(common.config + ": " + ex.what());
    }
    if (seed_set) cfg.master_seed = common.seed;
    cfg.validate();
    if (cfg.r_bound_warning())
        std::fprintf(stderr,
                     "warning: R=%g is below the simulation radius r=%g\n",
                     cfg.R, cfg.sim.r);
    if (kv_out) *kv_out = std::move(kv);
    return cfg;
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_out(const std::string& dir) { fs::create_directories(dir); }

SimulationRecord simulate_run0(const ExperimentConfig& cfg) {
    SimConfig sc = cfg.sim;
    sc.seed = hash64(cfg.master_seed, 0, "sim");
    return simulate(sc);
}

void check_cell_id(const std::string& id) {
    if (id.empty()) throw std::invalid_argument("empty cell name");
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-' ||
                        c == '.';
        if (!ok)
            throw std::invalid_argument(
                "cell name '" + id +
                "' may only use letters, digits, '_', '-', '.'");
    }
}

int do_simulate(const Common& common, bool seed_set) {
    const ExperimentConfig cfg = load_base(common, seed_set, nullptr);
    const SimulationRecord record = simulate_run0(cfg);
    ensure_out(common.out);
    write_particle_csv(record, join(common.out, "particle.csv"));
    write_clusters_csv(record, join(common.out, "clusters.csv"));
    write_text_file(join(common.out, "config_echo.txt"), config_echo(cfg));
    std::printf("simulated T=%zu N=%zu, inside fraction %.3f\n", record.T,
                record.N, ground_truth_fraction(record));
    std::printf("wrote %s and %s\n", join(common.out, "particle.csv").c_str(),
                join(common.out, "clusters.csv").c_str());
    return 0;
}

int do_fit(const Common& common, bool seed_set) {
    const ExperimentConfig cfg = load_base(common, seed_set, nullptr);
    SimulationRecord record;
    if (!common.in.empty()) {
        record = read_particle_csv(join(common.in, "particle.csv"));
    } else {
        record = simulate_run0(cfg);
    }
    const std::vector<double> increments = particle_increments(record);
    const EmFitReport fit = em_fit(increments, record.d);
    ensure_out(common.out);
    write_gmm_kv(fit.params, join(common.out, "gmm.kv"));
    write_text_file(join(common.out, "config_echo.txt"), config_echo(cfg));
    const GmmParams& p = fit.params;
    std::printf("alpha %.3f/%.3f  mu_in (%.3f, %.3f)  mu_out (%.3f, %.3f)  "
                "sigma %.3f/%.3f\n",
                p.alpha_in, p.alpha_out, p.mu_in[0], p.mu_in[1], p.mu_out[0],
                p.mu_out[1], std::sqrt(p.var_in), std::sqrt(p.var_out));
    std::printf("%zu iterations, %s; wrote %s\n", fit.iterations,
                fit.converged ? "converged" : "iteration cap reached",
                join(common.out, "gmm.kv").c_str());
    return 0;
}

int do_membership(const Common& common, bool seed_set) {
    KvFile kv;
    const ExperimentConfig base = load_base(common, seed_set, &kv);
    std::vector<std::pair<std::string, ExperimentConfig>> cells;
    if (kv.blocks.empty()) {
        cells.emplace_back("base", base);
    } else {
        for (const KvBlock& block : kv.blocks) {
            check_cell_id(block.name);
            ExperimentConfig cc;
            try {
                cc = config_from_kv(block.entries, base);
            } catch (const std::invalid_argument& ex) {
                throw std::invalid_argument(common.config + ": " + ex.what());
            }
            if (seed_set) cc.master_seed = common.seed;
            cc.validate();
            cells.emplace_back(block.name, std::move(cc));
        }
    }
    ensure_out(common.out);
    std::vector<NamedReport> reports;
    std::size_t total_completed = 0;
    for (const auto& [id, cfg] : cells) {
        ExperimentReport report = run_experiment(cfg, common.jobs);
        for (std::size_t i = 0; i < report.runs.size(); ++i)
            if (!report.runs[i].ok)
                std::fprintf(stderr, "cell %s run %zu failed: %s\n",
                             id.c_str(), i, report.runs[i].error.c_str());
        std::printf("cell %s: mean accuracy %.3f over %zu/%zu runs "
                    "(stddev %.3f)\n",
                    id.c_str(), report.mean_accuracy, report.completed,
                    report.runs.size(), report.stddev);
        total_completed += report.completed;

        // run-0 audit dumps for every cell
        const SingleRun sr = run_single(cfg, 0);
        if (sr.result.ok) {
            write_membership_csv(sr.record, sr.estimate, cfg.k,
                                 join(common.out, "membership_" + id + ".csv"));
            write_terms_csv(sr.objective,
                            join(common.out, "terms_" + id + ".csv"));
            if (!sr.result.thresholds.empty())
                write_thresholds_csv(
                    sr.result.thresholds,
                    join(common.out, "thresholds_" + id + ".csv"));
        } else {
            std::fprintf(stderr, "cell %s: run 0 dumps skipped: %s\n",
                         id.c_str(), sr.result.error.c_str());
        }
        write_text_file(join(common.out, "config_echo_" + id + ".txt"),
                        config_echo(cfg));
        reports.push_back({id, std::move(report)});
    }
    write_report_csv(reports, join(common.out, "report.csv"));
    write_text_file(join(common.out, "config_echo.txt"), config_echo(base));
    std::printf("wrote %s\n", join(common.out, "report.csv").c_str());
    if (total_completed == 0)
        throw std::runtime_error("every run failed; see messages above");
    return 0;
}

int do_table1(const Common& common, bool seed_set) {
    const ExperimentConfig cfg = load_base(common, seed_set, nullptr);
    const std::vector<Table1RowResult> rows =
        reproduce_table1(cfg.master_seed);
    ensure_out(common.out);
    write_table1_csv(rows, join(common.out, "table1.csv"));
    const std::string text = format_table1_text(rows);
    write_text_file(join(common.out, "table1.txt"), text);
    write_text_file(join(common.out, "config_echo.txt"), config_echo(cfg));
    std::fputs(text.c_str(), stdout);
    std::printf("\nwrote %s\n", join(common.out, "table1.csv").c_str());
    return 0;
}

int do_table2(const Common& common, bool seed_set) {
    const ExperimentConfig cfg = load_base(common, seed_set, nullptr);
    const std::vector<Table2Cell> cells = reproduce_table2(cfg, common.jobs);
    ensure_out(common.out);
    write_report_csv(cells, join(common.out, "report.csv"));
    const std::string text = format_table2_text(cells);
    write_text_file(join(common.out, "table2.txt"), text);
    write_text_file(join(common.out, "config_echo.txt"), config_echo(cfg));
    std::fputs(text.c_str(), stdout);
    std::size_t total_completed = 0;
    for (const Table2Cell& cell : cells) {
        total_completed += cell.completed;
        if (cell.completed < cell.run_results.size())
            std::fprintf(stderr, "cell %s: %zu of %zu runs completed\n",
                         cell.cell_id().c_str(), cell.completed,
                         cell.run_results.size());
    }
    std::printf("\nwrote %s\n", join(common.out, "report.csv").c_str());
    if (total_completed == 0)
        throw std::runtime_error("every run failed across the grid");
    return 0;
}

int do_plotdata(const Common& common, bool seed_set) {
    const ExperimentConfig cfg = load_base(common, seed_set, nullptr);
    const SimulationRecord record = simulate_run0(cfg);
    ensure_out(common.out);
    export_trajectory_plotdata(record, cfg.sim.r,
                               join(common.out, "trajectory.csv"));
    std::printf("wrote %s\n", join(common.out, "trajectory.csv").c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"particle/cluster membership: simulation, fitting and "
                 "benchmark reproduction"};
    app.require_subcommand(1);
    Common common;
    int rc = 0;

    CLI::App* c_sim = app.add_subcommand(
        "simulate", "simulate one seeded record and export record CSVs");
    CLI::App* c_fit = app.add_subcommand(
        "fit", "fit the two-mode displacement mixture with EM");
    c_fit->add_option("--in", common.in,
                      "directory holding a particle.csv to fit instead of "
                      "simulating");
    CLI::App* c_mem = app.add_subcommand(
        "membership",
        "run seeded experiments and export report and audit CSVs");
    CLI::App* c_t1 = app.add_subcommand(
        "table1", "reproduce the parameter-recovery benchmark table");
    CLI::App* c_t2 = app.add_subcommand(
        "table2", "reproduce the classification-accuracy benchmark grid");
    CLI::App* c_plot = app.add_subcommand(
        "plotdata", "export a trajectory CSV suitable for plotting");

    for (CLI::App* cmd : {c_sim, c_fit, c_mem, c_t1, c_t2, c_plot})
        add_common(cmd, common);

    c_sim->callback(
        [&]() { rc = do_simulate(common, c_sim->count("--seed") > 0); });
    c_fit->callback(
        [&]() { rc = do_fit(common, c_fit->count("--seed") > 0); });
    c_mem->callback(
        [&]() { rc = do_membership(common, c_mem->count("--seed") > 0); });
    c_t1->callback(
        [&]() { rc = do_table1(common, c_t1->count("--seed") > 0); });
    c_t2->callback(
        [&]() { rc = do_table2(common, c_t2->count("--seed") > 0); });
    c_plot->callback(
        [&]() { rc = do_plotdata(common, c_plot->count("--seed") > 0); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // normalize CLI11's per-error codes onto the documented contract:
        // 0 for --help/--version, 1 for any usage error
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    }
    return rc;
}
