#include "clumem/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace clumem {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw std::runtime_error("read failure on " + path);
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failure on " + path);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

struct LineReader {
    std::istringstream in;
    std::string path;
    std::size_t lineno = 0;

    LineReader(std::string text, std::string p)
        : in(std::move(text)), path(std::move(p)) {}

    bool next(std::string& line) {
        if (!std::getline(in, line)) return false;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                    ": " + msg);
    }
};

double to_double(const std::string& s, const LineReader& ctx) {
    if (s.empty()) ctx.fail("empty numeric field");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) ctx.fail("invalid number '" + s + "'");
    return v;
}

std::uint64_t to_u64(const std::string& s, const LineReader& ctx) {
    if (s.empty() || s[0] == '-') ctx.fail("invalid count '" + s + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        ctx.fail("invalid count '" + s + "'");
    return v;
}

void require_2d(const SimulationRecord& record) {
    if (record.d != 2)
        throw std::invalid_argument("CSV record formats are 2-d only");
}

} // namespace

void write_particle_csv(const SimulationRecord& record,
                        const std::string& path) {
    require_2d(record);
    std::string out;
    out.reserve(record.T * 64 + 32);
    out += "t,px,py,inside,nearest\n";
    for (std::size_t t = 0; t < record.T; ++t) {
        out += std::to_string(t + 1);
        out += ',';
        out += fmt17(record.particle[t * 2]);
        out += ',';
        out += fmt17(record.particle[t * 2 + 1]);
        out += ',';
        out += record.inside[t] ? '1' : '0';
        out += ',';
        if (record.inside[t]) out += std::to_string(record.nearest[t]);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_clusters_csv(const SimulationRecord& record,
                        const std::string& path) {
    require_2d(record);
    std::string out;
    out.reserve(record.T * record.N * 56 + 16);
    out += "t,n,cx,cy\n";
    for (std::size_t t = 0; t < record.T; ++t) {
        for (std::size_t n = 0; n < record.N; ++n) {
            const double* c = record.cluster_at(t, n);
            out += std::to_string(t + 1);
            out += ',';
            out += std::to_string(n);
            out += ',';
            out += fmt17(c[0]);
            out += ',';
            out += fmt17(c[1]);
            out += '\n';
        }
    }
    write_text_file(path, out);
}

SimulationRecord read_particle_csv(const std::string& path) {
    LineReader lr(read_text_file(path), path);
    std::string line;
    if (!lr.next(line)) throw std::invalid_argument(path + ": empty file");
    if (line != "t,px,py,inside,nearest")
        lr.fail("unexpected header '" + line + "'");
    SimulationRecord rec;
    rec.d = 2;
    while (lr.next(line)) {
        const std::vector<std::string> f = split_fields(line);
        if (f.size() != 5) lr.fail("expected 5 fields");
        if (to_u64(f[0], lr) != rec.T + 1)
            lr.fail("timepoints must be 1-based and consecutive");
        rec.particle.push_back(to_double(f[1], lr));
        rec.particle.push_back(to_double(f[2], lr));
        const std::uint64_t flag = to_u64(f[3], lr);
        if (flag > 1) lr.fail("inside flag must be 0 or 1");
        rec.inside.push_back(static_cast<std::uint8_t>(flag));
        if (flag) {
            if (f[4].empty()) lr.fail("inside rows need a nearest index");
            rec.nearest.push_back(
                static_cast<std::int64_t>(to_u64(f[4], lr)));
        } else {
            if (!f[4].empty()) lr.fail("outside rows must leave nearest empty");
            rec.nearest.push_back(-1);
        }
        ++rec.T;
    }
    if (rec.T == 0) throw std::invalid_argument(path + ": no data rows");
    return rec;
}

SimulationRecord read_record(const std::string& particle_path,
                             const std::string& clusters_path) {
    SimulationRecord rec = read_particle_csv(particle_path);
    LineReader lr(read_text_file(clusters_path), clusters_path);
    std::string line;
    if (!lr.next(line))
        throw std::invalid_argument(clusters_path + ": empty file");
    if (line != "t,n,cx,cy") lr.fail("unexpected header '" + line + "'");
    std::vector<double> flat;
    std::size_t count = 0;
    std::size_t N = 0;
    bool n_known = false;
    while (lr.next(line)) {
        const std::vector<std::string> f = split_fields(line);
        if (f.size() != 4) lr.fail("expected 4 fields");
        const std::uint64_t t = to_u64(f[0], lr);
        const std::uint64_t n = to_u64(f[1], lr);
        if (!n_known && t == 2 && count > 0) {
            N = count;
            n_known = true;
        }
        if (n_known) {
            if (t != 1 + count / N || n != count % N)
                lr.fail("rows must be grouped by timepoint with cluster "
                        "index ascending");
        } else if (t != 1 || n != count) {
            lr.fail("rows must be grouped by timepoint with cluster index "
                    "ascending");
        }
        flat.push_back(to_double(f[2], lr));
        flat.push_back(to_double(f[3], lr));
        ++count;
    }
    if (!n_known) N = count; // single-timepoint file, or no clusters at all
    if (count != rec.T * N)
        throw std::invalid_argument(clusters_path + ": expected " +
                                    std::to_string(rec.T * N) +
                                    " data rows, found " +
                                    std::to_string(count));
    rec.N = N;
    rec.clusters = std::move(flat);
    for (std::size_t t = 0; t < rec.T; ++t) {
        if (rec.inside[t] &&
            (rec.nearest[t] < 0 ||
             static_cast<std::size_t>(rec.nearest[t]) >= rec.N))
            throw std::invalid_argument(clusters_path +
                                        ": nearest index out of range at t=" +
                                        std::to_string(t + 1));
    }
    return rec;
}

void write_membership_csv(const SimulationRecord& record,
                          const MembershipEstimate& estimate, std::size_t k,
                          const std::string& path) {
    if (estimate.e.size() != record.T)
        throw std::invalid_argument("estimate length must match the record");
    const std::size_t lo = k + 1;
    const std::size_t hi = record.T > k ? record.T - k : 0;
    const std::size_t interior = hi >= lo ? hi - lo + 1 : 0;
    if (estimate.labels.size() != interior)
        throw std::invalid_argument("label count must match the interior");
    std::string out;
    out.reserve(record.T * 40 + 16);
    out += "t,e,label,truth\n";
    for (std::size_t t = 1; t <= record.T; ++t) {
        out += std::to_string(t);
        out += ',';
        out += fmt17(estimate.e[t - 1]);
        out += ',';
        if (t >= lo && t <= hi) out += estimate.labels[t - lo] ? '1' : '0';
        out += ',';
        out += record.inside[t - 1] ? '1' : '0';
        out += '\n';
    }
    write_text_file(path, out);
}

void write_terms_csv(const MembershipObjective& objective,
                     const std::string& path) {
    std::string out;
    out.reserve(objective.terms.size() * 40 + 24);
    out += "t,target,weight,tag\n";
    for (const QuadTerm& term : objective.terms) {
        out += std::to_string(term.t);
        out += ',';
        out += term.target ? '1' : '0';
        out += ',';
        out += fmt17(term.weight);
        out += ',';
        out += term.tag == BetaTag::Radius ? "radius" : "similarity";
        out += '\n';
    }
    write_text_file(path, out);
}

void write_thresholds_csv(const std::vector<ThresholdEstimate>& parts,
                          const std::string& path) {
    std::string out = "part,h,e_in,e_out,trials,seed\n";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const ThresholdEstimate& p = parts[i];
        out += std::to_string(i);
        out += ',';
        out += fmt17(p.h);
        out += ',';
        out += fmt17(p.E_in);
        out += ',';
        out += fmt17(p.E_out);
        out += ',';
        out += std::to_string(p.trials);
        out += ',';
        out += std::to_string(p.seed);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_gmm_kv(const GmmParams& params, const std::string& path) {
    params.validate();
    if (params.dim() != 2)
        throw std::invalid_argument("key-value parameter files are 2-d only");
    std::string out;
    out += "alpha_in = " + fmt17(params.alpha_in) + "\n";
    out += "alpha_out = " + fmt17(params.alpha_out) + "\n";
    out += "mu_in_x = " + fmt17(params.mu_in[0]) + "\n";
    out += "mu_in_y = " + fmt17(params.mu_in[1]) + "\n";
    out += "mu_out_x = " + fmt17(params.mu_out[0]) + "\n";
    out += "mu_out_y = " + fmt17(params.mu_out[1]) + "\n";
    out += "var_in = " + fmt17(params.var_in) + "\n";
    out += "var_out = " + fmt17(params.var_out) + "\n";
    write_text_file(path, out);
}

namespace {

double kv_double(const KvEntry& e) {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (e.value.empty() || end != e.value.c_str() + e.value.size())
        throw std::invalid_argument("line " + std::to_string(e.line) +
                                    ": invalid number '" + e.value +
                                    "' for key '" + e.key + "'");
    return v;
}

std::uint64_t kv_u64(const KvEntry& e) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (e.value.empty() || e.value[0] == '-' ||
        end != e.value.c_str() + e.value.size() || errno == ERANGE)
        throw std::invalid_argument("line " + std::to_string(e.line) +
                                    ": invalid integer '" + e.value +
                                    "' for key '" + e.key + "'");
    return v;
}

std::size_t kv_size(const KvEntry& e) {
    return static_cast<std::size_t>(kv_u64(e));
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t')) --b;
    return s.substr(a, b - a);
}

std::vector<double> kv_vec(const KvEntry& e) {
    std::vector<double> out;
    for (const std::string& field : split_fields(e.value)) {
        KvEntry one{e.key, trim(field), e.line};
        out.push_back(kv_double(one));
    }
    return out;
}

} // namespace

GmmParams read_gmm_kv(const std::string& path) {
    const KvFile kv = parse_kv_file(path);
    if (!kv.blocks.empty())
        throw std::invalid_argument(path + ": unexpected block");
    GmmParams p;
    p.mu_in.assign(2, 0.0);
    p.mu_out.assign(2, 0.0);
    bool seen[8] = {};
    try {
        for (const KvEntry& e : kv.base) {
            if (e.key == "alpha_in") {
                p.alpha_in = kv_double(e);
                seen[0] = true;
            } else if (e.key == "alpha_out") {
                p.alpha_out = kv_double(e);
                seen[1] = true;
            } else if (e.key == "mu_in_x") {
                p.mu_in[0] = kv_double(e);
                seen[2] = true;
            } else if (e.key == "mu_in_y") {
                p.mu_in[1] = kv_double(e);
                seen[3] = true;
            } else if (e.key == "mu_out_x") {
                p.mu_out[0] = kv_double(e);
                seen[4] = true;
            } else if (e.key == "mu_out_y") {
                p.mu_out[1] = kv_double(e);
                seen[5] = true;
            } else if (e.key == "var_in") {
                p.var_in = kv_double(e);
                seen[6] = true;
            } else if (e.key == "var_out") {
                p.var_out = kv_double(e);
                seen[7] = true;
            } else {
                throw std::invalid_argument("line " + std::to_string(e.line) +
                                            ": unknown key '" + e.key + "'");
            }
        }
        for (bool s : seen)
            if (!s)
                throw std::invalid_argument(
                    "missing keys; all eight parameters are required");
        p.validate();
    } catch (const std::invalid_argument& ex) {
        throw std::invalid_argument(path + ": " + ex.what());
    }
    return p;
}

void export_trajectory_plotdata(const SimulationRecord& record, double r,
                                const std::string& path) {
    require_2d(record);
    if (!(r > 0.0))
        throw std::invalid_argument("cluster radius must be positive");
    std::string out;
    out.reserve(record.T * 88 + 40);
    out += "t,px,py,inside,nearest,cx,cy,r\n";
    const std::string r17 = fmt17(r);
    for (std::size_t t = 0; t < record.T; ++t) {
        out += std::to_string(t + 1);
        out += ',';
        out += fmt17(record.particle[t * 2]);
        out += ',';
        out += fmt17(record.particle[t * 2 + 1]);
        out += ',';
        out += record.inside[t] ? '1' : '0';
        out += ',';
        if (record.inside[t]) {
            const std::int64_t n = record.nearest[t];
            if (n < 0 || static_cast<std::size_t>(n) >= record.N)
                throw std::invalid_argument(
                    "nearest index out of range at t=" + std::to_string(t + 1));
            const double* c = record.cluster_at(t, static_cast<std::size_t>(n));
            out += std::to_string(n);
            out += ',';
            out += fmt17(c[0]);
            out += ',';
            out += fmt17(c[1]);
        } else {
            out += ",,";
        }
        out += ',';
        out += r17;
        out += '\n';
    }
    write_text_file(path, out);
}

KvFile parse_kv_text(const std::string& text) {
    KvFile out;
    std::vector<KvEntry>* target = &out.base;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("line " + std::to_string(lineno) +
                                            ": unterminated block header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty())
                throw std::invalid_argument("line " + std::to_string(lineno) +
                                            ": empty block name");
            out.blocks.push_back({name, {}, lineno});
            target = &out.blocks.back().entries;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": empty key");
        if (value.empty())
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": empty value");
        target->push_back({key, value, lineno});
    }
    return out;
}

KvFile parse_kv_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return parse_kv_text(text);
    } catch (const std::invalid_argument& ex) {
        throw std::invalid_argument(path + ": " + ex.what());
    }
}

namespace {

DistanceKind parse_distance(const KvEntry& e) {
    if (e.value == "mv") return DistanceKind::MV;
    if (e.value == "ws") return DistanceKind::WS;
    if (e.value == "mmd") return DistanceKind::MMD;
    throw std::invalid_argument("line " + std::to_string(e.line) +
                                ": distance must be one of mv, ws, mmd");
}

Variant parse_variant(const KvEntry& e) {
    if (e.value == "gaussian") return Variant::GaussianReference;
    if (e.value == "closest") return Variant::ClosestCluster;
    throw std::invalid_argument("line " + std::to_string(e.line) +
                                ": variant must be gaussian or closest");
}

} // namespace

ExperimentConfig config_from_kv(const std::vector<KvEntry>& entries,
                                ExperimentConfig base) {
    for (const KvEntry& e : entries) {
        const std::string& k = e.key;
        if (k == "sim.d") {
            base.sim.d = kv_size(e);
        } else if (k == "sim.T") {
            base.sim.T = kv_size(e);
        } else if (k == "sim.N") {
            base.sim.N = kv_size(e);
        } else if (k == "sim.r") {
            base.sim.r = kv_double(e);
        } else if (k == "sim.b") {
            base.sim.b = kv_double(e);
        } else if (k == "sim.m_c") {
            base.sim.m_c = kv_vec(e);
        } else if (k == "sim.sigma_c") {
            base.sim.sigma_c = kv_double(e);
        } else if (k == "sim.sigma_pc") {
            base.sim.sigma_pc = kv_double(e);
        } else if (k == "sim.m_out") {
            base.sim.m_out = kv_vec(e);
        } else if (k == "sim.sigma_out") {
            base.sim.sigma_out = kv_double(e);
        } else if (k == "R") {
            base.R = kv_double(e);
        } else if (k == "k") {
            base.k = kv_size(e);
        } else if (k == "distance") {
            base.distance = parse_distance(e);
        } else if (k == "variant") {
            base.variant = parse_variant(e);
        } else if (k == "beta_r") {
            base.beta_r = kv_double(e);
        } else if (k == "beta_s") {
            base.beta_s = kv_double(e);
        } else if (k == "runs") {
            base.runs = kv_size(e);
        } else if (k == "trials") {
            base.trials = kv_size(e);
        } else if (k == "master_seed") {
            base.master_seed = kv_u64(e);
        } else if (k == "solver.learning_rate") {
            base.solver.learning_rate = kv_double(e);
        } else if (k == "solver.iterations") {
            base.solver.iterations = kv_size(e);
        } else if (k == "solver.adam_beta1") {
            base.solver.adam_beta1 = kv_double(e);
        } else if (k == "solver.adam_beta2") {
            base.solver.adam_beta2 = kv_double(e);
        } else if (k == "solver.epsilon") {
            base.solver.epsilon = kv_double(e);
        } else if (k == "solver.init_value") {
            base.solver.init_value = kv_double(e);
        } else {
            throw std::invalid_argument("line " + std::to_string(e.line) +
                                        ": unknown key '" + k + "'");
        }
    }
    return base;
}

namespace {

std::string join_vec(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt17(v[i]);
    }
    return out;
}

} // namespace

std::string config_echo(const ExperimentConfig& c) {
    std::string out;
    out += "sim.d = " + std::to_string(c.sim.d) + "\n";
    out += "sim.T = " + std::to_string(c.sim.T) + "\n";
    out += "sim.N = " + std::to_string(c.sim.N) + "\n";
    out += "sim.r = " + fmt17(c.sim.r) + "\n";
    out += "sim.b = " + fmt17(c.sim.b) + "\n";
    out += "sim.m_c = " + join_vec(c.sim.m_c) + "\n";
    out += "sim.sigma_c = " + fmt17(c.sim.sigma_c) + "\n";
    out += "sim.sigma_pc = " + fmt17(c.sim.sigma_pc) + "\n";
    out += "sim.m_out = " + join_vec(c.sim.m_out) + "\n";
    out += "sim.sigma_out = " + fmt17(c.sim.sigma_out) + "\n";
    out += "R = " + fmt17(c.R) + "\n";
    out += "k = " + std::to_string(c.k) + "\n";
    out += std::string("distance = ") + distance_name(c.distance) + "\n";
    out += std::string("variant = ") + variant_name(c.variant) + "\n";
    out += "beta_r = " + fmt17(c.beta_r) + "\n";
    out += "beta_s = " + fmt17(c.beta_s) + "\n";
    out += "runs = " + std::to_string(c.runs) + "\n";
    out += "trials = " + std::to_string(c.trials) + "\n";
    out += "master_seed = " + std::to_string(c.master_seed) + "\n";
    out += "solver.learning_rate = " + fmt17(c.solver.learning_rate) + "\n";
    out += "solver.iterations = " + std::to_string(c.solver.iterations) + "\n";
    out += "solver.adam_beta1 = " + fmt17(c.solver.adam_beta1) + "\n";
    out += "solver.adam_beta2 = " + fmt17(c.solver.adam_beta2) + "\n";
    out += "solver.epsilon = " + fmt17(c.solver.epsilon) + "\n";
    out += "solver.init_value = " + fmt17(c.solver.init_value) + "\n";
    return out;
}

namespace {

const char kReportHeader[] =
    "cell_id,beta_r,beta_s,distance,variant,mean_accuracy,stddev\n";

void append_report_row(std::string& out, const std::string& id, double beta_r,
                       double beta_s, DistanceKind kind, Variant variant,
                       double mean, double sd) {
    out += id;
    out += ',';
    out += fmt17(beta_r);
    out += ',';
    out += fmt17(beta_s);
    out += ',';
    out += distance_name(kind);
    out += ',';
    out += variant_name(variant);
    out += ',';
    out += fmt17(mean);
    out += ',';
    out += fmt17(sd);
    out += '\n';
}

} // namespace

void write_report_csv(const std::vector<NamedReport>& reports,
                      const std::string& path) {
    std::string out = kReportHeader;
    for (const NamedReport& nr : reports) {
        const ExperimentConfig& c = nr.report.config;
        append_report_row(out, nr.id, c.beta_r, c.beta_s, c.distance,
                          c.variant, nr.report.mean_accuracy,
                          nr.report.stddev);
    }
    write_text_file(path, out);
}

void write_report_csv(const std::vector<Table2Cell>& cells,
                      const std::string& path) {
    std::string out = kReportHeader;
    for (const Table2Cell& cell : cells)
        append_report_row(out, cell.cell_id(), cell.beta_r, cell.beta_s,
                          cell.kind, cell.variant, cell.mean_accuracy,
                          cell.stddev);
    write_text_file(path, out);
}

void write_table1_csv(const std::vector<Table1RowResult>& rows,
                      const std::string& path) {
    std::string out = "row,scalar,truth,mean_estimate,reference\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const Table1Scalar& s : rows[i].scalars) {
            out += std::to_string(i + 1);
            out += ',';
            out += s.name;
            out += ',';
            out += fmt17(s.truth);
            out += ',';
            out += fmt17(s.mean_estimate);
            out += ',';
            out += fmt17(s.reference);
            out += '\n';
        }
    }
    write_text_file(path, out);
}

std::string format_table1_text(const std::vector<Table1RowResult>& rows) {
    std::string out = "parameter recovery: mean EM estimates next to ground "
                      "truth and reference values\n";
    char buf[160];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Table1Row& row = rows[i].row;
        std::snprintf(buf, sizeof buf,
                      "\nrow %zu: T=%zu sigma_in=%g sigma_out=%g "
                      "mu_in=(%g,%g) mu_out=(%g,%g) alpha_in=%g (%zu runs)\n",
                      i + 1, row.T, row.sigma_in, row.sigma_out, row.mu_in[0],
                      row.mu_in[1], row.mu_out[0], row.mu_out[1], row.alpha_in,
                      rows[i].fits.size());
        out += buf;
        std::snprintf(buf, sizeof buf, "  %-10s %9s %9s %9s\n", "scalar",
                      "truth", "mean", "reference");
        out += buf;
        for (const Table1Scalar& s : rows[i].scalars) {
            std::snprintf(buf, sizeof buf, "  %-10s %9.3f %9.3f %9.3f\n",
                          s.name.c_str(), s.truth, s.mean_estimate,
                          s.reference);
            out += buf;
        }
    }
    return out;
}

std::string format_table2_text(const std::vector<Table2Cell>& cells) {
    std::string out =
        "mean accuracy over completed runs; reference values in parentheses; "
        "cells short of\nrequested runs show [completed/requested]\n";
    std::vector<double> sets;
    for (const Table2Cell& c : cells)
        if (std::find(sets.begin(), sets.end(), c.sigma_out) == sets.end())
            sets.push_back(c.sigma_out);
    std::vector<std::pair<double, double>> combos;
    for (const Table2Cell& c : cells) {
        const std::pair<double, double> p{c.beta_r, c.beta_s};
        if (std::find(combos.begin(), combos.end(), p) == combos.end())
            combos.push_back(p);
    }
    const Variant variants[2] = {Variant::GaussianReference,
                                 Variant::ClosestCluster};
    const DistanceKind kinds[3] = {DistanceKind::MV, DistanceKind::WS,
                                   DistanceKind::MMD};
    char buf[200];
    for (double s : sets) {
        std::snprintf(buf, sizeof buf, "\nparameter set sigma_out=%g\n", s);
        out += buf;
        std::snprintf(buf, sizeof buf, "  %-6s %-6s", "beta_r", "beta_s");
        out += buf;
        for (Variant v : variants) {
            for (DistanceKind kd : kinds) {
                std::string head = std::string(distance_name(kd)) + " " +
                                   variant_name(v);
                std::snprintf(buf, sizeof buf, " %-14s", head.c_str());
                out += buf;
            }
        }
        out += '\n';
        for (const auto& combo : combos) {
            bool any = false;
            std::string line;
            std::snprintf(buf, sizeof buf, "  %-6g %-6g", combo.first,
                          combo.second);
            line += buf;
            for (Variant v : variants) {
                for (DistanceKind kd : kinds) {
                    const Table2Cell* cell = nullptr;
                    for (const Table2Cell& c : cells) {
                        if (c.sigma_out == s && c.beta_r == combo.first &&
                            c.beta_s == combo.second && c.variant == v &&
                            c.kind == kd) {
                            cell = &c;
                            break;
                        }
                    }
                    if (!cell) {
                        std::snprintf(buf, sizeof buf, " %-14s", "-");
                        line += buf;
                        continue;
                    }
                    any = true;
                    std::string text;
                    char cb[64];
                    std::snprintf(cb, sizeof cb, "%.3f (%.2f)",
                                  cell->mean_accuracy, cell->reference);
                    text = cb;
                    if (cell->completed < cell->run_results.size()) {
                        std::snprintf(cb, sizeof cb, " [%zu/%zu]",
                                      cell->completed,
                                      cell->run_results.size());
                        text += cb;
                    }
                    std::snprintf(buf, sizeof buf, " %-14s", text.c_str());
                    line += buf;
                }
            }
            if (any) {
                out += line;
                out += '\n';
            }
        }
    }
    return out;
}

} // namespace clumem
