#pragma once

// File formats: CSV schemas for records, memberships, terms and reports;
// the flat key-value configuration format with override blocks; canonical
// config echo. All floating point is written with 17 significant digits so
// every file round-trips bit-exactly.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clumem/experiment.hpp"
#include "clumem/gmm.hpp"
#include "clumem/membership.hpp"
#include "clumem/sim.hpp"
#include "clumem/solve.hpp"

namespace clumem {

std::string fmt17(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// record CSVs. Particle header `t,px,py,inside,nearest` with nearest empty
// when outside; clusters header `t,n,cx,cy`; t is 1-based.
void write_particle_csv(const SimulationRecord& record,
                        const std::string& path);
void write_clusters_csv(const SimulationRecord& record,
                        const std::string& path);
SimulationRecord read_particle_csv(const std::string& path);
SimulationRecord read_record(const std::string& particle_path,
                             const std::string& clusters_path);

// membership estimates, header `t,e,label,truth`; label is empty outside
// the interior [k+1, T-k]
void write_membership_csv(const SimulationRecord& record,
                          const MembershipEstimate& estimate, std::size_t k,
                          const std::string& path);

// objective terms, header `t,target,weight,tag`
void write_terms_csv(const MembershipObjective& objective,
                     const std::string& path);

// threshold audit dump, header `part,h,e_in,e_out,trials,seed`
void write_thresholds_csv(const std::vector<ThresholdEstimate>& parts,
                          const std::string& path);

// fitted parameters as flat key-value text (keys alpha_in, alpha_out,
// mu_in_x, mu_in_y, mu_out_x, mu_out_y, var_in, var_out); 2-d only
void write_gmm_kv(const GmmParams& params, const std::string& path);
GmmParams read_gmm_kv(const std::string& path);

// Figure-style trajectory dump, header `t,px,py,inside,nearest,cx,cy,r`;
// nearest/cx/cy are empty when the particle is outside, r is the cluster
// radius used by the simulation
void export_trajectory_plotdata(const SimulationRecord& record, double r,
                                const std::string& path);

// configuration files: `key = value` lines, full-line `#` comments, vectors
// comma-separated; `[name]` starts an override block. Later duplicates of a
// key override earlier ones.
struct KvEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct KvBlock {
    std::string name;
    std::vector<KvEntry> entries;
    std::size_t line = 0;
};

struct KvFile {
    std::vector<KvEntry> base;
    std::vector<KvBlock> blocks;
};

KvFile parse_kv_text(const std::string& text);
KvFile parse_kv_file(const std::string& path);

// applies entries on top of `base`; unknown keys and malformed values throw
// std::invalid_argument naming the line
ExperimentConfig config_from_kv(const std::vector<KvEntry>& entries,
                                ExperimentConfig base);

// canonical serialization; parsing it back reproduces the config exactly
std::string config_echo(const ExperimentConfig& config);

// machine-readable report, header exactly
// `cell_id,beta_r,beta_s,distance,variant,mean_accuracy,stddev`
struct NamedReport {
    std::string id;
    ExperimentReport report;
};

void write_report_csv(const std::vector<NamedReport>& reports,
                      const std::string& path);
void write_report_csv(const std::vector<Table2Cell>& cells,
                      const std::string& path);

// benchmark tables: machine-readable CSV plus aligned human-readable text
void write_table1_csv(const std::vector<Table1RowResult>& rows,
                      const std::string& path);
std::string format_table1_text(const std::vector<Table1RowResult>& rows);
std::string format_table2_text(const std::vector<Table2Cell>& cells);

} // namespace clumem
