#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbody/common.hpp"

namespace rbody {

struct PipelineSpec {
  std::string config_path;
  std::vector<std::string> stages;  // eqsolve, expand, partition, sample, verify, all
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int k0 = 2;     // orders beyond the leading one kept in the partition bracket
  int nmax = 2;   // highest correlator order reported
  int jobs = 1;
  int N = -1;     // overrides the configuration when positive
  long steps = -1;  // sweeps after burn-in
  int chains = -1;
  int t_nodes = 16;  // interpolation nodes for the free energy
};

struct PipelineResult {
  int exit_code = 0;
  std::string failed_stage;
  std::string message;
  nlohmann::json manifest;
};

const std::vector<std::string>& stage_names();
// Stages in execution order; "all" expands to every stage.
std::vector<std::string> normalize_stages(const std::vector<std::string>& stages);

PipelineResult run_pipeline(const PipelineSpec& spec);

// Plot data from the artifacts in out_dir; kinds: density, w1, charfn.
const std::vector<std::string>& plot_kinds();
std::string emit_plot_data(const std::string& out_dir, const std::string& kind);

// Binary chain file: header then doubles per sample (observables, then per-segment counts).
struct ChainFile {
  std::string config_hash;
  int N = 0;
  std::uint64_t seed = 0;
  int chains = 0;
  int observables = 0;
  int segments = 0;
  std::vector<std::vector<std::vector<double>>> rows;  // [chain][sample][column]
};
void write_chain_file(const std::string& path, const ChainFile& f);
ChainFile read_chain_file(const std::string& path);

std::string file_hash(const std::string& path);

}  // namespace rbody
