#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "falldet/crossval.hpp"
#include "falldet/synth.hpp"
#include "falldet/types.hpp"

namespace falldet {

// Flat experiment configuration. Values stay textual until resolve time so a
// config file, the CLI flags, and the echoed artifact all share one shape;
// everything is validated before any work starts.
struct ExperimentConfig {
  std::string collection;  // "C1".."C3"; empty selects direct-windows mode
  std::string feature = "fourier";
  std::string classifier = "knn2";
  int window = 51;
  int k = 1;
  std::string threshold_rule = "percentile:95";
  int folds = 10;
  std::uint64_t seed = 1;
  bool normalize = false;
  std::string metric = "euclidean";
  std::string svm_kernel = "rbf";
  double svm_c = 1.0;
  double svm_nu = 0.1;
  double svm_gamma = 0.0;  // <= 0 resolves to 1/dim
  std::string dataset1_windows;  // canonical windows file, pool 1
  std::string dataset2_windows;  // canonical windows file, pool 2
  std::string windows;           // direct mode: one labeled windows file
  bool holdout = false;          // also fit train split, score test split
  bool dump_features = false;
  std::string out_dir = "out";
  std::string ledger;  // defaults to <out_dir>/ledger.txt
};

// `key = value` per line, '#' comments; unknown keys are usage errors.
std::map<std::string, std::string> read_config_file(const std::string& path);
void apply_config_values(ExperimentConfig& cfg,
                         const std::map<std::string, std::string>& kv);

// Round-trippable echo of the configuration (readable by read_config_file).
std::string config_echo(const ExperimentConfig& cfg);

RunInfo run_info(const ExperimentConfig& cfg);

struct IngestArgs {
  std::string tfall_dir;   // dataset 1
  std::string ucihar_dir;  // dataset 2
  int window = 51;
  double rate_hz = 50.0;
  double tolerance = 0.01;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

struct IngestSummary {
  std::size_t d1_recordings = 0;
  std::size_t d1_windows = 0;
  std::size_t d1_warnings = 0;
  std::size_t d1_skipped = 0;
  std::size_t d2_windows = 0;
};

IngestSummary cmd_ingest(const IngestArgs& args);

struct SynthArgs {
  std::size_t adl_count = 250;
  std::size_t fall_count = 250;
  int window = 51;
  double rate_hz = 50.0;
  std::uint64_t seed = 1;
  SynthProfile profile = SynthProfile::SEPARABLE;
  std::string out = "synth_windows.txt";
};

void cmd_synth(const SynthArgs& args);

// Runs one experiment cell: loads windows, builds the collection (unless in
// direct mode), extracts features, cross-validates, writes report.csv /
// report.md / config.txt (+ manifest, holdout, features when applicable)
// under out_dir and appends one ledger line.
ExperimentReport cmd_run(const ExperimentConfig& cfg);

struct GridAxes {
  std::vector<std::string> collections;
  std::vector<std::string> features;
  std::vector<std::string> classifiers;
  std::vector<int> windows;
  std::vector<int> ks;
};

struct GridOutcome {
  std::size_t completed = 0;
  std::size_t skipped = 0;  // already present in the ledger
  std::size_t failed = 0;
};

// One cmd_run per grid cell under <out_dir>/cells/...; cells already in the
// shared ledger are skipped, failing cells are recorded and the grid moves
// on.
GridOutcome cmd_grid(const ExperimentConfig& base, const GridAxes& axes);

// Renders the ledger as a summary table.
std::string cmd_report(const std::string& ledger_path, TableStyle style);

}  // namespace falldet
