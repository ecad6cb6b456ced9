#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "falldet/cli.hpp"
#include "falldet/error.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(',', pos);
    const std::string tok =
        s.substr(pos, next == std::string::npos ? std::string::npos
                                                : next - pos);
    if (!tok.empty()) out.push_back(tok);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<int> split_csv_int(const std::string& s, const char* flag) {
  std::vector<int> out;
  for (const std::string& tok : split_csv(s)) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      falldet::raise_usage("BadNumber",
                           std::string("cannot parse '") + tok + "' for " +
                               flag);
    }
  }
  return out;
}

// Experiment flags are collected as key=value overrides so the config file,
// the flags, and the echoed artifact all flow through one merge path.
void add_experiment_flags(CLI::App* cmd,
                          std::map<std::string, std::string>& overrides) {
  auto opt = [cmd, &overrides](const std::string& flag, const char* key,
                               const std::string& desc) {
    cmd->add_option_function<std::string>(
        flag,
        [&overrides, key](const std::string& v) { overrides[key] = v; },
        desc);
  };
  auto flag = [cmd, &overrides](const std::string& name, const char* key,
                                const std::string& desc) {
    cmd->add_flag_callback(
        name, [&overrides, key]() { overrides[key] = "true"; }, desc);
  };
  opt("--collection", "collection", "collection id (1|2|3)");
  opt("--feature", "feature", "raw|energy|fourier|fourier_axes");
  opt("--classifier", "classifier", "knn2|knn1|svm2|svm1");
  opt("--window", "window", "window length (51|128)");
  opt("--k", "k", "kNN neighbor count");
  opt("--threshold-rule", "threshold_rule", "percentile:P|youden");
  opt("--folds", "folds", "cross-validation folds");
  opt("--seed", "seed", "64-bit experiment seed");
  flag("--normalize", "normalize", "normalize Fourier bins by |coef 0|");
  opt("--metric", "metric", "euclidean|manhattan");
  opt("--svm-kernel", "svm_kernel", "linear|rbf");
  opt("--svm-c", "svm_c", "two-class SVM box constraint");
  opt("--svm-nu", "svm_nu", "one-class SVM nu in (0,1]");
  opt("--svm-gamma", "svm_gamma", "RBF gamma (<=0 means 1/dim)");
  opt("--dataset1-windows", "dataset1_windows", "pool 1 windows file");
  opt("--dataset2-windows", "dataset2_windows", "pool 2 windows file");
  opt("--windows", "windows", "direct mode: one labeled windows file");
  flag("--holdout", "holdout", "also score the held-out test split");
  flag("--dump-features", "dump_features", "write the feature matrices");
  opt("--out", "out_dir", "output directory");
  opt("--ledger", "ledger", "results ledger path");
}

falldet::ExperimentConfig merge_config(
    const std::string& config_path,
    const std::map<std::string, std::string>& overrides) {
  falldet::ExperimentConfig cfg;
  if (!config_path.empty())
    falldet::apply_config_values(cfg, falldet::read_config_file(config_path));
  falldet::apply_config_values(cfg, overrides);
  return cfg;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"fall-detection experiment pipeline"};
  app.require_subcommand(1);

  falldet::IngestArgs ingest_args;
  CLI::App* ingest = app.add_subcommand(
      "ingest", "parse source datasets into canonical windows files");
  ingest->add_option("--tfall", ingest_args.tfall_dir,
                     "dataset 1: tFall-style archive directory");
  ingest->add_option("--ucihar", ingest_args.ucihar_dir,
                     "dataset 2: UCI-HAR-style dataset directory");
  ingest->add_option("--window", ingest_args.window, "window length (51|128)");
  ingest->add_option("--rate", ingest_args.rate_hz, "target rate in Hz");
  ingest->add_option("--tolerance", ingest_args.tolerance,
                     "malformed-line tolerance ratio");
  ingest->add_option("--seed", ingest_args.seed, "seed echoed in the manifest");
  ingest->add_option("--out", ingest_args.out_dir, "output directory");

  falldet::SynthArgs synth_args;
  std::string synth_profile = "separable";
  CLI::App* synth =
      app.add_subcommand("synth", "generate labeled synthetic windows");
  synth->add_option("--adl", synth_args.adl_count, "ADL window count");
  synth->add_option("--fall", synth_args.fall_count, "FALL window count");
  synth->add_option("--window", synth_args.window, "window length");
  synth->add_option("--rate", synth_args.rate_hz, "sampling rate in Hz");
  synth->add_option("--seed", synth_args.seed, "generator seed");
  synth->add_option("--profile", synth_profile, "separable|hard");
  synth->add_option("--out", synth_args.out, "output windows file");

  std::map<std::string, std::string> overrides;
  std::string config_path;

  CLI::App* run = app.add_subcommand("run", "run one experiment configuration");
  run->add_option("--config", config_path, "flat key=value configuration file");
  add_experiment_flags(run, overrides);

  CLI::App* grid =
      app.add_subcommand("grid", "sweep experiment configurations");
  grid->add_option("--config", config_path, "flat key=value configuration file");
  add_experiment_flags(grid, overrides);
  std::string ax_collections, ax_features, ax_classifiers, ax_windows, ax_ks;
  grid->add_option("--collections", ax_collections, "comma list, e.g. 1,2,3");
  grid->add_option("--features", ax_features, "comma list of extractors");
  grid->add_option("--classifiers", ax_classifiers, "comma list of classifiers");
  grid->add_option("--windows-list", ax_windows, "comma list, e.g. 51,128");
  grid->add_option("--ks", ax_ks, "comma list, e.g. 1,3,5,7");

  std::string ledger_path, report_style = "md";
  CLI::App* report = app.add_subcommand("report", "summarize a results ledger");
  report->add_option("--ledger", ledger_path, "ledger file to summarize")
      ->required();
  report->add_option("--style", report_style, "csv|md");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // non-help parse problems are usage errors
  }

  if (*ingest) {
    const falldet::IngestSummary s = falldet::cmd_ingest(ingest_args);
    if (!ingest_args.tfall_dir.empty()) {
      std::cout << "dataset1: " << s.d1_recordings << " recordings -> "
                << s.d1_windows << " windows (" << s.d1_warnings
                << " warnings, " << s.d1_skipped << " too short)\n";
    }
    if (!ingest_args.ucihar_dir.empty())
      std::cout << "dataset2: " << s.d2_windows << " windows\n";
    std::cout << "manifest: " << ingest_args.out_dir << "/ingest.txt\n";
  } else if (*synth) {
    synth_args.profile = falldet::synth_profile_from_string(synth_profile);
    falldet::cmd_synth(synth_args);
    std::cout << "wrote " << synth_args.adl_count + synth_args.fall_count
              << " windows to " << synth_args.out << "\n";
  } else if (*run) {
    const falldet::ExperimentConfig cfg = merge_config(config_path, overrides);
    const falldet::ExperimentReport rep = falldet::cmd_run(cfg);
    std::cout << falldet::emit_table(rep, falldet::TableStyle::MARKDOWN);
    std::cout << "\nartifacts under " << cfg.out_dir << "\n";
  } else if (*grid) {
    falldet::ExperimentConfig base = merge_config(config_path, overrides);
    falldet::GridAxes axes;
    axes.collections = split_csv(ax_collections);
    axes.features = split_csv(ax_features);
    axes.classifiers = split_csv(ax_classifiers);
    axes.windows = split_csv_int(ax_windows, "--windows-list");
    axes.ks = split_csv_int(ax_ks, "--ks");
    const falldet::GridOutcome out = falldet::cmd_grid(base, axes);
    std::cout << "grid: " << out.completed << " completed, " << out.skipped
              << " skipped, " << out.failed << " failed\n";
    if (out.failed > 0)
      std::cout << "failures recorded in " << base.out_dir
                << "/failures.txt\n";
  } else if (*report) {
    falldet::TableStyle style;
    if (report_style == "csv") {
      style = falldet::TableStyle::CSV;
    } else if (report_style == "md") {
      style = falldet::TableStyle::MARKDOWN;
    } else {
      falldet::raise_usage("BadStyle", "style must be csv or md");
    }
    std::cout << falldet::cmd_report(ledger_path, style);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const falldet::Error& e) {
    std::cerr << "falldet: " << e.what() << "\n";
    switch (e.kind()) {
      case falldet::ErrorKind::Usage: return 1;
      case falldet::ErrorKind::Data: return 2;
      case falldet::ErrorKind::Numeric: return 3;
    }
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "falldet: internal error: " << e.what() << "\n";
    return 3;
  }
}
