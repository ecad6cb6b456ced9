#include "falldet/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "falldet/features.hpp"
#include "falldet/ingest.hpp"
#include "falldet/pipeline.hpp"
#include "falldet/rng.hpp"
#include "falldet/windows_io.hpp"

namespace fs = std::filesystem;

namespace falldet {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int to_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    raise_usage("BadNumber", "cannot parse integer '" + s + "' for " + key);
  }
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    raise_usage("BadNumber", "cannot parse number '" + s + "' for " + key);
  }
}

std::uint64_t to_u64(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    raise_usage("BadNumber", "cannot parse integer '" + s + "' for " + key);
  }
}

bool to_bool(const std::string& s, const std::string& key) {
  const std::string v = lower(s);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  raise_usage("BadNumber", "cannot parse boolean '" + s + "' for " + key);
}

// Resolved enum view of an ExperimentConfig; construction validates every
// field before any work starts.
struct Resolved {
  bool direct = false;
  CollectionId collection = CollectionId::C1;
  Extractor extractor = Extractor::FOURIER;
  ClassifierKind kind = ClassifierKind::KNN2;
  ClassifierSpec cspec;
};

Resolved resolve(const ExperimentConfig& cfg) {
  Resolved r;
  r.direct = cfg.collection.empty();
  if (!r.direct) r.collection = collection_from_string(cfg.collection);
  if (r.direct && cfg.windows.empty()) {
    raise_usage("MissingInput",
                "set collection=C1..C3 (with dataset windows files) or "
                "windows=FILE for direct mode");
  }
  r.extractor = extractor_from_string(cfg.feature);
  r.kind = classifier_from_string(cfg.classifier);
  if (cfg.window != 51 && cfg.window != 128)
    raise_usage("BadWindowLength", "window must be 51 or 128");
  if (cfg.k < 1) raise_usage("BadK", "k must be >= 1");
  if (r.kind == ClassifierKind::KNN2 && cfg.k % 2 == 0)
    raise_usage("BadK", "two-class kNN needs odd k");
  if (cfg.folds < 2) raise_usage("BadFolds", "folds must be >= 2");
  if (!(cfg.svm_c > 0.0)) raise_usage("BadC", "svm_c must be positive");
  if (!(cfg.svm_nu > 0.0 && cfg.svm_nu <= 1.0))
    raise_usage("BadNu", "svm_nu must be in (0, 1]");

  SvmParams sp;
  sp.kind = r.kind == ClassifierKind::SVM1 ? SvmKind::ONE_CLASS
                                           : SvmKind::TWO_CLASS;
  const std::string kernel = lower(cfg.svm_kernel);
  if (kernel == "linear") {
    sp.kernel.type = KernelSpec::LINEAR;
  } else if (kernel == "rbf") {
    sp.kernel.type = KernelSpec::RBF;
  } else {
    raise_usage("BadKernel", "unknown svm kernel '" + cfg.svm_kernel + "'");
  }
  sp.kernel.gamma = cfg.svm_gamma;
  sp.c = cfg.svm_c;
  sp.nu = cfg.svm_nu;

  r.cspec.kind = r.kind;
  r.cspec.k = cfg.k;
  r.cspec.metric = metric_from_string(cfg.metric);
  r.cspec.rule = threshold_rule_from_string(cfg.threshold_rule);
  r.cspec.svm = sp;
  return r;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) raise_data("CannotWrite", "cannot open " + path + " for writing");
  out << text;
  if (!out) raise_data("WriteFailed", "error while writing " + path);
}

// Loads a canonical windows file, checks uniform length, and re-cuts to the
// requested length when it differs.
std::vector<WindowRecord> load_windows(const std::string& path,
                                       std::size_t n) {
  std::vector<WindowRecord> ws = read_windows_file(path);
  if (ws.empty()) raise_data("EmptyDataset", path + " holds no windows");
  const std::size_t have = ws.front().length();
  for (const WindowRecord& w : ws) {
    if (w.length() != have)
      raise_data("LengthMismatch",
                 path + ": window '" + w.id + "' breaks uniform length");
  }
  if (have != n) ws = rewindow_all(ws, n, ws.front().rate_hz);
  return ws;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string cell_dir_name(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << (cfg.collection.empty() ? std::string("direct")
                                : lower(cfg.collection))
     << '-' << lower(cfg.feature) << '-' << lower(cfg.classifier) << "-n"
     << cfg.window << "-k" << cfg.k;
  return os.str();
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise_data("CannotRead", "cannot open config " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      raise_usage("BadConfigLine", path + ":" + std::to_string(line_no) +
                                       ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) {
      raise_usage("BadConfigLine",
                  path + ":" + std::to_string(line_no) + ": empty key");
    }
    kv[key] = trim(body.substr(eq + 1));
  }
  return kv;
}

void apply_config_values(ExperimentConfig& cfg,
                         const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "collection") {
      cfg.collection = value;
    } else if (key == "feature") {
      cfg.feature = value;
    } else if (key == "classifier") {
      cfg.classifier = value;
    } else if (key == "window") {
      cfg.window = to_int(value, key);
    } else if (key == "k") {
      cfg.k = to_int(value, key);
    } else if (key == "threshold_rule") {
      cfg.threshold_rule = value;
    } else if (key == "folds") {
      cfg.folds = to_int(value, key);
    } else if (key == "seed") {
      cfg.seed = to_u64(value, key);
    } else if (key == "normalize") {
      cfg.normalize = to_bool(value, key);
    } else if (key == "metric") {
      cfg.metric = value;
    } else if (key == "svm_kernel") {
      cfg.svm_kernel = value;
    } else if (key == "svm_c") {
      cfg.svm_c = to_double(value, key);
    } else if (key == "svm_nu") {
      cfg.svm_nu = to_double(value, key);
    } else if (key == "svm_gamma") {
      cfg.svm_gamma = to_double(value, key);
    } else if (key == "dataset1_windows") {
      cfg.dataset1_windows = value;
    } else if (key == "dataset2_windows") {
      cfg.dataset2_windows = value;
    } else if (key == "windows") {
      cfg.windows = value;
    } else if (key == "holdout") {
      cfg.holdout = to_bool(value, key);
    } else if (key == "dump_features") {
      cfg.dump_features = to_bool(value, key);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "ledger") {
      cfg.ledger = value;
    } else {
      raise_usage("UnknownKey", "unknown config key '" + key + "'");
    }
  }
}

std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# falldet-config v1\n";
  os << "collection = " << cfg.collection << "\n";
  os << "feature = " << cfg.feature << "\n";
  os << "classifier = " << cfg.classifier << "\n";
  os << "window = " << cfg.window << "\n";
  os << "k = " << cfg.k << "\n";
  os << "threshold_rule = " << cfg.threshold_rule << "\n";
  os << "folds = " << cfg.folds << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "normalize = " << (cfg.normalize ? "true" : "false") << "\n";
  os << "metric = " << cfg.metric << "\n";
  os << "svm_kernel = " << cfg.svm_kernel << "\n";
  os << "svm_c = " << cfg.svm_c << "\n";
  os << "svm_nu = " << cfg.svm_nu << "\n";
  os << "svm_gamma = " << cfg.svm_gamma << "\n";
  os << "dataset1_windows = " << cfg.dataset1_windows << "\n";
  os << "dataset2_windows = " << cfg.dataset2_windows << "\n";
  os << "windows = " << cfg.windows << "\n";
  os << "holdout = " << (cfg.holdout ? "true" : "false") << "\n";
  os << "dump_features = " << (cfg.dump_features ? "true" : "false") << "\n";
  os << "out_dir = " << cfg.out_dir << "\n";
  os << "ledger = " << cfg.ledger << "\n";
  return os.str();
}

RunInfo run_info(const ExperimentConfig& cfg) {
  const Resolved r = resolve(cfg);
  RunInfo info;
  info.collection = r.direct ? "direct" : to_string(r.collection);
  info.feature = lower(to_string(r.extractor));
  info.classifier = to_string(r.kind);
  info.window_len = cfg.window;
  info.k = cfg.k;
  info.threshold_rule = to_string(r.cspec.rule);
  info.folds = cfg.folds;
  info.seed = cfg.seed;
  return info;
}

IngestSummary cmd_ingest(const IngestArgs& args) {
  if (args.tfall_dir.empty() && args.ucihar_dir.empty())
    raise_usage("MissingInput", "need --tfall and/or --ucihar");
  if (args.window != 51 && args.window != 128)
    raise_usage("BadWindowLength", "window must be 51 or 128");
  if (!(args.rate_hz > 0.0)) raise_usage("BadRate", "rate must be positive");
  fs::create_directories(args.out_dir);

  IngestSummary summary;
  std::ostringstream manifest;
  manifest << "# falldet-ingest v1\n";
  manifest << "window=" << args.window << " rate_hz=" << args.rate_hz
           << " tolerance=" << args.tolerance << " seed=" << args.seed
           << "\n";

  const std::size_t n = static_cast<std::size_t>(args.window);
  if (!args.tfall_dir.empty()) {
    const TfallParse parsed = parse_tfall(args.tfall_dir, args.tolerance);
    std::size_t skipped = 0;
    const std::vector<WindowRecord> ws =
        window_all(parsed.recordings, n, args.rate_hz, &skipped);
    if (ws.empty())
      raise_data("EmptyDataset", "no usable windows from " + args.tfall_dir);
    std::size_t falls = 0;
    for (const WindowRecord& w : ws) falls += w.label == Label::FALL ? 1 : 0;
    const std::string path =
        args.out_dir + "/windows_d1_n" + std::to_string(args.window) + ".txt";
    write_windows_file(path, ws);
    summary.d1_recordings = parsed.recordings.size();
    summary.d1_windows = ws.size();
    summary.d1_warnings = parsed.warnings;
    summary.d1_skipped = skipped;
    manifest << "dataset1 file=" << path
             << " recordings=" << parsed.recordings.size()
             << " windows=" << ws.size() << " adl=" << ws.size() - falls
             << " fall=" << falls << " warnings=" << parsed.warnings
             << " skipped=" << skipped << "\n";
  }
  if (!args.ucihar_dir.empty()) {
    std::vector<WindowRecord> ws = parse_ucihar(args.ucihar_dir);
    if (!ws.empty() && ws.front().length() != n)
      ws = rewindow_all(ws, n, args.rate_hz);
    const std::string path =
        args.out_dir + "/windows_d2_n" + std::to_string(args.window) + ".txt";
    write_windows_file(path, ws);
    summary.d2_windows = ws.size();
    manifest << "dataset2 file=" << path << " windows=" << ws.size()
             << " adl=" << ws.size() << " fall=0\n";
  }
  write_text(args.out_dir + "/ingest.txt", manifest.str());
  return summary;
}

void cmd_synth(const SynthArgs& args) {
  if (args.adl_count + args.fall_count < 2)
    raise_usage("BadCount", "need at least 2 windows");
  if (args.window < 1) raise_usage("BadWindowLength", "window must be >= 1");
  SynthOptions opt;
  opt.adl_count = args.adl_count;
  opt.fall_count = args.fall_count;
  opt.window_len = static_cast<std::size_t>(args.window);
  opt.rate_hz = args.rate_hz;
  opt.seed = args.seed;
  opt.profile = args.profile;
  const std::vector<WindowRecord> ws = synth_windows(opt);
  write_windows_file(args.out, ws);
}

ExperimentReport cmd_run(const ExperimentConfig& cfg) {
  const Resolved r = resolve(cfg);
  fs::create_directories(cfg.out_dir);
  const std::string ledger_path =
      cfg.ledger.empty() ? cfg.out_dir + "/ledger.txt" : cfg.ledger;
  const std::size_t n = static_cast<std::size_t>(cfg.window);

  std::vector<WindowRecord> train_w, test_w;
  if (r.direct) {
    train_w = load_windows(cfg.windows, n);
  } else {
    if (cfg.dataset1_windows.empty()) {
      raise_usage("MissingInput",
                  "collection mode needs dataset1_windows=FILE");
    }
    const std::vector<WindowRecord> pool1 =
        load_windows(cfg.dataset1_windows, n);
    std::vector<WindowRecord> pool2;
    if (!cfg.dataset2_windows.empty())
      pool2 = load_windows(cfg.dataset2_windows, n);
    SplitDataset split = build_collection(
        pool1, pool2, CollectionSpec::preset(r.collection, cfg.seed));
    write_collection_manifest(cfg.out_dir + "/collection.txt", split);
    train_w = std::move(split.train);
    test_w = std::move(split.test);
  }

  const FeatureOptions fo{r.extractor, cfg.normalize};
  const std::vector<LabeledFeature> train_f = extract_batch(train_w, fo);

  ExperimentReport report =
      kfold_cv(train_f, make_trainer(r.cspec), cfg.folds, cfg.seed);
  report.config = run_info(cfg);

  write_text(cfg.out_dir + "/report.csv", emit_table(report, TableStyle::CSV));
  write_text(cfg.out_dir + "/report.md",
             emit_table(report, TableStyle::MARKDOWN));
  write_text(cfg.out_dir + "/config.txt", config_echo(cfg));
  if (cfg.dump_features) {
    write_feature_matrix(cfg.out_dir + "/features_train.txt", train_f,
                         r.extractor, cfg.window);
  }

  if (cfg.holdout) {
    if (test_w.empty())
      raise_usage("NoHoldout", "holdout needs a collection test split");
    const std::vector<LabeledFeature> test_f = extract_batch(test_w, fo);
    const auto clf =
        train_classifier(r.cspec, train_f, derive_seed(cfg.seed, 0x40));
    const std::vector<Label> preds = clf->predict(test_f);
    std::vector<Label> truths(test_f.size());
    for (std::size_t i = 0; i < test_f.size(); ++i) truths[i] = test_f[i].label;
    const ConfusionCounts c = confusion(preds, truths);
    std::ostringstream os;
    os << "# falldet-holdout v1\n";
    os << "# " << config_key(report.config) << "\n";
    os << "sa=" << fmt6(standard_accuracy(c))
       << " maa=" << fmt6(macro_average_accuracy(c))
       << " se=" << fmt6(sensitivity(c)) << " sp=" << fmt6(specificity(c))
       << " np_adl=" << c.np_adl << " tp_adl=" << c.tp_adl
       << " np_fall=" << c.np_fall << " tp_fall=" << c.tp_fall << "\n";
    write_text(cfg.out_dir + "/holdout.txt", os.str());
    if (cfg.dump_features) {
      write_feature_matrix(cfg.out_dir + "/features_test.txt", test_f,
                           r.extractor, cfg.window);
    }
  }

  append_ledger(ledger_path, report);
  return report;
}

GridOutcome cmd_grid(const ExperimentConfig& base, const GridAxes& axes) {
  fs::create_directories(base.out_dir);
  const std::string ledger_path =
      base.ledger.empty() ? base.out_dir + "/ledger.txt" : base.ledger;
  const std::string fail_path = base.out_dir + "/failures.txt";

  auto strings_or = [](const std::vector<std::string>& v,
                       const std::string& fallback) {
    return v.empty() ? std::vector<std::string>{fallback} : v;
  };
  auto ints_or = [](const std::vector<int>& v, int fallback) {
    return v.empty() ? std::vector<int>{fallback} : v;
  };
  const auto collections = strings_or(axes.collections, base.collection);
  const auto features = strings_or(axes.features, base.feature);
  const auto classifiers = strings_or(axes.classifiers, base.classifier);
  const auto windows = ints_or(axes.windows, base.window);
  const auto ks = ints_or(axes.ks, base.k);

  GridOutcome outcome;
  for (const std::string& collection : collections)
    for (const std::string& feature : features)
      for (const std::string& classifier : classifiers)
        for (const int window : windows)
          for (const int k : ks) {
            ExperimentConfig cell = base;
            cell.collection = collection;
            cell.feature = feature;
            cell.classifier = classifier;
            cell.window = window;
            cell.k = k;
            cell.ledger = ledger_path;
            cell.out_dir = base.out_dir + "/cells/" + cell_dir_name(cell);
            try {
              if (ledger_contains(ledger_path,
                                  config_hash(run_info(cell)))) {
                ++outcome.skipped;
                continue;
              }
              cmd_run(cell);
              ++outcome.completed;
            } catch (const Error& e) {
              ++outcome.failed;
              std::ofstream fail(fail_path, std::ios::app);
              fail << "fail v1 cell=" << cell_dir_name(cell)
                   << " code=" << e.code() << " msg=" << e.what() << "\n";
            }
          }
  return outcome;
}

std::string cmd_report(const std::string& ledger_path, TableStyle style) {
  std::ifstream in(ledger_path);
  if (!in) raise_data("CannotRead", "cannot open ledger " + ledger_path);

  const std::vector<std::string> cols = {
      "collection", "feature", "classifier", "n",
      "k",          "threshold", "folds",    "seed"};
  const std::vector<std::string> means = {"mean_sa", "mean_maa", "mean_se",
                                          "mean_sp"};

  std::ostringstream os;
  if (style == TableStyle::CSV) {
    os << "# falldet-summary v1\n";
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    for (const std::string& m : means) os << ',' << m;
    os << "\n";
  } else {
    os << "|";
    for (const std::string& c : cols) os << ' ' << c << " |";
    for (const std::string& m : means) os << ' ' << m << " |";
    os << "\n|";
    for (std::size_t i = 0; i < cols.size() + means.size(); ++i) os << "---|";
    os << "\n";
  }

  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("run v1 ", 0) != 0) continue;
    std::map<std::string, std::string> kv;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      const std::size_t eq = tok.find('=');
      if (eq != std::string::npos)
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto get = [&kv](const std::string& key) {
      const auto it = kv.find(key);
      return it == kv.end() ? std::string("?") : it->second;
    };
    auto as_pct = [&get](const std::string& key) {
      const std::string raw = get(key);
      try {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", std::stod(raw) * 100.0);
        return std::string(buf);
      } catch (const std::exception&) {
        return std::string("?");
      }
    };
    if (style == TableStyle::CSV) {
      for (std::size_t i = 0; i < cols.size(); ++i)
        os << (i ? "," : "") << get(cols[i]);
      for (const std::string& m : means) os << ',' << as_pct(m);
      os << "\n";
    } else {
      os << "|";
      for (const std::string& c : cols) os << ' ' << get(c) << " |";
      for (const std::string& m : means) os << ' ' << as_pct(m) << " |";
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace falldet
