#include "falldet/crossval.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "falldet/error.hpp"
#include "falldet/rng.hpp"

namespace falldet {

ExperimentReport kfold_cv(std::span<const LabeledFeature> data,
                          const TrainFn& trainer, int folds,
                          std::uint64_t seed) {
  if (folds < 2) raise_usage("BadFolds", "need at least 2 folds");
  if (data.size() < static_cast<std::size_t>(folds))
    raise_data("TooFewInstances",
               std::to_string(data.size()) + " instances for " +
                   std::to_string(folds) + " folds");

  std::vector<std::size_t> adl_idx, fall_idx;
  for (std::size_t i = 0; i < data.size(); ++i)
    (data[i].label == Label::ADL ? adl_idx : fall_idx).push_back(i);
  for (const auto* stratum : {&adl_idx, &fall_idx}) {
    if (stratum->size() < static_cast<std::size_t>(folds))
      raise_data("StratumTooSmall",
                 std::string(stratum == &adl_idx ? "ADL" : "FALL") +
                     " stratum has " + std::to_string(stratum->size()) +
                     " instances for " + std::to_string(folds) + " folds");
  }

  // Shuffle each stratum, then deal round-robin so per-stratum fold sizes
  // differ by at most one.
  std::vector<int> fold_of(data.size(), -1);
  int stratum_tag = 0;
  for (auto* stratum : {&adl_idx, &fall_idx}) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(stratum_tag++)));
    rng.shuffle(*stratum);
    for (std::size_t pos = 0; pos < stratum->size(); ++pos)
      fold_of[(*stratum)[pos]] = static_cast<int>(pos % folds);
  }

  ExperimentReport report;
  report.config.folds = folds;
  report.config.seed = seed;
  report.folds.reserve(folds);

  for (int f = 0; f < folds; ++f) {
    std::vector<LabeledFeature> train_part, test_part;
    for (std::size_t i = 0; i < data.size(); ++i)
      (fold_of[i] == f ? test_part : train_part).push_back(data[i]);

    const auto model = trainer(train_part, derive_seed(seed, 1000 + f));
    const std::vector<Label> preds = model->predict(test_part);

    std::vector<Label> truths(test_part.size());
    for (std::size_t i = 0; i < test_part.size(); ++i)
      truths[i] = test_part[i].label;

    FoldReport fr;
    fr.fold_index = f + 1;
    fr.counts = confusion(preds, truths);
    fr.sa = standard_accuracy(fr.counts);
    fr.maa = macro_average_accuracy(fr.counts);
    fr.se = sensitivity(fr.counts);
    fr.sp = specificity(fr.counts);
    report.folds.push_back(fr);
  }

  recompute_means(report);
  return report;
}

void recompute_means(ExperimentReport& report) {
  double sa = 0.0, maa = 0.0, se = 0.0, sp = 0.0;
  for (const FoldReport& fr : report.folds) {
    sa += fr.sa;
    maa += fr.maa;
    se += fr.se;
    sp += fr.sp;
  }
  const double n = static_cast<double>(report.folds.size());
  report.mean_sa = sa / n;
  report.mean_maa = maa / n;
  report.mean_se = se / n;
  report.mean_sp = sp / n;
}

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
  return buf;
}

std::string config_line(const RunInfo& c) {
  std::ostringstream os;
  os << "collection=" << c.collection << " feature=" << c.feature
     << " classifier=" << c.classifier << " n=" << c.window_len << " k=" << c.k
     << " threshold=" << c.threshold_rule << " folds=" << c.folds
     << " seed=" << c.seed;
  return os.str();
}

}  // namespace

std::string emit_table(const ExperimentReport& report, TableStyle style) {
  std::ostringstream os;
  if (style == TableStyle::CSV) {
    os << "# falldet-report v1\n";
    os << "# " << config_line(report.config) << "\n";
    os << "fold,sa,maa,se,sp\n";
    for (const FoldReport& fr : report.folds)
      os << fr.fold_index << ',' << pct(fr.sa) << ',' << pct(fr.maa) << ','
         << pct(fr.se) << ',' << pct(fr.sp) << '\n';
    os << "mean," << pct(report.mean_sa) << ',' << pct(report.mean_maa) << ','
       << pct(report.mean_se) << ',' << pct(report.mean_sp) << '\n';
    return os.str();
  }
  os << "`" << config_line(report.config) << "`\n\n";
  os << "| fold | SA | MAA | SE | SP |\n";
  os << "|---:|---:|---:|---:|---:|\n";
  for (const FoldReport& fr : report.folds)
    os << "| " << fr.fold_index << " | " << pct(fr.sa) << " | " << pct(fr.maa)
       << " | " << pct(fr.se) << " | " << pct(fr.sp) << " |\n";
  os << "| mean | " << pct(report.mean_sa) << " | " << pct(report.mean_maa)
     << " | " << pct(report.mean_se) << " | " << pct(report.mean_sp) << " |\n";
  return os.str();
}

std::string config_key(const RunInfo& info) { return config_line(info); }

std::uint64_t config_hash(const RunInfo& info) {
  const std::string key = config_key(info);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : key) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void append_ledger(const std::string& path, const ExperimentReport& report) {
  std::ofstream out(path, std::ios::app);
  if (!out) raise_data("FileWrite", "cannot append to ledger '" + path + "'");
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(report.config)));
  char means[160];
  std::snprintf(means, sizeof means,
                "mean_sa=%.6f mean_maa=%.6f mean_se=%.6f mean_sp=%.6f",
                report.mean_sa, report.mean_maa, report.mean_se,
                report.mean_sp);
  out << "run v1 hash=" << hash << ' ' << config_line(report.config) << ' '
      << means << '\n';
}

bool ledger_contains(const std::string& path, std::uint64_t hash) {
  std::ifstream in(path);
  if (!in) return false;
  char want[24];
  std::snprintf(want, sizeof want, "hash=%016llx",
                static_cast<unsigned long long>(hash));
  std::string line;
  while (std::getline(in, line))
    if (line.find(want) != std::string::npos) return true;
  return false;
}

}  // namespace falldet
