#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "falldet/crossval.hpp"
#include "falldet/pipeline.hpp"
#include "falldet/rng.hpp"
#include "helpers.hpp"

using namespace falldet;

namespace {

LabeledFeature lf(std::string id, Label label, std::vector<double> values) {
  return LabeledFeature{std::move(id), label, std::move(values)};
}

// Two clearly separated 1-D clusters so a 1-NN classifier is perfect.
std::vector<LabeledFeature> separable(std::size_t adl, std::size_t fall) {
  std::vector<LabeledFeature> out;
  for (std::size_t i = 0; i < adl; ++i)
    out.push_back(lf("adl-" + std::to_string(i), Label::ADL,
                     {0.01 * static_cast<double>(i)}));
  for (std::size_t i = 0; i < fall; ++i)
    out.push_back(lf("fall-" + std::to_string(i), Label::FALL,
                     {10.0 + 0.01 * static_cast<double>(i)}));
  return out;
}

struct FoldTrace {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::uint64_t fold_seed = 0;
};

// Predicts the truth (so metrics stay defined) while recording what each
// fold saw.
class SpyClassifier : public Classifier {
public:
  explicit SpyClassifier(FoldTrace* trace) : trace_(trace) {}
  std::vector<Label> predict(std::span<const LabeledFeature> queries) const override {
    std::vector<Label> out;
    for (const LabeledFeature& q : queries) {
      trace_->test_ids.push_back(q.id);
      out.push_back(q.label);
    }
    return out;
  }

private:
  FoldTrace* trace_;
};

TrainFn spy_trainer(std::deque<FoldTrace>* traces) {
  return [traces](std::span<const LabeledFeature> train_part,
                  std::uint64_t fold_seed) -> std::unique_ptr<Classifier> {
    traces->emplace_back();
    FoldTrace& t = traces->back();
    t.fold_seed = fold_seed;
    for (const LabeledFeature& f : train_part) t.train_ids.push_back(f.id);
    return std::make_unique<SpyClassifier>(&t);
  };
}

}  // namespace

TEST_CASE("folds partition the data and stratify both labels") {
  const auto data = separable(23, 12);  // deliberately not divisible by 5
  std::map<std::string, Label> label_of;
  for (const LabeledFeature& f : data) label_of[f.id] = f.label;

  std::deque<FoldTrace> traces;
  const ExperimentReport report = kfold_cv(data, spy_trainer(&traces), 5, 42);
  REQUIRE(traces.size() == 5);
  REQUIRE(report.folds.size() == 5);

  std::multiset<std::string> tested;
  std::vector<std::size_t> adl_per_fold, fall_per_fold;
  for (std::size_t f = 0; f < traces.size(); ++f) {
    const FoldTrace& t = traces[f];
    // Train and test parts are disjoint and jointly cover everything.
    std::set<std::string> train(t.train_ids.begin(), t.train_ids.end());
    std::set<std::string> test(t.test_ids.begin(), t.test_ids.end());
    CHECK(train.size() + test.size() == data.size());
    for (const std::string& id : test) CHECK(train.count(id) == 0);

    std::size_t adl = 0, fall = 0;
    for (const std::string& id : test)
      (label_of[id] == Label::ADL ? adl : fall)++;
    adl_per_fold.push_back(adl);
    fall_per_fold.push_back(fall);
    // Both labels present in the training part.
    bool has_adl = false, has_fall = false;
    for (const std::string& id : train)
      (label_of[id] == Label::ADL ? has_adl : has_fall) = true;
    CHECK(has_adl);
    CHECK(has_fall);
    // Confusion counts cover exactly the fold's test part.
    CHECK(report.folds[f].counts.total() == test.size());
    CHECK(report.folds[f].fold_index == static_cast<int>(f) + 1);
    // Per-fold trainer seed is a deterministic stream of the run seed.
    CHECK(t.fold_seed == derive_seed(42, 1000 + f));

    for (const std::string& id : t.test_ids) tested.insert(id);
  }

  // Every instance is tested exactly once.
  CHECK(tested.size() == data.size());
  for (const LabeledFeature& f : data) CHECK(tested.count(f.id) == 1);

  // Stratified: per-label fold sizes differ by at most one.
  for (const auto* sizes : {&adl_per_fold, &fall_per_fold}) {
    const auto [lo, hi] = std::minmax_element(sizes->begin(), sizes->end());
    CHECK(*hi - *lo <= 1);
  }
  // 23 ADL over 5 folds -> sizes 5,5,5,4,4; 12 FALL -> 3,3,2,2,2.
  CHECK(std::count(adl_per_fold.begin(), adl_per_fold.end(), 5) == 3);
  CHECK(std::count(fall_per_fold.begin(), fall_per_fold.end(), 3) == 2);
}

TEST_CASE("fold assignment is deterministic in the seed") {
  const auto data = separable(30, 15);
  std::deque<FoldTrace> a, b, c;
  kfold_cv(data, spy_trainer(&a), 5, 7);
  kfold_cv(data, spy_trainer(&b), 5, 7);
  kfold_cv(data, spy_trainer(&c), 5, 8);
  REQUIRE(a.size() == b.size());
  bool any_diff = false;
  for (std::size_t f = 0; f < a.size(); ++f) {
    CHECK(a[f].test_ids == b[f].test_ids);
    CHECK(a[f].train_ids == b[f].train_ids);
    if (a[f].test_ids != c[f].test_ids) any_diff = true;
  }
  CHECK(any_diff);  // a different seed reshuffles the deal
}

TEST_CASE("a perfect classifier scores 100 on every fold") {
  const auto data = separable(40, 20);
  ClassifierSpec spec;  // knn2, k=1
  const ExperimentReport report = kfold_cv(data, make_trainer(spec), 10, 3);
  CHECK(report.folds.size() == 10);
  for (const FoldReport& fr : report.folds) {
    CHECK(fr.sa == 1.0);
    CHECK(fr.maa == 1.0);
    CHECK(fr.se == 1.0);
    CHECK(fr.sp == 1.0);
    // The identity that makes the two headline numbers comparable.
    CHECK(fr.maa == (fr.se + fr.sp) / 2.0);
  }
  CHECK(report.mean_sa == 1.0);
  CHECK(report.mean_maa == 1.0);
}

TEST_CASE("report means equal the hand mean of fold values") {
  // An imperfect classifier so fold metrics vary: 3-NN on overlapping data.
  Rng rng(99);
  std::vector<LabeledFeature> data;
  for (int i = 0; i < 60; ++i)
    data.push_back(lf("a" + std::to_string(i), Label::ADL, {rng.normal()}));
  for (int i = 0; i < 30; ++i)
    data.push_back(lf("f" + std::to_string(i), Label::FALL,
                      {rng.normal() + 1.0}));
  ClassifierSpec spec;
  spec.k = 3;
  const ExperimentReport report = kfold_cv(data, make_trainer(spec), 6, 11);
  double sa = 0.0, maa = 0.0, se = 0.0, sp = 0.0;
  for (const FoldReport& fr : report.folds) {
    sa += fr.sa;
    maa += fr.maa;
    se += fr.se;
    sp += fr.sp;
    CHECK(fr.maa == (fr.se + fr.sp) / 2.0);
    CHECK(fr.sa >= std::min(fr.se, fr.sp));
    CHECK(fr.sa <= std::max(fr.se, fr.sp));
  }
  const double n = static_cast<double>(report.folds.size());
  CHECK(report.mean_sa == sa / n);
  CHECK(report.mean_maa == maa / n);
  CHECK(report.mean_se == se / n);
  CHECK(report.mean_sp == sp / n);

  ExperimentReport copy = report;
  recompute_means(copy);
  CHECK(copy.mean_sa == report.mean_sa);
  CHECK(copy.mean_maa == report.mean_maa);
}

TEST_CASE("one-class trainers run inside cross-validation") {
  const auto data = separable(50, 10);
  ClassifierSpec spec;
  spec.kind = ClassifierKind::KNN1;
  spec.k = 1;
  spec.rule = ThresholdRule::percentile(95.0);
  const ExperimentReport report = kfold_cv(data, make_trainer(spec), 5, 21);
  CHECK(report.folds.size() == 5);
  // The clusters are far apart, so novelty detection nails the falls.
  CHECK(report.mean_se == 1.0);
  CHECK(report.mean_sp >= 0.85);
}

TEST_CASE("cross-validation rejects bad shapes") {
  const auto data = separable(10, 5);
  ClassifierSpec spec;
  CHECK(testutil::error_code_of([&] {
          kfold_cv(data, make_trainer(spec), 1, 0);
        }) == "BadFolds");
  CHECK(testutil::raises_kind([&] {
          kfold_cv(data, make_trainer(spec), 0, 0);
        }, ErrorKind::Usage));
  CHECK(testutil::error_code_of([&] {
          kfold_cv(separable(2, 1), make_trainer(spec), 5, 0);
        }) == "TooFewInstances");
  CHECK(testutil::error_code_of([&] {
          kfold_cv(data, make_trainer(spec), 6, 0);  // only 5 falls
        }) == "StratumTooSmall");
  CHECK(testutil::error_code_of([&] {
          kfold_cv(separable(12, 0), make_trainer(spec), 5, 0);
        }) == "StratumTooSmall");
}

TEST_CASE("emit_table renders fixed fold values exactly") {
  ExperimentReport report;
  report.config = RunInfo{"C2", "fourier", "knn2", 51, 1,
                          "percentile:95", 2, 77};
  // Values picked so the fold rows exercise rounding (0.9531 -> "95.31")
  // while every mean lands exactly on a two-decimal grid point.
  FoldReport f1;
  f1.fold_index = 1;
  f1.sa = 0.9531;
  f1.maa = 0.875;
  f1.se = 0.75;
  f1.sp = 1.0;
  FoldReport f2;
  f2.fold_index = 2;
  f2.sa = 0.9531;
  f2.maa = 0.875;
  f2.se = 0.25;
  f2.sp = 0.5;
  report.folds = {f1, f2};
  recompute_means(report);

  const std::string csv = emit_table(report, TableStyle::CSV);
  CHECK(csv ==
        "# falldet-report v1\n"
        "# collection=C2 feature=fourier classifier=knn2 n=51 k=1 "
        "threshold=percentile:95 folds=2 seed=77\n"
        "fold,sa,maa,se,sp\n"
        "1,95.31,87.50,75.00,100.00\n"
        "2,95.31,87.50,25.00,50.00\n"
        "mean,95.31,87.50,50.00,75.00\n");

  const std::string md = emit_table(report, TableStyle::MARKDOWN);
  CHECK(md.find("| 1 | 95.31 | 87.50 | 75.00 | 100.00 |") != std::string::npos);
  CHECK(md.find("| 2 | 95.31 | 87.50 | 25.00 | 50.00 |") != std::string::npos);
  CHECK(md.find("| mean | 95.31 | 87.50 | 50.00 | 75.00 |") != std::string::npos);
  CHECK(md.find("collection=C2 feature=fourier classifier=knn2") !=
        std::string::npos);
  CHECK(md.find("| fold | SA | MAA | SE | SP |") != std::string::npos);
}

TEST_CASE("config key and hash react to every field") {
  const RunInfo base{"C1", "fourier", "knn2", 51, 1, "percentile:95", 10, 7};
  const std::string key = config_key(base);
  for (const char* part : {"collection=C1", "feature=fourier",
                           "classifier=knn2", "n=51", "k=1",
                           "threshold=percentile:95", "folds=10", "seed=7"})
    CHECK(key.find(part) != std::string::npos);

  CHECK(config_hash(base) == config_hash(base));
  auto mutate = [&](auto&& fn) {
    RunInfo info = base;
    fn(info);
    return config_hash(info);
  };
  std::set<std::uint64_t> hashes{config_hash(base)};
  hashes.insert(mutate([](RunInfo& i) { i.collection = "C2"; }));
  hashes.insert(mutate([](RunInfo& i) { i.feature = "energy"; }));
  hashes.insert(mutate([](RunInfo& i) { i.classifier = "svm2"; }));
  hashes.insert(mutate([](RunInfo& i) { i.window_len = 128; }));
  hashes.insert(mutate([](RunInfo& i) { i.k = 3; }));
  hashes.insert(mutate([](RunInfo& i) { i.threshold_rule = "youden"; }));
  hashes.insert(mutate([](RunInfo& i) { i.folds = 5; }));
  hashes.insert(mutate([](RunInfo& i) { i.seed = 8; }));
  CHECK(hashes.size() == 9);  // all distinct
}

TEST_CASE("ledger append and lookup round trip") {
  testutil::TempDir tmp;
  const std::string path = tmp.str("ledger.txt");

  ExperimentReport report;
  report.config = RunInfo{"C3", "raw", "svm1", 51, 1, "youden", 10, 5};
  FoldReport fr;
  fr.fold_index = 1;
  fr.sa = fr.maa = fr.se = fr.sp = 0.5;
  report.folds = {fr};
  recompute_means(report);

  CHECK_FALSE(ledger_contains(path, config_hash(report.config)));
  append_ledger(path, report);
  CHECK(ledger_contains(path, config_hash(report.config)));
  CHECK_FALSE(ledger_contains(path, config_hash(report.config) ^ 1));

  const std::string text = testutil::read_text(path);
  CHECK(text.rfind("run v1 hash=", 0) == 0);
  CHECK(text.find(config_key(report.config)) != std::string::npos);
  CHECK(text.find("mean_sa=0.500000") != std::string::npos);
  CHECK(text.find("mean_sp=0.500000") != std::string::npos);

  // Appending keeps prior lines.
  report.config.seed = 6;
  append_ledger(path, report);
  CHECK(ledger_contains(path, config_hash(report.config)));
  report.config.seed = 5;
  CHECK(ledger_contains(path, config_hash(report.config)));
}
