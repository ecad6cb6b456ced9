#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "falldet/metrics.hpp"
#include "falldet/types.hpp"

namespace falldet {

class Classifier {
public:
  virtual ~Classifier() = default;
  virtual std::vector<Label> predict(std::span<const LabeledFeature> queries) const = 0;
};

// Trains a classifier from the training part of one fold. fold_seed is a
// deterministic per-fold stream for trainers that need randomness (e.g. the
// youden validation split).
using TrainFn = std::function<std::unique_ptr<Classifier>(
    std::span<const LabeledFeature> train_part, std::uint64_t fold_seed)>;

struct FoldReport {
  int fold_index = 0;  // 1-based
  double sa = 0.0, maa = 0.0, se = 0.0, sp = 0.0;
  ConfusionCounts counts;
};

// Configuration echo carried into every rendered artifact.
struct RunInfo {
  std::string collection;  // "C1".."C3" or "direct"
  std::string feature;
  std::string classifier;
  int window_len = 0;
  int k = 0;
  std::string threshold_rule;
  int folds = 10;
  std::uint64_t seed = 0;
};

struct ExperimentReport {
  RunInfo config;
  std::vector<FoldReport> folds;
  double mean_sa = 0.0, mean_maa = 0.0, mean_se = 0.0, mean_sp = 0.0;
};

// Stratified-by-label k-fold cross-validation. Fold assignment is a pure
// function of (data order, seed); per-stratum fold sizes differ by at most
// one and every instance is tested exactly once. One-class trainers receive
// the full training part and fit whatever subset they need.
ExperimentReport kfold_cv(std::span<const LabeledFeature> data,
                          const TrainFn& trainer, int folds,
                          std::uint64_t seed);

// Recomputes means from fold values (used by invariants and aggregation).
void recompute_means(ExperimentReport& report);

enum class TableStyle { CSV, MARKDOWN };

// One row per fold plus a mean row; metrics rendered as percentages with
// exactly two decimals.
std::string emit_table(const ExperimentReport& report, TableStyle style);

// 64-bit FNV-1a over the canonical configuration string.
std::uint64_t config_hash(const RunInfo& info);
std::string config_key(const RunInfo& info);

// Machine-readable one-line summary appended per completed run.
void append_ledger(const std::string& path, const ExperimentReport& report);
bool ledger_contains(const std::string& path, std::uint64_t hash);

}  // namespace falldet
