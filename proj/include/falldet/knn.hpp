#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

enum class Metric { EUCLIDEAN, MANHATTAN };

const char* to_string(Metric m);
Metric metric_from_string(const std::string& s);

double distance(std::span<const double> a, std::span<const double> b, Metric m);

// Lazy two-class kNN: the model is the training set. k must be odd so a
// two-class majority vote cannot tie; distance ties break on the smaller id.
struct KnnModel {
  std::vector<LabeledFeature> train;
  int k = 1;
  Metric metric = Metric::EUCLIDEAN;
  std::size_t dim = 0;
};

KnnModel knn_train(std::vector<LabeledFeature> data, int k,
                   Metric metric = Metric::EUCLIDEAN);

Label knn_predict(const KnnModel& model, std::span<const double> x);

// Parallel over queries.
std::vector<Label> knn_predict_batch(const KnnModel& model,
                                     std::span<const LabeledFeature> queries);

enum class ThresholdKind { PERCENTILE, YOUDEN };

struct ThresholdRule {
  ThresholdKind kind = ThresholdKind::PERCENTILE;
  double p = 95.0;  // percentile, used by PERCENTILE only

  static ThresholdRule percentile(double p) { return {ThresholdKind::PERCENTILE, p}; }
  static ThresholdRule youden() { return {ThresholdKind::YOUDEN, 0.0}; }
};

std::string to_string(const ThresholdRule& r);
ThresholdRule threshold_rule_from_string(const std::string& s);

// One-class novelty detector over ADL-only training data. The score of a
// query is its mean distance to the k nearest training vectors; FALL is
// predicted when the score strictly exceeds theta.
struct OneClassKnnModel {
  std::vector<LabeledFeature> train;
  int k = 1;
  Metric metric = Metric::EUCLIDEAN;
  double theta = 0.0;
  ThresholdRule rule;
  std::size_t dim = 0;
};

// PERCENTILE sets theta to the nearest-rank p-th percentile of the
// leave-one-out scores of the training set. YOUDEN needs `validation`
// (both labels present) and picks the theta maximizing SE + SP - 1;
// ties go to the largest theta.
OneClassKnnModel ocknn_train(std::vector<LabeledFeature> adl, int k,
                             ThresholdRule rule,
                             Metric metric = Metric::EUCLIDEAN,
                             std::span<const LabeledFeature> validation = {});

double ocknn_score(const OneClassKnnModel& model, std::span<const double> x);
Label ocknn_predict(const OneClassKnnModel& model, std::span<const double> x);

std::vector<double> ocknn_score_batch(const OneClassKnnModel& model,
                                      std::span<const LabeledFeature> queries);
std::vector<Label> ocknn_predict_batch(const OneClassKnnModel& model,
                                       std::span<const LabeledFeature> queries);

// Leave-one-out novelty scores of the training set (parallel over rows).
std::vector<double> ocknn_loo_scores(std::span<const LabeledFeature> train,
                                     int k, Metric metric);

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value, p in (0, 100].
double percentile_nearest_rank(std::vector<double> values, double p);

}  // namespace falldet
