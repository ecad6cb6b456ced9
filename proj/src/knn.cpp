#include "falldet/knn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "falldet/error.hpp"

namespace falldet {

const char* to_string(Metric m) {
  return m == Metric::EUCLIDEAN ? "euclidean" : "manhattan";
}

Metric metric_from_string(const std::string& s) {
  if (s == "euclidean") return Metric::EUCLIDEAN;
  if (s == "manhattan") return Metric::MANHATTAN;
  raise_usage("BadMetric", "unknown metric '" + s + "'");
}

double distance(std::span<const double> a, std::span<const double> b, Metric m) {
  if (a.size() != b.size())
    raise_data("DimensionMismatch", "distance between vectors of different size");
  double acc = 0.0;
  if (m == Metric::EUCLIDEAN) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      acc += d * d;
    }
    return std::sqrt(acc);
  }
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

std::string to_string(const ThresholdRule& r) {
  if (r.kind == ThresholdKind::YOUDEN) return "youden";
  char buf[48];
  std::snprintf(buf, sizeof buf, "percentile:%g", r.p);
  return buf;
}

ThresholdRule threshold_rule_from_string(const std::string& s) {
  if (s == "youden") return ThresholdRule::youden();
  const std::string prefix = "percentile:";
  if (s.rfind(prefix, 0) == 0) {
    const double p = std::atof(s.c_str() + prefix.size());
    if (!(p > 0.0 && p <= 100.0))
      raise_usage("BadThresholdRule", "percentile must be in (0, 100]: '" + s + "'");
    return ThresholdRule::percentile(p);
  }
  raise_usage("BadThresholdRule", "unknown threshold rule '" + s + "'");
}

namespace {

std::size_t checked_dim(std::span<const LabeledFeature> data,
                        const char* which) {
  if (data.empty())
    raise_data("EmptyTrainingSet", std::string(which) + ": no vectors");
  const std::size_t dim = data.front().values.size();
  for (const LabeledFeature& f : data) {
    if (f.values.size() != dim)
      raise_data("DimensionMismatch",
                 std::string(which) + ": vector '" + f.id + "' has dimension " +
                     std::to_string(f.values.size()) + ", expected " +
                     std::to_string(dim));
  }
  return dim;
}

struct Neighbor {
  double dist;
  std::size_t index;
};

// Orders by (distance, id); id is unique so the order is total.
bool neighbor_less(const Neighbor& a, const Neighbor& b,
                   std::span<const LabeledFeature> train) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return train[a.index].id < train[b.index].id;
}

// The k nearest training rows under (distance, id) order.
std::vector<Neighbor> k_nearest(std::span<const LabeledFeature> train,
                                Metric metric, std::span<const double> x,
                                int k) {
  std::vector<Neighbor> all(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    all[i] = {distance(train[i].values, x, metric), i};
  const auto cmp = [&](const Neighbor& a, const Neighbor& b) {
    return neighbor_less(a, b, train);
  };
  const std::size_t kk = std::min<std::size_t>(k, all.size());
  std::partial_sort(all.begin(), all.begin() + kk, all.end(), cmp);
  all.resize(kk);
  return all;
}

}  // namespace

KnnModel knn_train(std::vector<LabeledFeature> data, int k, Metric metric) {
  const std::size_t dim = checked_dim(data, "knn_train");
  if (k <= 0 || k % 2 == 0)
    raise_usage("BadK", "k must be a positive odd integer, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > data.size())
    raise_data("KTooLarge", "k=" + std::to_string(k) + " with " +
                                std::to_string(data.size()) + " training vectors");
  bool has_adl = false, has_fall = false;
  for (const LabeledFeature& f : data) {
    (f.label == Label::ADL ? has_adl : has_fall) = true;
  }
  if (!has_adl || !has_fall)
    raise_data("MissingClass", "two-class kNN needs both labels in training data");
  KnnModel m;
  m.train = std::move(data);
  m.k = k;
  m.metric = metric;
  m.dim = dim;
  return m;
}

Label knn_predict(const KnnModel& model, std::span<const double> x) {
  if (x.size() != model.dim)
    raise_data("DimensionMismatch",
               "query has dimension " + std::to_string(x.size()) + ", model has " +
                   std::to_string(model.dim));
  const auto nn = k_nearest(model.train, model.metric, x, model.k);
  int falls = 0;
  for (const Neighbor& nb : nn)
    if (model.train[nb.index].label == Label::FALL) ++falls;
  return 2 * falls > model.k ? Label::FALL : Label::ADL;
}

std::vector<Label> knn_predict_batch(const KnnModel& model,
                                     std::span<const LabeledFeature> queries) {
  std::vector<Label> out(queries.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(queries.size()); ++i)
    out[i] = knn_predict(model, queries[i].values);
  return out;
}

double percentile_nearest_rank(std::vector<double> values, double p) {
  if (values.empty()) raise_data("EmptyInput", "percentile of empty set");
  if (!(p > 0.0 && p <= 100.0))
    raise_usage("BadPercentile", "percentile must be in (0, 100]");
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(p / 100.0 * static_cast<double>(values.size())));
  if (rank == 0) rank = 1;
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

namespace {

double mean_k_nearest_dist(std::span<const LabeledFeature> train, Metric metric,
                           std::span<const double> x, int k,
                           std::size_t skip_index) {
  std::vector<double> dists;
  dists.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (i == skip_index) continue;
    dists.push_back(distance(train[i].values, x, metric));
  }
  const std::size_t kk = std::min<std::size_t>(k, dists.size());
  std::nth_element(dists.begin(), dists.begin() + (kk - 1), dists.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < kk; ++i) sum += dists[i];
  return sum / static_cast<double>(kk);
}

constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);

}  // namespace

std::vector<double> ocknn_loo_scores(std::span<const LabeledFeature> train,
                                     int k, Metric metric) {
  if (train.size() < static_cast<std::size_t>(k) + 1)
    raise_data("InsufficientData",
               "leave-one-out scoring needs at least k+1 training vectors");
  std::vector<double> scores(train.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(train.size()); ++i)
    scores[i] = mean_k_nearest_dist(train, metric, train[i].values, k,
                                    static_cast<std::size_t>(i));
  return scores;
}

OneClassKnnModel ocknn_train(std::vector<LabeledFeature> adl, int k,
                             ThresholdRule rule, Metric metric,
                             std::span<const LabeledFeature> validation) {
  const std::size_t dim = checked_dim(adl, "ocknn_train");
  if (k <= 0) raise_usage("BadK", "k must be positive");
  for (const LabeledFeature& f : adl)
    if (f.label != Label::ADL)
      raise_data("ContainsFall", "one-class training set contains '" + f.id + "'");
  if (adl.size() < static_cast<std::size_t>(k) + 1)
    raise_data("InsufficientData",
               "need at least k+1 ADL vectors, got " + std::to_string(adl.size()));

  OneClassKnnModel m;
  m.train = std::move(adl);
  m.k = k;
  m.metric = metric;
  m.rule = rule;
  m.dim = dim;

  if (rule.kind == ThresholdKind::PERCENTILE) {
    m.theta = percentile_nearest_rank(ocknn_loo_scores(m.train, k, metric), rule.p);
  } else {
    bool has_adl = false, has_fall = false;
    for (const LabeledFeature& f : validation)
      (f.label == Label::ADL ? has_adl : has_fall) = true;
    if (!has_adl || !has_fall)
      raise_data("InsufficientData",
                 "youden threshold needs a validation split with both labels");

    const std::vector<double> scores = ocknn_score_batch(m, validation);
    std::vector<double> candidates(scores);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    std::size_t np_fall = 0, np_adl = 0;
    for (const LabeledFeature& f : validation)
      (f.label == Label::FALL ? np_fall : np_adl)++;

    double best_theta = candidates.back();
    double best_j = -2.0;
    for (const double theta : candidates) {
      std::size_t tp = 0, tn = 0;
      for (std::size_t i = 0; i < validation.size(); ++i) {
        const bool pred_fall = scores[i] > theta;
        if (validation[i].label == Label::FALL && pred_fall) ++tp;
        if (validation[i].label == Label::ADL && !pred_fall) ++tn;
      }
      const double j = static_cast<double>(tp) / static_cast<double>(np_fall) +
                       static_cast<double>(tn) / static_cast<double>(np_adl) - 1.0;
      if (j >= best_j) {  // ties -> largest theta; candidates are ascending
        best_j = j;
        best_theta = theta;
      }
    }
    m.theta = best_theta;
  }
  if (!(m.theta > 0.0)) m.theta = 1e-12;  // theta is required to be positive
  return m;
}

double ocknn_score(const OneClassKnnModel& model, std::span<const double> x) {
  if (x.size() != model.dim)
    raise_data("DimensionMismatch",
               "query has dimension " + std::to_string(x.size()) + ", model has " +
                   std::to_string(model.dim));
  return mean_k_nearest_dist(model.train, model.metric, x, model.k, kNoSkip);
}

Label ocknn_predict(const OneClassKnnModel& model, std::span<const double> x) {
  return ocknn_score(model, x) > model.theta ? Label::FALL : Label::ADL;
}

std::vector<double> ocknn_score_batch(const OneClassKnnModel& model,
                                      std::span<const LabeledFeature> queries) {
  std::vector<double> out(queries.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(queries.size()); ++i)
    out[i] = ocknn_score(model, queries[i].values);
  return out;
}

std::vector<Label> ocknn_predict_batch(const OneClassKnnModel& model,
                                       std::span<const LabeledFeature> queries) {
  const std::vector<double> scores = ocknn_score_batch(model, queries);
  std::vector<Label> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    out[i] = scores[i] > model.theta ? Label::FALL : Label::ADL;
  return out;
}

}  // namespace falldet
