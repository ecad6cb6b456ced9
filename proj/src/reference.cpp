#include "falldet/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "falldet/error.hpp"

namespace falldet::ref {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// exp(-2 pi i (j*k mod N) / N); the modular reduction keeps the angle small.
std::complex<double> unit_root(std::uint64_t j, std::uint64_t k,
                               std::uint64_t n, double sign) {
  const std::uint64_t m = (j * k) % n;
  const double ang = sign * kTwoPi * static_cast<double>(m) / static_cast<double>(n);
  return {std::cos(ang), std::sin(ang)};
}

}  // namespace

std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
  if (x.empty()) raise_data("EmptyInput", "naive_dft of empty sequence");
  const std::uint64_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::uint64_t j = 0; j < n; ++j) acc += x[j] * unit_root(j, k, n, -1.0);
    out[k] = acc;
  }
  return out;
}

std::vector<std::complex<double>> naive_idft(
    std::span<const std::complex<double>> spectrum) {
  if (spectrum.empty()) raise_data("EmptyInput", "naive_idft of empty sequence");
  const std::uint64_t n = spectrum.size();
  std::vector<std::complex<double>> out(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    std::complex<double> acc{0.0, 0.0};
    for (std::uint64_t k = 0; k < n; ++k)
      acc += spectrum[k] * unit_root(j, k, n, 1.0);
    out[j] = acc / static_cast<double>(n);
  }
  return out;
}

std::vector<LabeledFeature> extract_batch(std::span<const WindowRecord> windows,
                                          const FeatureOptions& opt) {
  std::vector<LabeledFeature> out(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const WindowRecord& w = windows[i];
    out[i].id = w.id;
    out[i].label = w.label;
    if (opt.extractor == Extractor::FOURIER) {
      const MagnitudeSeries mag = magnitude(w);
      const auto spec = naive_dft(mag.values);
      const std::size_t half = mag.values.size() / 2;
      out[i].values.resize(half);
      for (std::size_t k = 1; k <= half; ++k)
        out[i].values[k - 1] = std::abs(spec[k]);
      if (opt.normalize) {
        double dc = std::abs(spec[0]);
        if (dc < 1e-12) dc = static_cast<double>(mag.values.size());
        for (double& v : out[i].values) v /= dc;
      }
    } else {
      out[i].values = extract(w, opt).values;
    }
  }
  return out;
}

namespace {

struct Scored {
  double dist;
  std::size_t index;
};

std::vector<Scored> sorted_by_distance(std::span<const LabeledFeature> train,
                                       Metric metric,
                                       std::span<const double> x) {
  std::vector<Scored> all(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    all[i] = {distance(train[i].values, x, metric), i};
  std::sort(all.begin(), all.end(), [&](const Scored& a, const Scored& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return train[a.index].id < train[b.index].id;
  });
  return all;
}

}  // namespace

Label knn_predict(const KnnModel& model, std::span<const double> x) {
  const auto ranked = sorted_by_distance(model.train, model.metric, x);
  int falls = 0;
  for (int i = 0; i < model.k; ++i)
    if (model.train[ranked[i].index].label == Label::FALL) ++falls;
  return 2 * falls > model.k ? Label::FALL : Label::ADL;
}

std::vector<Label> knn_predict_batch(const KnnModel& model,
                                     std::span<const LabeledFeature> queries) {
  std::vector<Label> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    out[i] = ref::knn_predict(model, queries[i].values);
  return out;
}

double ocknn_score(const OneClassKnnModel& model, std::span<const double> x) {
  const auto ranked = sorted_by_distance(model.train, model.metric, x);
  double sum = 0.0;
  const std::size_t kk = std::min<std::size_t>(model.k, ranked.size());
  for (std::size_t i = 0; i < kk; ++i) sum += ranked[i].dist;
  return sum / static_cast<double>(kk);
}

std::vector<double> ocknn_score_batch(const OneClassKnnModel& model,
                                      std::span<const LabeledFeature> queries) {
  std::vector<double> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    out[i] = ref::ocknn_score(model, queries[i].values);
  return out;
}

std::vector<double> ocknn_loo_scores(std::span<const LabeledFeature> train,
                                     int k, Metric metric) {
  std::vector<double> scores(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    std::vector<double> dists;
    dists.reserve(train.size() - 1);
    for (std::size_t j = 0; j < train.size(); ++j) {
      if (j == i) continue;
      dists.push_back(distance(train[j].values, train[i].values, metric));
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t kk = std::min<std::size_t>(k, dists.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < kk; ++t) sum += dists[t];
    scores[i] = sum / static_cast<double>(kk);
  }
  return scores;
}

}  // namespace falldet::ref
