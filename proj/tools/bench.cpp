#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "CLI11.hpp"
#include "falldet/features.hpp"
#include "falldet/knn.hpp"
#include "falldet/reference.hpp"
#include "falldet/synth.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double best_ms(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(
        best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, double serial_ms, double parallel_ms,
         double max_diff) {
  std::printf("%-22s %12.2f %12.2f %9.2fx %12.3g\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial reference vs parallel kernel benchmark"};
  std::size_t count = 2000;
  int window = 128;
  int k = 5;
  int reps = 3;
  std::uint64_t seed = 7;
  app.add_option("--count", count, "total window count");
  app.add_option("--window", window, "window length");
  app.add_option("--k", k, "kNN neighbor count");
  app.add_option("--reps", reps, "repetitions (best time wins)");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  falldet::SynthOptions opt;
  opt.adl_count = count / 2;
  opt.fall_count = count - count / 2;
  opt.window_len = static_cast<std::size_t>(window);
  opt.seed = seed;
  const std::vector<falldet::WindowRecord> windows =
      falldet::synth_windows(opt);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("windows=%zu n=%d k=%d reps=%d threads=%d\n", windows.size(),
              window, k, reps, threads);
  std::printf("%-22s %12s %12s %10s %12s\n", "kernel", "serial ms",
              "parallel ms", "speedup", "max |diff|");

  const falldet::FeatureOptions fo{falldet::Extractor::FOURIER, false};

  std::vector<falldet::LabeledFeature> serial_feats, parallel_feats;
  const double t_ser_extract =
      best_ms(reps, [&] { serial_feats = falldet::ref::extract_batch(windows, fo); });
  const double t_par_extract =
      best_ms(reps, [&] { parallel_feats = falldet::extract_batch(windows, fo); });
  double feat_diff = 0.0;
  for (std::size_t i = 0; i < serial_feats.size(); ++i)
    for (std::size_t j = 0; j < serial_feats[i].values.size(); ++j)
      feat_diff = std::max(feat_diff,
                           std::abs(serial_feats[i].values[j] -
                                    parallel_feats[i].values[j]));
  row("extract fourier", t_ser_extract, t_par_extract, feat_diff);

  const falldet::KnnModel model = falldet::knn_train(parallel_feats, k);
  std::vector<falldet::Label> serial_pred, parallel_pred;
  const double t_ser_knn = best_ms(
      reps, [&] { serial_pred = falldet::ref::knn_predict_batch(model, parallel_feats); });
  const double t_par_knn = best_ms(
      reps, [&] { parallel_pred = falldet::knn_predict_batch(model, parallel_feats); });
  std::size_t label_diff = 0;
  for (std::size_t i = 0; i < serial_feats.size(); ++i)
    label_diff += serial_pred[i] != parallel_pred[i] ? 1 : 0;
  row("knn predict", t_ser_knn, t_par_knn, static_cast<double>(label_diff));

  std::vector<falldet::LabeledFeature> adl;
  for (const falldet::LabeledFeature& f : parallel_feats)
    if (f.label == falldet::Label::ADL) adl.push_back(f);
  std::vector<double> serial_loo, parallel_loo;
  const double t_ser_loo = best_ms(reps, [&] {
    serial_loo = falldet::ref::ocknn_loo_scores(adl, k, falldet::Metric::EUCLIDEAN);
  });
  const double t_par_loo = best_ms(reps, [&] {
    parallel_loo = falldet::ocknn_loo_scores(adl, k, falldet::Metric::EUCLIDEAN);
  });
  double loo_diff = 0.0;
  for (std::size_t i = 0; i < serial_loo.size(); ++i)
    loo_diff = std::max(loo_diff, std::abs(serial_loo[i] - parallel_loo[i]));
  row("ocknn loo scores", t_ser_loo, t_par_loo, loo_diff);
  return 0;
}
