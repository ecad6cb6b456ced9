#pragma once

#include <complex>
#include <span>
#include <vector>

#include "falldet/features.hpp"
#include "falldet/knn.hpp"
#include "falldet/types.hpp"

// Serial reference implementations. These take the obvious O(N^2)/full-sort
// route with no shared code paths into the fast kernels; the tests check the
// fast kernels against them and the bench target times both.
namespace falldet::ref {

// Direct O(N^2) summation: X[k] = sum_j x[j] exp(-2 pi i j k / N).
std::vector<std::complex<double>> naive_dft(std::span<const double> x);
std::vector<std::complex<double>> naive_idft(
    std::span<const std::complex<double>> spectrum);

// Serial feature extraction; FOURIER goes through naive_dft.
std::vector<LabeledFeature> extract_batch(std::span<const WindowRecord> windows,
                                          const FeatureOptions& opt);

// Full distance sort per query, same (distance, id) tie rule.
Label knn_predict(const KnnModel& model, std::span<const double> x);
std::vector<Label> knn_predict_batch(const KnnModel& model,
                                     std::span<const LabeledFeature> queries);

// Serial mean-of-k-nearest novelty scores via full sort.
double ocknn_score(const OneClassKnnModel& model, std::span<const double> x);
std::vector<double> ocknn_score_batch(const OneClassKnnModel& model,
                                      std::span<const LabeledFeature> queries);
std::vector<double> ocknn_loo_scores(std::span<const LabeledFeature> train,
                                     int k, Metric metric);

}  // namespace falldet::ref
