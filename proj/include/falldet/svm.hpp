#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

enum class SvmKind { TWO_CLASS, ONE_CLASS };

struct KernelSpec {
  enum Type { LINEAR, RBF } type = RBF;
  double gamma = 0.0;  // <= 0 resolves to 1/dim at train time
};

struct SvmParams {
  SvmKind kind = SvmKind::TWO_CLASS;
  KernelSpec kernel;
  double c = 1.0;    // two-class box constraint
  double nu = 0.1;   // one-class, in (0, 1]
  double eps = 1e-3;      // KKT violation tolerance for the SMO loop
  double gap_tol = 1e-3;  // relative duality gap required at termination
  std::size_t max_iter = 0;  // 0 -> heuristic cap from the training size
};

// Fitted decision function: f(x) = sum_i coef[i] * K(sv[i], x) + bias.
// Two-class predicts FALL when f > 0; one-class treats f < 0 as novelty
// (FALL). Ties go to ADL in both cases.
struct SvmModel {
  SvmKind kind = SvmKind::TWO_CLASS;
  KernelSpec kernel;
  double c = 1.0;
  double nu = 0.1;
  std::size_t dim = 0;
  std::vector<std::vector<double>> sv;
  std::vector<double> coef;
  double bias = 0.0;
  std::size_t iterations = 0;
  double duality_gap = 0.0;  // relative gap reached by the solver
};

SvmModel svm_train(std::span<const LabeledFeature> data, SvmParams params);

double svm_decision(const SvmModel& model, std::span<const double> x);
Label svm_predict(const SvmModel& model, std::span<const double> x);

// Parallel over queries.
std::vector<Label> svm_predict_batch(const SvmModel& model,
                                     std::span<const LabeledFeature> queries);

}  // namespace falldet
