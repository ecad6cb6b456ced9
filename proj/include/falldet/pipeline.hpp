#pragma once

#include <string>

#include "falldet/crossval.hpp"
#include "falldet/knn.hpp"
#include "falldet/svm.hpp"

namespace falldet {

enum class ClassifierKind { KNN2, KNN1, SVM2, SVM1 };

const char* to_string(ClassifierKind k);
ClassifierKind classifier_from_string(const std::string& s);

// Everything needed to train one classifier inside a fold or on a full
// training split.
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::KNN2;
  int k = 1;
  Metric metric = Metric::EUCLIDEAN;
  ThresholdRule rule = ThresholdRule::percentile(95.0);
  SvmParams svm;
  bool zscore = false;  // optional per-dimension standardization (ablation)
};

// Builds the trainer used by kfold_cv. Two-class trainers fit the whole
// training part; one-class trainers fit its ADL vectors only (the youden
// rule additionally carves a validation split from the training part,
// seeded per fold).
TrainFn make_trainer(const ClassifierSpec& spec);

std::unique_ptr<Classifier> train_classifier(const ClassifierSpec& spec,
                                             std::span<const LabeledFeature> data,
                                             std::uint64_t seed);

}  // namespace falldet
