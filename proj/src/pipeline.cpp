#include "falldet/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "falldet/error.hpp"
#include "falldet/rng.hpp"

namespace falldet {

const char* to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::KNN2: return "knn2";
    case ClassifierKind::KNN1: return "knn1";
    case ClassifierKind::SVM2: return "svm2";
    case ClassifierKind::SVM1: return "svm1";
  }
  return "?";
}

ClassifierKind classifier_from_string(const std::string& s) {
  if (s == "knn2") return ClassifierKind::KNN2;
  if (s == "knn1") return ClassifierKind::KNN1;
  if (s == "svm2") return ClassifierKind::SVM2;
  if (s == "svm1") return ClassifierKind::SVM1;
  raise_usage("BadClassifier", "unknown classifier '" + s + "'");
}

namespace {

struct Standardizer {
  std::vector<double> mean, scale;

  static Standardizer fit(std::span<const LabeledFeature> data) {
    Standardizer s;
    if (data.empty()) return s;
    const std::size_t d = data.front().values.size();
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    for (const LabeledFeature& f : data)
      for (std::size_t j = 0; j < d; ++j) s.mean[j] += f.values[j];
    for (double& m : s.mean) m /= static_cast<double>(data.size());
    std::vector<double> var(d, 0.0);
    for (const LabeledFeature& f : data)
      for (std::size_t j = 0; j < d; ++j) {
        const double c = f.values[j] - s.mean[j];
        var[j] += c * c;
      }
    for (std::size_t j = 0; j < d; ++j) {
      const double sd = std::sqrt(var[j] / static_cast<double>(data.size()));
      s.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
  }

  std::vector<LabeledFeature> apply(std::span<const LabeledFeature> data) const {
    std::vector<LabeledFeature> out(data.begin(), data.end());
    if (mean.empty()) return out;
    for (LabeledFeature& f : out)
      for (std::size_t j = 0; j < f.values.size() && j < mean.size(); ++j)
        f.values[j] = (f.values[j] - mean[j]) / scale[j];
    return out;
  }
};

class KnnClassifier : public Classifier {
public:
  KnnClassifier(KnnModel model, Standardizer std_)
      : model_(std::move(model)), std_(std::move(std_)) {}
  std::vector<Label> predict(std::span<const LabeledFeature> queries) const override {
    const auto q = std_.apply(queries);
    return knn_predict_batch(model_, q);
  }

private:
  KnnModel model_;
  Standardizer std_;
};

class OneClassKnnClassifier : public Classifier {
public:
  OneClassKnnClassifier(OneClassKnnModel model, Standardizer std_)
      : model_(std::move(model)), std_(std::move(std_)) {}
  std::vector<Label> predict(std::span<const LabeledFeature> queries) const override {
    const auto q = std_.apply(queries);
    return ocknn_predict_batch(model_, q);
  }

private:
  OneClassKnnModel model_;
  Standardizer std_;
};

class SvmClassifier : public Classifier {
public:
  SvmClassifier(SvmModel model, Standardizer std_)
      : model_(std::move(model)), std_(std::move(std_)) {}
  std::vector<Label> predict(std::span<const LabeledFeature> queries) const override {
    const auto q = std_.apply(queries);
    return svm_predict_batch(model_, q);
  }

private:
  SvmModel model_;
  Standardizer std_;
};

std::vector<LabeledFeature> adl_only(std::span<const LabeledFeature> data) {
  std::vector<LabeledFeature> out;
  out.reserve(data.size());
  for (const LabeledFeature& f : data)
    if (f.label == Label::ADL) out.push_back(f);
  return out;
}

}  // namespace

std::unique_ptr<Classifier> train_classifier(const ClassifierSpec& spec,
                                             std::span<const LabeledFeature> data,
                                             std::uint64_t seed) {
  switch (spec.kind) {
    case ClassifierKind::KNN2: {
      Standardizer std_;
      std::vector<LabeledFeature> train(data.begin(), data.end());
      if (spec.zscore) {
        std_ = Standardizer::fit(train);
        train = std_.apply(train);
      }
      return std::make_unique<KnnClassifier>(
          knn_train(std::move(train), spec.k, spec.metric), std_);
    }
    case ClassifierKind::KNN1: {
      std::vector<LabeledFeature> adl = adl_only(data);
      if (adl.empty())
        raise_data("InsufficientData", "one-class trainer found no ADL vectors");
      Standardizer std_;
      if (spec.zscore) {
        std_ = Standardizer::fit(adl);
        adl = std_.apply(adl);
      }
      if (spec.rule.kind == ThresholdKind::PERCENTILE) {
        return std::make_unique<OneClassKnnClassifier>(
            ocknn_train(std::move(adl), spec.k, spec.rule, spec.metric), std_);
      }
      // youden: hold out 20% of ADL plus every FALL of the training part as
      // the labeled validation split.
      std::vector<std::size_t> order(adl.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      Rng rng(derive_seed(seed, 0x9d5ULL));
      rng.shuffle(order);
      const std::size_t held = std::max<std::size_t>(1, adl.size() / 5);
      std::vector<LabeledFeature> fit_part, validation;
      for (std::size_t pos = 0; pos < order.size(); ++pos)
        (pos < held ? validation : fit_part).push_back(adl[order[pos]]);
      for (const LabeledFeature& f : data)
        if (f.label == Label::FALL) validation.push_back(std_.apply({&f, 1})[0]);
      return std::make_unique<OneClassKnnClassifier>(
          ocknn_train(std::move(fit_part), spec.k, spec.rule, spec.metric,
                      validation),
          std_);
    }
    case ClassifierKind::SVM2: {
      Standardizer std_;
      std::vector<LabeledFeature> train(data.begin(), data.end());
      if (spec.zscore) {
        std_ = Standardizer::fit(train);
        train = std_.apply(train);
      }
      SvmParams params = spec.svm;
      params.kind = SvmKind::TWO_CLASS;
      return std::make_unique<SvmClassifier>(svm_train(train, params), std_);
    }
    case ClassifierKind::SVM1: {
      std::vector<LabeledFeature> adl = adl_only(data);
      if (adl.empty())
        raise_data("InsufficientData", "one-class trainer found no ADL vectors");
      Standardizer std_;
      if (spec.zscore) {
        std_ = Standardizer::fit(adl);
        adl = std_.apply(adl);
      }
      SvmParams params = spec.svm;
      params.kind = SvmKind::ONE_CLASS;
      return std::make_unique<SvmClassifier>(svm_train(adl, params), std_);
    }
  }
  raise_usage("BadClassifier", "unhandled classifier kind");
}

TrainFn make_trainer(const ClassifierSpec& spec) {
  return [spec](std::span<const LabeledFeature> train_part,
                std::uint64_t fold_seed) {
    return train_classifier(spec, train_part, fold_seed);
  };
}

}  // namespace falldet
