#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "falldet/knn.hpp"
#include "falldet/reference.hpp"
#include "falldet/rng.hpp"
#include "helpers.hpp"

using namespace falldet;

namespace {

LabeledFeature lf(std::string id, Label label, std::vector<double> values) {
  return LabeledFeature{std::move(id), label, std::move(values)};
}

std::vector<LabeledFeature> random_features(std::size_t count, std::size_t dim,
                                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledFeature> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.normal() * 2.0;
    char id[32];
    std::snprintf(id, sizeof id, "f%04zu", i);
    out.push_back(lf(id, rng.below(2) == 0 ? Label::ADL : Label::FALL,
                     std::move(v)));
  }
  return out;
}

}  // namespace

TEST_CASE("distance matches hand values for both metrics") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{4.0, -2.0, 3.0};
  CHECK(distance(a, b, Metric::EUCLIDEAN) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(distance(a, b, Metric::MANHATTAN) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(distance(a, a, Metric::EUCLIDEAN) == 0.0);
  CHECK(testutil::error_code_of([&] {
          std::vector<double> c{1.0, 2.0};
          distance(a, c, Metric::EUCLIDEAN);
        }) == "DimensionMismatch");
}

TEST_CASE("metric string round trip") {
  CHECK(metric_from_string("euclidean") == Metric::EUCLIDEAN);
  CHECK(metric_from_string("manhattan") == Metric::MANHATTAN);
  CHECK(to_string(Metric::MANHATTAN) == std::string("manhattan"));
  CHECK(testutil::error_code_of([] { metric_from_string("cosine"); }) ==
        "BadMetric");
}

TEST_CASE("knn_train validates its inputs") {
  std::vector<LabeledFeature> both{
      lf("a", Label::ADL, {0.0, 0.0}),
      lf("b", Label::FALL, {1.0, 1.0}),
      lf("c", Label::ADL, {0.1, 0.0}),
  };
  CHECK(testutil::error_code_of([] { knn_train({}, 1); }) == "EmptyTrainingSet");
  CHECK(testutil::error_code_of([&] { knn_train(both, 0); }) == "BadK");
  CHECK(testutil::error_code_of([&] { knn_train(both, -3); }) == "BadK");
  CHECK(testutil::error_code_of([&] { knn_train(both, 2); }) == "BadK");
  CHECK(testutil::raises_kind([&] { knn_train(both, 2); },
                              ErrorKind::Usage));
  CHECK(testutil::error_code_of([&] { knn_train(both, 5); }) == "KTooLarge");
  CHECK(testutil::error_code_of([] {
          std::vector<LabeledFeature> adl_only{lf("a", Label::ADL, {0.0}),
                                               lf("b", Label::ADL, {1.0})};
          knn_train(std::move(adl_only), 1);
        }) == "MissingClass");
  CHECK(testutil::error_code_of([] {
          std::vector<LabeledFeature> ragged{lf("a", Label::ADL, {0.0, 1.0}),
                                             lf("b", Label::FALL, {1.0})};
          knn_train(std::move(ragged), 1);
        }) == "DimensionMismatch");

  const KnnModel m = knn_train(both, 3);
  CHECK(m.k == 3);
  CHECK(m.dim == 2);
  CHECK(m.train.size() == 3);
  CHECK(testutil::error_code_of([&] {
          std::vector<double> q{1.0, 2.0, 3.0};
          knn_predict(m, q);
        }) == "DimensionMismatch");
}

TEST_CASE("1-NN picks the nearest point's label") {
  const KnnModel m = knn_train(
      {
          lf("adl-0", Label::ADL, {0.0, 0.0}),
          lf("fall-0", Label::FALL, {10.0, 0.0}),
      },
      1);
  CHECK(knn_predict(m, std::vector<double>{1.0, 0.0}) == Label::ADL);
  CHECK(knn_predict(m, std::vector<double>{9.0, 0.5}) == Label::FALL);
  // A training point queried against itself is its own nearest neighbor.
  CHECK(knn_predict(m, m.train[1].values) == Label::FALL);
}

TEST_CASE("3-NN majority vote beats a single near outlier") {
  // Two ADL points hug the query; the single nearest point is a FALL.
  const KnnModel m = knn_train(
      {
          lf("fall-near", Label::FALL, {0.1, 0.0}),
          lf("adl-1", Label::ADL, {0.2, 0.0}),
          lf("adl-2", Label::ADL, {0.0, 0.25}),
          lf("fall-far", Label::FALL, {5.0, 5.0}),
      },
      3);
  const std::vector<double> q{0.0, 0.0};
  const KnnModel m1 = knn_train(m.train, 1);
  CHECK(knn_predict(m1, q) == Label::FALL);
  CHECK(knn_predict(m, q) == Label::ADL);
}

TEST_CASE("distance ties break on the smaller id") {
  // Both training points are exactly distance 1 from the query; the winner
  // must be the lexicographically smaller id regardless of insertion order.
  for (const bool adl_first : {true, false}) {
    std::vector<LabeledFeature> train;
    if (adl_first) {
      train.push_back(lf("a-adl", Label::ADL, {1.0, 0.0}));
      train.push_back(lf("b-fall", Label::FALL, {-1.0, 0.0}));
    } else {
      train.push_back(lf("b-fall", Label::FALL, {-1.0, 0.0}));
      train.push_back(lf("a-adl", Label::ADL, {1.0, 0.0}));
    }
    const KnnModel m = knn_train(std::move(train), 1);
    CHECK(knn_predict(m, std::vector<double>{0.0, 0.0}) == Label::ADL);
  }
  // And the mirror case where the smaller id carries the FALL label.
  const KnnModel m = knn_train(
      {
          lf("a-fall", Label::FALL, {1.0, 0.0}),
          lf("b-adl", Label::ADL, {-1.0, 0.0}),
      },
      1);
  CHECK(knn_predict(m, std::vector<double>{0.0, 0.0}) == Label::FALL);
}

TEST_CASE("duplicated training points still vote once each") {
  const KnnModel m = knn_train(
      {
          lf("dup-1", Label::ADL, {1.0, 1.0}),
          lf("dup-2", Label::ADL, {1.0, 1.0}),
          lf("fall", Label::FALL, {1.0, 1.2}),
      },
      3);
  // All three are neighbors; ADL wins 2:1 even though two points coincide.
  CHECK(knn_predict(m, std::vector<double>{1.0, 1.0}) == Label::ADL);
}

TEST_CASE("parallel batch prediction equals the serial reference") {
  for (const Metric metric : {Metric::EUCLIDEAN, Metric::MANHATTAN}) {
    for (const int k : {1, 3, 7}) {
      auto train = random_features(120, 6, 77 + static_cast<std::uint64_t>(k));
      // Force both classes to be present.
      train[0].label = Label::ADL;
      train[1].label = Label::FALL;
      const KnnModel m = knn_train(std::move(train), k, metric);
      const auto queries = random_features(80, 6, 900 + static_cast<std::uint64_t>(k));
      const std::vector<Label> fast = knn_predict_batch(m, queries);
      const std::vector<Label> slow = ref::knn_predict_batch(m, queries);
      REQUIRE(fast.size() == queries.size());
      CHECK(fast == slow);
      for (std::size_t i = 0; i < queries.size(); ++i)
        CHECK(fast[i] == knn_predict(m, queries[i].values));
    }
  }
}

TEST_CASE("percentile_nearest_rank matches a sorted-copy oracle") {
  Rng rng(404);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<double> values(n);
    for (double& v : values) v = rng.normal();
    const double p = 100.0 * (0.01 + 0.99 * rng.unit());
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(p / 100.0 * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    CHECK(percentile_nearest_rank(values, p) == sorted[rank - 1]);
  }
  CHECK(percentile_nearest_rank({5.0, 1.0, 3.0}, 100.0) == 5.0);
  CHECK(percentile_nearest_rank({5.0, 1.0, 3.0}, 50.0) == 3.0);
  CHECK(percentile_nearest_rank({5.0, 1.0, 3.0}, 1.0) == 1.0);
  CHECK(percentile_nearest_rank({7.0}, 95.0) == 7.0);
  CHECK(testutil::error_code_of([] { percentile_nearest_rank({}, 95.0); }) ==
        "EmptyInput");
  CHECK(testutil::error_code_of([] { percentile_nearest_rank({1.0}, 0.0); }) ==
        "BadPercentile");
  CHECK(testutil::error_code_of([] { percentile_nearest_rank({1.0}, 101.0); }) ==
        "BadPercentile");
}

TEST_CASE("ocknn leave-one-out scores match a hand computation") {
  // Four collinear points; with k=1 the LOO score of each is the gap to its
  // nearest other point.
  const std::vector<LabeledFeature> train{
      lf("p0", Label::ADL, {0.0}),
      lf("p1", Label::ADL, {1.0}),
      lf("p2", Label::ADL, {3.0}),
      lf("p3", Label::ADL, {7.0}),
  };
  const std::vector<double> loo = ocknn_loo_scores(train, 1, Metric::EUCLIDEAN);
  REQUIRE(loo.size() == 4);
  CHECK(loo[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(loo[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(loo[2] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(loo[3] == doctest::Approx(4.0).epsilon(1e-12));

  // k=2: mean of the two nearest others.
  const std::vector<double> loo2 = ocknn_loo_scores(train, 2, Metric::EUCLIDEAN);
  CHECK(loo2[0] == doctest::Approx((1.0 + 3.0) / 2).epsilon(1e-12));
  CHECK(loo2[1] == doctest::Approx((1.0 + 2.0) / 2).epsilon(1e-12));
  CHECK(loo2[2] == doctest::Approx((2.0 + 3.0) / 2).epsilon(1e-12));
  CHECK(loo2[3] == doctest::Approx((4.0 + 6.0) / 2).epsilon(1e-12));

  CHECK(testutil::error_code_of([&] {
          ocknn_loo_scores(train, 4, Metric::EUCLIDEAN);
        }) == "InsufficientData");
}

TEST_CASE("ocknn percentile training sets theta from the LOO scores") {
  std::vector<LabeledFeature> adl;
  for (int i = 0; i < 10; ++i)
    adl.push_back(lf("a" + std::to_string(i), Label::ADL,
                     {static_cast<double>(i), 0.0}));
  const std::vector<double> loo = ocknn_loo_scores(adl, 3, Metric::EUCLIDEAN);
  const OneClassKnnModel m =
      ocknn_train(adl, 3, ThresholdRule::percentile(95.0));
  CHECK(m.theta == percentile_nearest_rank(loo, 95.0));
  CHECK(m.k == 3);
  CHECK(m.dim == 2);
  CHECK(m.train.size() == 10);

  // Scores agree with the shared helper path.
  const std::vector<double> q{100.0, 0.0};
  const double s = ocknn_score(m, q);
  CHECK(s > m.theta);
  CHECK(ocknn_predict(m, q) == Label::FALL);
  // A point inside the cloud scores low and stays ADL.
  CHECK(ocknn_predict(m, std::vector<double>{4.5, 0.0}) == Label::ADL);
}

TEST_CASE("lower percentile never raises theta") {
  auto adl = random_features(60, 4, 31);
  for (auto& f : adl) f.label = Label::ADL;
  double prev = -1.0;
  for (const double p : {10.0, 35.0, 60.0, 85.0, 99.0}) {
    const OneClassKnnModel m = ocknn_train(adl, 3, ThresholdRule::percentile(p));
    CHECK(m.theta >= prev);
    prev = m.theta;
  }
}

TEST_CASE("ocknn_train validates its inputs") {
  std::vector<LabeledFeature> adl{
      lf("a", Label::ADL, {0.0}),
      lf("b", Label::ADL, {1.0}),
      lf("c", Label::ADL, {2.0}),
  };
  CHECK(testutil::error_code_of([] {
          ocknn_train({}, 1, ThresholdRule::percentile(95.0));
        }) == "EmptyTrainingSet");
  CHECK(testutil::error_code_of([&] {
          ocknn_train(adl, 0, ThresholdRule::percentile(95.0));
        }) == "BadK");
  CHECK(testutil::error_code_of([&] {
          auto bad = adl;
          bad[1].label = Label::FALL;
          ocknn_train(std::move(bad), 1, ThresholdRule::percentile(95.0));
        }) == "ContainsFall");
  CHECK(testutil::error_code_of([&] {
          ocknn_train(adl, 3, ThresholdRule::percentile(95.0));
        }) == "InsufficientData");
  // Youden without a two-label validation split.
  CHECK(testutil::error_code_of([&] {
          ocknn_train(adl, 1, ThresholdRule::youden());
        }) == "InsufficientData");
  CHECK(testutil::error_code_of([&] {
          ocknn_train(adl, 1, ThresholdRule::youden(), Metric::EUCLIDEAN, adl);
        }) == "InsufficientData");
}

TEST_CASE("youden picks the separating theta on separable validation data") {
  // Training cloud near the origin; validation scores are well separated so
  // the unique perfect split sits at the largest ADL score.
  std::vector<LabeledFeature> adl;
  for (int i = 0; i < 8; ++i)
    adl.push_back(lf("a" + std::to_string(i), Label::ADL,
                     {0.1 * static_cast<double>(i)}));
  std::vector<LabeledFeature> validation{
      lf("v0", Label::ADL, {0.83}),
      lf("v1", Label::ADL, {0.95}),
      lf("v2", Label::FALL, {10.0}),
      lf("v3", Label::FALL, {20.0}),
  };
  const OneClassKnnModel m =
      ocknn_train(adl, 1, ThresholdRule::youden(), Metric::EUCLIDEAN, validation);
  const std::vector<double> scores = ocknn_score_batch(m, validation);
  // Perfect split on the validation data itself (prediction is score > theta).
  for (std::size_t i = 0; i < validation.size(); ++i) {
    const Label pred = scores[i] > m.theta ? Label::FALL : Label::ADL;
    CHECK(pred == validation[i].label);
  }
  double max_adl = 0.0;
  for (std::size_t i = 0; i < validation.size(); ++i)
    if (validation[i].label == Label::ADL) max_adl = std::max(max_adl, scores[i]);
  CHECK(m.theta == doctest::Approx(max_adl).epsilon(1e-12));
  CHECK(m.theta < 5.0);
}

TEST_CASE("youden J ties resolve to the largest theta") {
  // Two coincident train points make every score the plain distance to the
  // origin. Validation scores interleave as ADL 1, FALL 2, ADL 3, FALL 4:
  // J peaks at 0.5 for both theta=1 and theta=3, so theta must come out 3.
  std::vector<LabeledFeature> adl{
      lf("a0", Label::ADL, {0.0}),
      lf("a1", Label::ADL, {0.0}),
  };
  std::vector<LabeledFeature> validation{
      lf("v0", Label::ADL, {1.0}),
      lf("v1", Label::FALL, {2.0}),
      lf("v2", Label::ADL, {3.0}),
      lf("v3", Label::FALL, {4.0}),
  };
  const OneClassKnnModel m =
      ocknn_train(adl, 1, ThresholdRule::youden(), Metric::EUCLIDEAN, validation);
  CHECK(m.theta == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("ocknn batch kernels equal the serial reference") {
  auto adl = random_features(90, 5, 5150);
  for (auto& f : adl) f.label = Label::ADL;
  const auto queries = random_features(60, 5, 6001);
  for (const Metric metric : {Metric::EUCLIDEAN, Metric::MANHATTAN}) {
    const OneClassKnnModel m =
        ocknn_train(adl, 5, ThresholdRule::percentile(90.0), metric);
    const std::vector<double> fast = ocknn_score_batch(m, queries);
    const std::vector<double> slow = ref::ocknn_score_batch(m, queries);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
      CHECK(fast[i] == ocknn_score(m, queries[i].values));
      CHECK(std::abs(fast[i] - ref::ocknn_score(m, queries[i].values)) <= 1e-12);
    }
    const std::vector<double> loo_fast = ocknn_loo_scores(m.train, 5, metric);
    const std::vector<double> loo_slow = ref::ocknn_loo_scores(m.train, 5, metric);
    REQUIRE(loo_fast.size() == loo_slow.size());
    for (std::size_t i = 0; i < loo_fast.size(); ++i)
      CHECK(loo_fast[i] == doctest::Approx(loo_slow[i]).epsilon(1e-12));
    const std::vector<Label> preds = ocknn_predict_batch(m, queries);
    for (std::size_t i = 0; i < preds.size(); ++i)
      CHECK(preds[i] == (fast[i] > m.theta ? Label::FALL : Label::ADL));
  }
}

TEST_CASE("threshold rule string round trip") {
  CHECK(to_string(ThresholdRule::percentile(95.0)) == "percentile:95");
  CHECK(to_string(ThresholdRule::percentile(87.5)) == "percentile:87.5");
  CHECK(to_string(ThresholdRule::youden()) == "youden");
  const ThresholdRule r = threshold_rule_from_string("percentile:80");
  CHECK(r.kind == ThresholdKind::PERCENTILE);
  CHECK(r.p == 80.0);
  CHECK(threshold_rule_from_string("youden").kind == ThresholdKind::YOUDEN);
  CHECK(testutil::error_code_of([] {
          threshold_rule_from_string("percentile:0");
        }) == "BadThresholdRule");
  CHECK(testutil::error_code_of([] {
          threshold_rule_from_string("quantile:5");
        }) == "BadThresholdRule");
}
