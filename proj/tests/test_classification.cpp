#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "hsiband/classification.hpp"
#include "hsiband/error.hpp"
#include "hsiband/synth_scene.hpp"
#include "test_support.hpp"

namespace hsiband::classify {
namespace {

GroundTruth single_row(std::vector<std::uint8_t> labels, std::size_t classes) {
  const std::size_t n = labels.size();
  return GroundTruth(1, n, std::move(labels), classes);
}

// Three classes as Gaussian blobs in three bands; blob centers overlap enough
// that accuracy is well below 1.
struct Blobs {
  HsiCube cube;
  GroundTruth gt;
};

Blobs gaussian_blobs(std::uint64_t seed) {
  const std::size_t rows = 20;
  const std::size_t cols = 30;
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> labels(rows * cols);
  for (auto& l : labels) l = static_cast<std::uint8_t>(rng() % 5 == 0 ? 0 : 1 + rng() % 3);
  labels[0] = 1;
  const double centers[3][3] = {{1000, 2000, 3000}, {1400, 1700, 3300}, {900, 2300, 3500}};
  const double spread[3] = {300, 250, 400};
  HsiCube cube(3, rows, cols);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t c = labels[i] ? labels[i] - 1 : rng() % 3;
    for (std::size_t b = 0; b < 3; ++b)
      cube.band(b)[i] = static_cast<std::uint16_t>(
          std::clamp(std::round(centers[c][b] + spread[b] * rnd::standard_normal(rng)), 0.0, 65535.0));
  }
  return {std::move(cube), GroundTruth(rows, cols, std::move(labels), 3)};
}

// Feature vectors z-scored with population statistics of the training rows.
std::vector<std::vector<double>> zscored(const HsiCube& cube, const std::vector<std::size_t>& bands,
                                         const std::vector<Position>& train, const std::vector<Position>& pts) {
  std::vector<std::vector<double>> out(pts.size(), std::vector<double>(bands.size()));
  for (std::size_t j = 0; j < bands.size(); ++j) {
    double mean = 0.0;
    for (const auto& p : train) mean += cube.at(bands[j], p.row, p.col);
    mean /= static_cast<double>(train.size());
    double var = 0.0;
    for (const auto& p : train) var += std::pow(cube.at(bands[j], p.row, p.col) - mean, 2);
    const double sd = std::sqrt(var / static_cast<double>(train.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) out[i][j] = (cube.at(bands[j], pts[i].row, pts[i].col) - mean) / sd;
  }
  return out;
}

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

std::vector<std::uint8_t> oracle_nearest_centroid(const Blobs& s, const std::vector<std::size_t>& bands,
                                                  const Split& sp) {
  const auto xtr = zscored(s.cube, bands, sp.train, sp.train);
  const auto xte = zscored(s.cube, bands, sp.train, sp.test);
  std::vector<std::uint8_t> out;
  for (const auto& x : xte) {
    std::uint8_t best = 0;
    double best_d = INFINITY;
    for (std::uint8_t c = 1; c <= s.gt.num_classes(); ++c) {
      std::vector<double> mean(bands.size(), 0.0);
      double n = 0;
      for (std::size_t i = 0; i < sp.train.size(); ++i)
        if (s.gt.at(sp.train[i]) == c) {
          for (std::size_t j = 0; j < bands.size(); ++j) mean[j] += xtr[i][j];
          n += 1;
        }
      if (n == 0) continue;
      for (auto& m : mean) m /= n;
      const double d = dist2(x, mean);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    out.push_back(best);
  }
  return out;
}

std::vector<std::uint8_t> oracle_knn(const Blobs& s, const std::vector<std::size_t>& bands, const Split& sp,
                                     std::size_t k) {
  const auto xtr = zscored(s.cube, bands, sp.train, sp.train);
  const auto xte = zscored(s.cube, bands, sp.train, sp.test);
  std::vector<std::uint8_t> out;
  for (const auto& x : xte) {
    std::vector<std::size_t> idx(xtr.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double da = dist2(x, xtr[a]);
      const double db = dist2(x, xtr[b]);
      return da != db ? da < db : a < b;
    });
    std::vector<std::size_t> votes(s.gt.num_classes() + 1, 0);
    for (std::size_t v = 0; v < k; ++v) ++votes[s.gt.at(sp.train[idx[v]])];
    out.push_back(static_cast<std::uint8_t>(std::max_element(votes.begin() + 1, votes.end()) - votes.begin()));
  }
  return out;
}

TEST(Split, OneClassOfTen) {
  const auto gt = single_row(std::vector<std::uint8_t>(10, 1), 1);
  const auto s = split(gt, {});
  EXPECT_EQ(s.train.size(), 5u);
  EXPECT_EQ(s.test.size(), 5u);
}

TEST(Split, RoundingPerClass) {
  // 4 * 0.5 = 2 and 6 * 0.5 = 3.
  std::vector<std::uint8_t> l(10, 2);
  std::fill(l.begin(), l.begin() + 4, 1);
  const auto gt = single_row(l, 2);
  const auto s = split(gt, {});
  std::size_t c1 = 0;
  std::size_t c2 = 0;
  for (const auto& p : s.train) (gt.at(p) == 1 ? c1 : c2)++;
  EXPECT_EQ(c1, 2u);
  EXPECT_EQ(c2, 3u);

  // 3 * 0.5 = 1.5 rounds half away from zero; 2 * 0.1 = 0.2 is lifted to 1.
  const auto gt3 = single_row({1, 1, 1}, 1);
  EXPECT_EQ(split(gt3, {}).train.size(), 2u);
  SplitSpec tiny;
  tiny.train_fraction = 0.1;
  EXPECT_EQ(split(single_row({1, 1}, 1), tiny).train.size(), 1u);
  tiny.train_fraction = 0.95;
  EXPECT_EQ(split(single_row({1, 1}, 1), tiny).test.size(), 1u);
}

TEST(Split, CoverDisjointDeterministic) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto gt = testing::random_ground_truth(rng, 12, 9, 5);
    SplitSpec spec;
    spec.seed = rng();
    spec.train_fraction = 0.2 + 0.6 * rnd::uniform01(rng);
    spec.stratified = t % 3 != 0;
    const auto a = split(gt, spec);
    const auto b = split(gt, spec);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);

    std::set<Position> all(a.train.begin(), a.train.end());
    for (const auto& p : a.test) EXPECT_TRUE(all.insert(p).second);
    std::set<Position> expected;
    for (const auto& p : labeled_mask(gt))
      if (std::find(a.excluded_classes.begin(), a.excluded_classes.end(), gt.at(p)) == a.excluded_classes.end())
        expected.insert(p);
    EXPECT_EQ(all, expected);
  }
}

TEST(Split, SeedChangesAssignment) {
  const auto gt = single_row(std::vector<std::uint8_t>(40, 1), 1);
  SplitSpec a;
  SplitSpec b;
  b.seed = a.seed + 1;
  EXPECT_NE(split(gt, a).train, split(gt, b).train);
}

TEST(Split, SingletonClassIsExcluded) {
  const auto gt = single_row({1, 1, 1, 1, 2, 0}, 2);
  const auto s = split(gt, {});
  EXPECT_EQ(s.excluded_classes, (std::vector<std::uint8_t>{2}));
  EXPECT_EQ(s.train.size() + s.test.size(), 4u);
}

TEST(Split, Errors) {
  const auto gt = single_row({1, 1}, 1);
  for (const double f : {0.0, 1.0, -0.2}) {
    SplitSpec s;
    s.train_fraction = f;
    EXPECT_THROW(split(gt, s), ConfigError);
  }
  EXPECT_THROW(split(single_row({1, 0}, 1), {}), DataError);
}

TEST(FitPredict, SeparableConstantBands) {
  const auto gt = single_row({1, 1, 1, 1, 2, 2, 2, 2}, 2);
  const HsiCube cube(1, 1, 8, {10, 10, 10, 10, 90, 90, 90, 90});
  const std::vector<std::size_t> bands{0};
  const auto r = evaluate(cube, gt, bands, {}, {});
  EXPECT_EQ(r.overall_accuracy, 1.0);
  EXPECT_EQ(r.confusion, (std::vector<std::uint64_t>{2, 0, 0, 2}));
}

TEST(FitPredict, KnnMemorizesTrainingSet) {
  const auto s = gaussian_blobs(3);
  const auto pts = labeled_mask(s.gt);
  const std::vector<std::size_t> bands{0, 1, 2};
  ClassifierConfig c;
  c.kind = ClassifierKind::kKnn;
  c.k = 1;
  const auto pred = fit_predict(s.cube, s.gt, bands, pts, pts, c);
  EXPECT_EQ(pred.labels, labels_at(s.gt, pts));
}

TEST(FitPredict, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = gaussian_blobs(seed);
    SplitSpec spec;
    spec.seed = seed + 100;
    const auto sp = split(s.gt, spec);
    for (const auto& bands : {std::vector<std::size_t>{0, 1, 2}, std::vector<std::size_t>{2, 0}}) {
      const auto nc = fit_predict(s.cube, s.gt, bands, sp.train, sp.test, {});
      EXPECT_EQ(nc.labels, oracle_nearest_centroid(s, bands, sp));
      for (const std::size_t k : {1u, 3u, 7u}) {
        ClassifierConfig c;
        c.kind = ClassifierKind::kKnn;
        c.k = k;
        EXPECT_EQ(fit_predict(s.cube, s.gt, bands, sp.train, sp.test, c).labels, oracle_knn(s, bands, sp, k));
      }
    }
    const auto report = evaluate(s.cube, s.gt, std::vector<std::size_t>{0, 1, 2}, spec, {});
    EXPECT_GT(report.overall_accuracy, 0.4);
    EXPECT_LT(report.overall_accuracy, 1.0);
  }
}

TEST(FitPredict, TiesGoToLowestLabel) {
  // The test point is equidistant from both centroids and from both neighbors.
  const GroundTruth gt(1, 3, {2, 1, 1}, 2);
  const HsiCube cube(1, 1, 3, {0, 20, 10});
  const std::vector<std::size_t> bands{0};
  const std::vector<Position> train{{0, 0}, {0, 1}};
  const std::vector<Position> test{{0, 2}};
  EXPECT_EQ(fit_predict(cube, gt, bands, train, test, {}).labels, (std::vector<std::uint8_t>{1}));
  ClassifierConfig c;
  c.kind = ClassifierKind::kKnn;
  c.k = 1;
  // Distance tie: the lower training index (label 2) wins.
  EXPECT_EQ(fit_predict(cube, gt, bands, train, test, c).labels, (std::vector<std::uint8_t>{2}));
}

TEST(FitPredict, Errors) {
  const auto gt = single_row({1, 2}, 2);
  const HsiCube cube(1, 1, 2, {1, 2});
  const std::vector<Position> train{{0, 0}, {0, 1}};
  const std::vector<std::size_t> none;
  const std::vector<std::size_t> band{0};
  EXPECT_THROW(fit_predict(cube, gt, none, train, train, {}), DataError);
  EXPECT_THROW(fit_predict(cube, gt, band, {}, train, {}), DataError);
  const std::vector<std::size_t> bad{3};
  EXPECT_THROW(fit_predict(cube, gt, bad, train, train, {}), DataError);
  ClassifierConfig even;
  even.kind = ClassifierKind::kKnn;
  even.k = 4;
  EXPECT_THROW(fit_predict(cube, gt, band, train, train, even), ConfigError);
  ClassifierConfig custom;
  custom.kind = ClassifierKind::kCustom;
  EXPECT_THROW(custom.validate(), ConfigError);
  EXPECT_THROW(parse_classifier_kind("svm"), ConfigError);
  EXPECT_EQ(parse_classifier_kind(to_string(ClassifierKind::kKnn)), ClassifierKind::kKnn);
}

TEST(FitPredict, ZeroVarianceBandIsDropped) {
  auto s = gaussian_blobs(9);
  const auto sp = split(s.gt, {});
  // Band 0 is constant on training pixels but not elsewhere.
  for (const auto& p : sp.train) s.cube.at(0, p.row, p.col) = 4321;
  const std::vector<std::size_t> with{1, 0, 2};
  const std::vector<std::size_t> without{1, 2};
  for (const bool standardize : {true, false}) {
    ClassifierConfig c;
    c.standardize = standardize;
    const auto a = fit_predict(s.cube, s.gt, with, sp.train, sp.test, c);
    const auto b = fit_predict(s.cube, s.gt, without, sp.train, sp.test, c);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.dropped_bands, (std::vector<std::size_t>{0}));
  }
  const auto r = evaluate(s.cube, s.gt, with, {}, {});
  EXPECT_EQ(r.num_bands_used, 2u);
}

class Oracle final : public Classifier {
 public:
  void fit(const FeatureMatrix&, std::span<const std::uint8_t>) override {}
  std::vector<std::uint8_t> predict(const FeatureMatrix& x) const override {
    return std::vector<std::uint8_t>(x.rows(), 1);
  }
};

TEST(FitPredict, CustomFactory) {
  const auto s = gaussian_blobs(1);
  ClassifierConfig c;
  c.kind = ClassifierKind::kCustom;
  c.factory = [] { return std::make_unique<Oracle>(); };
  const auto r = evaluate(s.cube, s.gt, std::vector<std::size_t>{0}, {}, c);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t p = 1; p < 3; ++p) EXPECT_EQ(r.confusion[t * 3 + p], 0u);
  EXPECT_EQ(r.classifier, "custom");
}

TEST(Evaluate, OneClassAndConfusionConsistency) {
  const auto one = single_row(std::vector<std::uint8_t>(8, 1), 1);
  const HsiCube cube(1, 1, 8, {1, 2, 3, 4, 5, 6, 7, 8});
  const auto r1 = evaluate(cube, one, std::vector<std::size_t>{0}, {}, {});
  EXPECT_EQ(r1.overall_accuracy, 1.0);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = gaussian_blobs(seed);
    SplitSpec spec;
    spec.seed = seed;
    const auto r = evaluate(s.cube, s.gt, std::vector<std::size_t>{0, 1, 2}, spec, {});
    std::uint64_t trace = 0;
    std::uint64_t total = 0;
    for (std::size_t t = 0; t < r.num_classes; ++t)
      for (std::size_t p = 0; p < r.num_classes; ++p) {
        total += r.confusion[t * r.num_classes + p];
        trace += t == p ? r.confusion[t * r.num_classes + p] : 0;
      }
    EXPECT_EQ(total, r.test_count);
    EXPECT_EQ(r.overall_accuracy, static_cast<double>(trace) / static_cast<double>(total));

    const auto sp = split(s.gt, spec);
    for (std::size_t c = 0; c < r.num_classes; ++c) {
      std::uint64_t row = 0;
      for (std::size_t p = 0; p < r.num_classes; ++p) row += r.confusion[c * r.num_classes + p];
      const auto n = static_cast<std::uint64_t>(std::count_if(
          sp.test.begin(), sp.test.end(), [&](const Position& q) { return s.gt.at(q) == c + 1; }));
      EXPECT_EQ(row, n);
    }

    const auto again = evaluate(s.cube, s.gt, std::vector<std::size_t>{0, 1, 2}, spec, {});
    EXPECT_EQ(again.confusion, r.confusion);
    EXPECT_EQ(again.overall_accuracy, r.overall_accuracy);
    EXPECT_EQ(again.split_seed, seed);
  }
}

TEST(ReconstructMap, ScopesAndAgreementWithReport) {
  const auto s = gaussian_blobs(4);
  const std::vector<std::size_t> bands{0, 1, 2};
  SplitSpec spec;
  spec.seed = 55;
  const auto sp = split(s.gt, spec);
  const auto report = evaluate(s.cube, s.gt, bands, spec, {});

  const auto labeled = reconstruct_map(s.cube, s.gt, bands, spec, {}, MapScope::kLabeledOnly);
  for (const auto& p : sp.train) EXPECT_EQ(labeled.at(p), s.gt.at(p));
  std::size_t agree = 0;
  for (const auto& p : sp.test) agree += labeled.at(p) == s.gt.at(p);
  EXPECT_EQ(static_cast<double>(agree) / static_cast<double>(sp.test.size()), report.overall_accuracy);
  for (std::size_t i = 0; i < s.gt.labels().size(); ++i)
    if (s.gt.labels()[i] == 0) {
      EXPECT_EQ(labeled.labels()[i], 0);
    }

  const auto full = reconstruct_map(s.cube, s.gt, bands, spec, {}, MapScope::kFullScene);
  for (const auto l : full.labels()) {
    EXPECT_GE(l, 1);
    EXPECT_LE(l, 3);
  }
}

}  // namespace
}  // namespace hsiband::classify
