#pragma once

// Train/test evaluation of a band subset: stratified splitting, two built-in
// distance classifiers behind a small virtual interface, accuracy reports, and
// label-map reconstruction.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsiband/hsi_core.hpp"
#include "hsiband/random.hpp"

namespace hsiband::classify {

struct SplitSpec {
  double train_fraction = 0.5;
  std::uint64_t seed = rnd::kDefaultSeed;
  bool stratified = true;

  void validate() const;
};

struct Split {
  std::vector<Position> train;  // row-major
  std::vector<Position> test;   // row-major
  // Classes with fewer than 2 samples under stratification; their pixels are
  // in neither set.
  std::vector<std::uint8_t> excluded_classes;
};

Split split(const GroundTruth& gt, const SplitSpec& spec);

// Dense row-major matrix of pixel feature vectors.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return std::span<const double>(data_).subspan(r * cols_, cols_); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

FeatureMatrix design_matrix(const HsiCube& cube, std::span<const std::size_t> bands,
                            std::span<const Position> positions);

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(const FeatureMatrix& x, std::span<const std::uint8_t> y) = 0;
  virtual std::vector<std::uint8_t> predict(const FeatureMatrix& x) const = 0;
};

// Predicts the class whose training mean is closest in Euclidean distance;
// ties go to the lowest label.
class NearestCentroid final : public Classifier {
 public:
  void fit(const FeatureMatrix& x, std::span<const std::uint8_t> y) override;
  std::vector<std::uint8_t> predict(const FeatureMatrix& x) const override;

 private:
  std::vector<std::uint8_t> classes_;
  FeatureMatrix centroids_;
};

// Majority vote among the k nearest training rows. Distance ties go to the
// lower training index, vote ties to the lowest label.
class KNearestNeighbors final : public Classifier {
 public:
  explicit KNearestNeighbors(std::size_t k) : k_(k) {}
  void fit(const FeatureMatrix& x, std::span<const std::uint8_t> y) override;
  std::vector<std::uint8_t> predict(const FeatureMatrix& x) const override;

 private:
  std::size_t k_;
  FeatureMatrix train_;
  std::vector<std::uint8_t> labels_;
};

enum class ClassifierKind { kNearestCentroid, kKnn, kCustom };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view token);

using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::kNearestCentroid;
  std::size_t k = 5;
  // Per-band z-score using training statistics.
  bool standardize = true;
  // Used when kind == kCustom.
  ClassifierFactory factory;

  void validate() const;
  std::unique_ptr<Classifier> make() const;
};

// Training-set feature scaling. Bands with zero training variance are always
// dropped, whether or not z-scoring is enabled.
class Standardizer {
 public:
  static Standardizer fit(const FeatureMatrix& train, bool standardize);
  FeatureMatrix apply(const FeatureMatrix& x) const;
  const std::vector<std::size_t>& kept_columns() const { return kept_; }
  const std::vector<std::size_t>& dropped_columns() const { return dropped_; }

 private:
  std::vector<std::size_t> kept_;
  std::vector<std::size_t> dropped_;
  std::vector<double> mean_;
  std::vector<double> scale_;
};

struct Prediction {
  std::vector<std::uint8_t> labels;
  // Band identifiers removed for zero training variance.
  std::vector<std::size_t> dropped_bands;
};

Prediction fit_predict(const HsiCube& cube, const GroundTruth& gt, std::span<const std::size_t> selected,
                       std::span<const Position> train, std::span<const Position> test,
                       const ClassifierConfig& config);

struct EvalReport {
  double overall_accuracy = 0.0;
  // Indexed by label - 1; empty when a class has no test pixels.
  std::vector<std::optional<double>> per_class_accuracy;
  // confusion[(truth - 1) * C + (predicted - 1)]
  std::vector<std::uint64_t> confusion;
  std::size_t num_classes = 0;
  std::size_t num_bands_used = 0;
  std::vector<std::size_t> selected;
  std::vector<std::size_t> dropped_bands;
  std::vector<std::uint8_t> excluded_classes;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::uint64_t split_seed = 0;
  std::string classifier;
};

EvalReport evaluate(const HsiCube& cube, const GroundTruth& gt, std::span<const std::size_t> selected,
                    const SplitSpec& split_spec, const ClassifierConfig& config);

enum class MapScope { kLabeledOnly, kFullScene };

// kLabeledOnly: training pixels keep their true label, other labeled pixels
// are predicted, unlabeled stay 0. kFullScene: every pixel is predicted.
GroundTruth reconstruct_map(const HsiCube& cube, const GroundTruth& gt, std::span<const std::size_t> selected,
                            const SplitSpec& split_spec, const ClassifierConfig& config, MapScope scope);

}  // namespace hsiband::classify
