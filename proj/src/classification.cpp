#include "hsiband/classification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/core.h>

#include "hsiband/error.hpp"

namespace hsiband::classify {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

void require_fit_shape(const FeatureMatrix& x, std::span<const std::uint8_t> y) {
  if (x.rows() == 0) throw DataError("cannot fit a classifier on an empty training set");
  if (x.rows() != y.size()) throw DataError("training matrix and label vector differ in length");
}

std::uint8_t majority(std::span<const std::uint8_t> votes) {
  std::map<std::uint8_t, std::size_t> tally;
  for (const auto v : votes) ++tally[v];
  std::uint8_t best = 0;
  std::size_t best_count = 0;
  // std::map iterates ascending, so strict > keeps the lowest label on ties.
  for (const auto& [label, count] : tally) {
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError(fmt::format("train_fraction must be in (0, 1) (got {})", train_fraction));
}

Split split(const GroundTruth& gt, const SplitSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  Split out;

  const auto take = [&](std::vector<Position> members) {
    const std::size_t n = members.size();
    auto n_train = static_cast<std::size_t>(std::lround(static_cast<double>(n) * spec.train_fraction));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    rnd::shuffle(members, rng);
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  };

  if (spec.stratified) {
    std::vector<std::vector<Position>> by_class(gt.num_classes() + 1);
    for (const auto& p : labeled_mask(gt)) by_class[gt.at(p)].push_back(p);
    for (std::size_t c = 1; c < by_class.size(); ++c) {
      if (by_class[c].empty()) continue;
      if (by_class[c].size() < 2) {
        out.excluded_classes.push_back(static_cast<std::uint8_t>(c));
        continue;
      }
      take(std::move(by_class[c]));
    }
  } else {
    auto labeled = labeled_mask(gt);
    if (labeled.size() < 2) throw DataError("need at least 2 labeled pixels to split");
    take(std::move(labeled));
  }
  if (out.train.empty()) throw DataError("split produced an empty training set");
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

FeatureMatrix design_matrix(const HsiCube& cube, std::span<const std::size_t> bands,
                            std::span<const Position> positions) {
  FeatureMatrix x(positions.size(), bands.size());
  for (std::size_t j = 0; j < bands.size(); ++j) {
    if (bands[j] >= cube.bands()) throw DataError(fmt::format("band {} out of range", bands[j]));
    const auto image = cube.band(bands[j]);
    for (std::size_t i = 0; i < positions.size(); ++i)
      x.at(i, j) = image[positions[i].row * cube.cols() + positions[i].col];
  }
  return x;
}

void NearestCentroid::fit(const FeatureMatrix& x, std::span<const std::uint8_t> y) {
  require_fit_shape(x, y);
  classes_.assign(y.begin(), y.end());
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());

  centroids_ = FeatureMatrix(classes_.size(), x.cols());
  std::vector<std::size_t> counts(classes_.size(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto k = static_cast<std::size_t>(std::lower_bound(classes_.begin(), classes_.end(), y[i]) - classes_.begin());
    ++counts[k];
    for (std::size_t j = 0; j < x.cols(); ++j) centroids_.at(k, j) += x.at(i, j);
  }
  for (std::size_t k = 0; k < classes_.size(); ++k)
    for (std::size_t j = 0; j < x.cols(); ++j) centroids_.at(k, j) /= static_cast<double>(counts[k]);
}

std::vector<std::uint8_t> NearestCentroid::predict(const FeatureMatrix& x) const {
  if (classes_.empty()) throw DataError("classifier used before fit");
  std::vector<std::uint8_t> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < classes_.size(); ++k) {
      const double d = squared_distance(x.row(i), centroids_.row(k));
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    out[i] = classes_[best_k];
  }
  return out;
}

void KNearestNeighbors::fit(const FeatureMatrix& x, std::span<const std::uint8_t> y) {
  require_fit_shape(x, y);
  train_ = x;
  labels_.assign(y.begin(), y.end());
}

std::vector<std::uint8_t> KNearestNeighbors::predict(const FeatureMatrix& x) const {
  if (labels_.empty()) throw DataError("classifier used before fit");
  const std::size_t k = std::min(k_, train_.rows());
  std::vector<std::uint8_t> out(x.rows());
  std::vector<std::pair<double, std::size_t>> dist(train_.rows());
  std::vector<std::uint8_t> votes(k);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t t = 0; t < train_.rows(); ++t) dist[t] = {squared_distance(x.row(i), train_.row(t)), t};
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t v = 0; v < k; ++v) votes[v] = labels_[dist[v].second];
    out[i] = majority(votes);
  }
  return out;
}

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kNearestCentroid:
      return "nearest_centroid";
    case ClassifierKind::kKnn:
      return "knn";
    case ClassifierKind::kCustom:
      return "custom";
  }
  return "unknown";
}

ClassifierKind parse_classifier_kind(std::string_view token) {
  if (token == "nearest_centroid") return ClassifierKind::kNearestCentroid;
  if (token == "knn") return ClassifierKind::kKnn;
  throw ConfigError(fmt::format("unknown classifier '{}' (expected nearest_centroid or knn)", token));
}

void ClassifierConfig::validate() const {
  if (kind == ClassifierKind::kKnn && (k == 0 || k % 2 == 0))
    throw ConfigError(fmt::format("knn needs an odd k >= 1 (got {})", k));
  if (kind == ClassifierKind::kCustom && !factory) throw ConfigError("custom classifier requires a factory");
}

std::unique_ptr<Classifier> ClassifierConfig::make() const {
  validate();
  switch (kind) {
    case ClassifierKind::kNearestCentroid:
      return std::make_unique<NearestCentroid>();
    case ClassifierKind::kKnn:
      return std::make_unique<KNearestNeighbors>(k);
    case ClassifierKind::kCustom:
      return factory();
  }
  throw ConfigError("unknown classifier kind");
}

Standardizer Standardizer::fit(const FeatureMatrix& train, bool standardize) {
  Standardizer s;
  const double n = static_cast<double>(train.rows());
  for (std::size_t j = 0; j < train.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < train.rows(); ++i) mean += train.at(i, j);
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < train.rows(); ++i) {
      const double d = train.at(i, j) - mean;
      var += d * d;
    }
    var /= n;
    if (var <= 0.0) {
      s.dropped_.push_back(j);
      continue;
    }
    s.kept_.push_back(j);
    s.mean_.push_back(standardize ? mean : 0.0);
    s.scale_.push_back(standardize ? 1.0 / std::sqrt(var) : 1.0);
  }
  return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& x) const {
  FeatureMatrix out(x.rows(), kept_.size());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < kept_.size(); ++j) out.at(i, j) = (x.at(i, kept_[j]) - mean_[j]) * scale_[j];
  return out;
}

Prediction fit_predict(const HsiCube& cube, const GroundTruth& gt, std::span<const std::size_t> selected,
                       std::span<const Position> train, std::span<const Position> test,
                       const ClassifierConfig& config) {
  if (selected.empty()) throw DataError("no bands selected for classification");
  if (train.empty()) throw DataError("empty training set");
  if (cube.rows() != gt.rows() || cube.cols() != gt.cols())
    throw DataError("cube and ground truth dimensions differ");

  const auto x_train = design_matrix(cube, selected, train);
  const auto scaler = Standardizer::fit(x_train, config.standardize);
  const auto y_train = labels_at(gt, train);

  auto model = config.make();
  model->fit(scaler.apply(x_train), y_train);

  Prediction p;
  p.labels = model->predict(scaler.apply(design_matrix(cube, selected, test)));
  for (const auto j : scaler.dropped_columns()) p.dropped_bands.push_back(selected[j]);
  return p;
}

EvalReport evaluate(const HsiCube& cube, const GroundTruth& gt, std::span<const std::size_t> selected,
                    const SplitSpec& split_spec, const ClassifierConfig& config) {
  const auto parts = split(gt, split_spec);
  if (parts.test.empty()) throw DataError("split produced an empty test set");
  const auto pred = fit_predict(cube, gt, selected, parts.train, parts.test, config);

  EvalReport r;
  r.num_classes = gt.num_classes();
  r.confusion.assign(r.num_classes * r.num_classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < parts.test.size(); ++i) {
    const std::size_t truth = gt.at(parts.test[i]);
    const std::size_t guess = pred.labels[i];
    ++r.confusion[(truth - 1) * r.num_classes + (guess - 1)];
    correct += truth == guess ? 1 : 0;
  }
  r.overall_accuracy = static_cast<double>(correct) / static_cast<double>(parts.test.size());
  r.per_class_accuracy.resize(r.num_classes);
  for (std::size_t c = 0; c < r.num_classes; ++c) {
    std::uint64_t row = 0;
    for (std::size_t j = 0; j < r.num_classes; ++j) row += r.confusion[c * r.num_classes + j];
    if (row > 0)
      r.per_class_accuracy[c] = static_cast<double>(r.confusion[c * r.num_classes + c]) / static_cast<double>(row);
  }
  r.selected.assign(selected.begin(), selected.end());
  r.dropped_bands = pred.dropped_bands;
  r.num_bands_used = selected.size() - pred.dropped_bands.size();
  r.excluded_classes = parts.excluded_classes;
  r.train_count = parts.train.size();
  r.test_count = parts.test.size();
  r.split_seed = split_spec.seed;
  r.classifier = std::string(to_string(config.kind));
  return r;
}

GroundTruth reconstruct_map(const HsiCube& cube, const GroundTruth& gt, std::span<const std::size_t> selected,
                            const SplitSpec& split_spec, const ClassifierConfig& config, MapScope scope) {
  const auto parts = split(gt, split_spec);
  std::vector<std::uint8_t> labels(gt.rows() * gt.cols(), 0);

  std::vector<Position> targets;
  if (scope == MapScope::kFullScene) {
    targets = all_positions(gt.rows(), gt.cols());
  } else {
    for (const auto& p : labeled_mask(gt))
      if (!std::binary_search(parts.train.begin(), parts.train.end(), p)) targets.push_back(p);
    for (const auto& p : parts.train) labels[p.row * gt.cols() + p.col] = gt.at(p);
  }
  const auto pred = fit_predict(cube, gt, selected, parts.train, targets, config);
  for (std::size_t i = 0; i < targets.size(); ++i) labels[targets[i].row * gt.cols() + targets[i].col] = pred.labels[i];
  return GroundTruth(gt.rows(), gt.cols(), std::move(labels), gt.num_classes());
}

}  // namespace hsiband::classify
