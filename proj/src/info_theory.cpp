#include "hsiband/info_theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "hsiband/error.hpp"

namespace hsiband::info {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// -sum p log2 p over a count vector with known total.
template <typename Counts>
double entropy_of_counts(const Counts& counts, std::uint64_t total) {
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

std::vector<std::uint64_t> row_sums(const DiscreteDistribution& d) {
  std::vector<std::uint64_t> out(d.bins_a(), 0);
  for (std::size_t a = 0; a < d.bins_a(); ++a)
    for (std::size_t b = 0; b < d.bins_b(); ++b) out[a] += d.count(a, b);
  return out;
}

std::vector<std::uint64_t> col_sums(const DiscreteDistribution& d) {
  std::vector<std::uint64_t> out(d.bins_b(), 0);
  for (std::size_t a = 0; a < d.bins_a(); ++a)
    for (std::size_t b = 0; b < d.bins_b(); ++b) out[b] += d.count(a, b);
  return out;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::size_t bins_a, std::size_t bins_b, std::vector<std::uint64_t> counts)
    : bins_a_(bins_a), bins_b_(bins_b), counts_(std::move(counts)) {
  if (bins_a_ == 0 || bins_b_ == 0) throw DataError("distribution needs at least one bin per axis");
  if (counts_.size() != bins_a_ * bins_b_)
    throw DataError(fmt::format("distribution has {} cells, expected {}", counts_.size(), bins_a_ * bins_b_));
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  if (total_ == 0) throw DataError("distribution total must be >= 1");
}

DiscreteDistribution DiscreteDistribution::marginal(std::vector<std::uint64_t> counts) {
  const std::size_t n = counts.size();
  return DiscreteDistribution(n, 1, std::move(counts));
}

DiscreteDistribution DiscreteDistribution::marginal_a() const { return marginal(row_sums(*this)); }

DiscreteDistribution DiscreteDistribution::marginal_b() const { return marginal(col_sums(*this)); }

DiscreteDistribution DiscreteDistribution::transposed() const {
  std::vector<std::uint64_t> t(counts_.size());
  for (std::size_t a = 0; a < bins_a_; ++a)
    for (std::size_t b = 0; b < bins_b_; ++b) t[b * bins_a_ + a] = count(a, b);
  return DiscreteDistribution(bins_b_, bins_a_, std::move(t));
}

void QuantizationSpec::validate() const {
  if (num_bins < 2) throw ConfigError(fmt::format("num_bins must be >= 2 (got {})", num_bins));
  if (min && max && *max < *min) throw ConfigError("quantization max must be >= min");
}

std::vector<BinIndex> quantize(std::span<const std::uint16_t> samples, const QuantizationSpec& spec) {
  spec.validate();
  if (samples.empty()) throw DataError("cannot quantize an empty sample set");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const std::int64_t lo = spec.min.value_or(*lo_it);
  const std::int64_t hi = spec.max.value_or(*hi_it);
  if (hi < lo) throw ConfigError("quantization max must be >= min");
  const auto bins = static_cast<std::int64_t>(spec.num_bins);
  const std::int64_t width = hi - lo + 1;

  std::vector<BinIndex> out;
  out.reserve(samples.size());
  for (const auto s : samples) {
    const std::int64_t offset = std::clamp<std::int64_t>(s - lo, 0, width - 1);
    out.push_back(static_cast<BinIndex>(std::min(offset * bins / width, bins - 1)));
  }
  return out;
}

std::vector<BinIndex> quantize_band(const HsiCube& cube, std::size_t band, std::span<const Position> mask,
                                    const QuantizationSpec& spec) {
  if (band >= cube.bands()) throw DataError(fmt::format("band {} out of range ({} bands)", band, cube.bands()));
  if (mask.empty()) throw DataError("quantize_band: empty mask");
  return quantize(cube.band_values(band, mask), spec);
}

DiscreteDistribution joint_histogram(std::span<const BinIndex> xs, std::span<const BinIndex> ys,
                                     std::size_t bins_x, std::size_t bins_y) {
  if (xs.size() != ys.size())
    throw DataError(fmt::format("joint_histogram: length mismatch ({} vs {})", xs.size(), ys.size()));
  if (xs.empty()) throw DataError("joint_histogram: empty input");
  std::vector<std::uint64_t> counts(bins_x * bins_y, 0);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] >= bins_x || ys[k] >= bins_y) throw DataError("joint_histogram: bin index out of range");
    ++counts[xs[k] * bins_y + ys[k]];
  }
  return DiscreteDistribution(bins_x, bins_y, std::move(counts));
}

double entropy(const DiscreteDistribution& dist) { return entropy_of_counts(dist.counts(), dist.total()); }

double mutual_information(const DiscreteDistribution& dist) {
  const auto rows = row_sums(dist);
  const auto cols = col_sums(dist);
  const double n = static_cast<double>(dist.total());
  double mi = 0.0;
  for (std::size_t a = 0; a < dist.bins_a(); ++a) {
    if (rows[a] == 0) continue;
    for (std::size_t b = 0; b < dist.bins_b(); ++b) {
      const auto c = dist.count(a, b);
      if (c == 0) continue;
      const double joint = static_cast<double>(c);
      mi += joint / n * std::log2(joint * n / (static_cast<double>(rows[a]) * static_cast<double>(cols[b])));
    }
  }
  // Round-off can leave tiny negatives for independent variables.
  return std::max(mi, 0.0);
}

double conditional_entropy(double class_entropy, double mi) {
  if (mi > class_entropy + kEpsilon)
    throw ConfigError(fmt::format("mutual information {} exceeds class entropy {}", mi, class_entropy));
  return std::max(0.0, class_entropy - mi);
}

FanoBounds fano_bounds(double class_entropy, double mi, std::size_t num_classes) {
  if (num_classes < 2) throw ConfigError("Fano bounds need at least 2 classes");
  FanoBounds f;
  f.class_entropy = class_entropy;
  f.num_classes = num_classes;
  f.conditional_entropy = conditional_entropy(class_entropy, mi);
  const double log_nc = std::log2(static_cast<double>(num_classes));
  f.lower = clamp01((f.conditional_entropy - 1.0) / log_nc);
  f.upper = clamp01(f.conditional_entropy / log_nc);
  return f;
}

double PairMeasures::u() const {
  const double denom = std::sqrt(h_a * h_b);
  return denom > 0.0 ? mi / denom : 0.0;
}

PairMeasures pair_measures(const DiscreteDistribution& dist) {
  PairMeasures m;
  m.h_a = entropy_of_counts(row_sums(dist), dist.total());
  m.h_b = entropy_of_counts(col_sums(dist), dist.total());
  m.mi = mutual_information(dist);
  return m;
}

double normalized_mi_as(const DiscreteDistribution& dist, Direction direction) {
  const auto m = pair_measures(dist);
  return direction == Direction::kA ? m.as_ab() : m.as_ba();
}

double normalized_mi_u(const DiscreteDistribution& dist) {
  // Evaluate on a canonical orientation so U(A,B) and U(B,A) take the same
  // floating-point path and agree bit for bit.
  const auto t = dist.transposed();
  const auto before = [](const DiscreteDistribution& x, const DiscreteDistribution& y) {
    if (x.bins_a() != y.bins_a()) return x.bins_a() < y.bins_a();
    return std::lexicographical_compare(x.counts().begin(), x.counts().end(), y.counts().begin(), y.counts().end());
  };
  const bool use_t = before(t, dist);
  return pair_measures(use_t ? t : dist).u();
}

std::vector<Position> evaluation_positions(const GroundTruth& gt, MaskMode mode) {
  return mode == MaskMode::kLabeled ? labeled_mask(gt) : all_positions(gt.rows(), gt.cols());
}

double class_entropy(const GroundTruth& gt, MaskMode mode) {
  const auto positions = evaluation_positions(gt, mode);
  std::vector<std::uint64_t> counts(gt.num_classes() + 1, 0);
  for (const auto& p : positions) ++counts[gt.at(p)];
  return entropy_of_counts(counts, positions.size());
}

std::vector<double> band_gt_mi_curve(const HsiCube& cube, const GroundTruth& gt, const QuantizationSpec& spec,
                                     MaskMode mode) {
  if (cube.rows() != gt.rows() || cube.cols() != gt.cols())
    throw DataError(fmt::format("cube is {}x{} but ground truth is {}x{}", cube.rows(), cube.cols(), gt.rows(),
                                gt.cols()));
  const auto positions = evaluation_positions(gt, mode);
  std::vector<BinIndex> labels;
  labels.reserve(positions.size());
  for (const auto& p : positions) labels.push_back(gt.at(p));

  std::vector<double> curve(cube.bands());
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    const auto bins = quantize_band(cube, b, positions, spec);
    curve[b] = mutual_information(joint_histogram(bins, labels, spec.num_bins, gt.num_classes() + 1));
  }
  return curve;
}

}  // namespace hsiband::info
