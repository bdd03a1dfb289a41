#pragma once

// Histogram estimators for entropy, mutual information, the two normalized
// redundancy measures, and Fano's bounds on classification error.
//
// All logarithms are base 2, so every quantity is in bits.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hsiband/hsi_core.hpp"

namespace hsiband::info {

// Round-off tolerance used when clamping MI and conditional entropy.
inline constexpr double kEpsilon = 1e-12;

using BinIndex = std::uint32_t;

// Count table over the product of two discrete alphabets. A marginal is a
// table with bins_b == 1.
class DiscreteDistribution {
 public:
  // Throws DataError if counts.size() != bins_a * bins_b or the counts sum to 0.
  DiscreteDistribution(std::size_t bins_a, std::size_t bins_b, std::vector<std::uint64_t> counts);

  static DiscreteDistribution marginal(std::vector<std::uint64_t> counts);

  std::size_t bins_a() const { return bins_a_; }
  std::size_t bins_b() const { return bins_b_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t count(std::size_t a, std::size_t b) const { return counts_[a * bins_b_ + b]; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  DiscreteDistribution marginal_a() const;
  DiscreteDistribution marginal_b() const;
  DiscreteDistribution transposed() const;

 private:
  std::size_t bins_a_;
  std::size_t bins_b_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_;
};

struct QuantizationSpec {
  std::size_t num_bins = 256;
  // When unset, the band's own min/max over the evaluation positions is used.
  std::optional<std::int64_t> min;
  std::optional<std::int64_t> max;

  void validate() const;
};

enum class MaskMode { kLabeled, kAll };

struct FanoBounds {
  double lower = 0.0;
  double upper = 0.0;
  double conditional_entropy = 0.0;
  double class_entropy = 0.0;
  std::size_t num_classes = 0;
};

enum class Direction { kA, kB };

// Linear min-max binning: bin = floor((s - min) * B / (max - min + 1)),
// clamped to [0, B-1].
std::vector<BinIndex> quantize(std::span<const std::uint16_t> samples, const QuantizationSpec& spec);

std::vector<BinIndex> quantize_band(const HsiCube& cube, std::size_t band, std::span<const Position> mask,
                                    const QuantizationSpec& spec);

DiscreteDistribution joint_histogram(std::span<const BinIndex> xs, std::span<const BinIndex> ys,
                                     std::size_t bins_x, std::size_t bins_y);

// Shannon entropy of the whole table (joint entropy when bins_b > 1).
double entropy(const DiscreteDistribution& dist);

double mutual_information(const DiscreteDistribution& dist);

// H(C|X) = H(C) - I(C;X), clamped at 0. Throws ConfigError if mi exceeds
// class_entropy by more than kEpsilon.
double conditional_entropy(double class_entropy, double mi);

// Throws ConfigError when num_classes < 2.
FanoBounds fano_bounds(double class_entropy, double mi, std::size_t num_classes);

// MI(A,B)/H(A) (or /H(B) for Direction::kB). Zero when that entropy is zero.
double normalized_mi_as(const DiscreteDistribution& dist, Direction direction = Direction::kA);

// MI(A,B)/sqrt(H(A)H(B)). Zero when either entropy is zero.
double normalized_mi_u(const DiscreteDistribution& dist);

// Everything derivable from one joint table, computed once.
struct PairMeasures {
  double h_a = 0.0;
  double h_b = 0.0;
  double mi = 0.0;

  double as_ab() const { return h_a > 0.0 ? mi / h_a : 0.0; }
  double as_ba() const { return h_b > 0.0 ? mi / h_b : 0.0; }
  double u() const;
};

PairMeasures pair_measures(const DiscreteDistribution& dist);

// MI (bits) between each quantized band and the class labels. With
// MaskMode::kLabeled only labeled pixels are used; with kAll the whole frame
// is used and label 0 counts as its own symbol.
std::vector<double> band_gt_mi_curve(const HsiCube& cube, const GroundTruth& gt, const QuantizationSpec& spec,
                                     MaskMode mode = MaskMode::kLabeled);

// Entropy of the label variable over the same population band_gt_mi_curve uses.
double class_entropy(const GroundTruth& gt, MaskMode mode = MaskMode::kLabeled);

std::vector<Position> evaluation_positions(const GroundTruth& gt, MaskMode mode);

}  // namespace hsiband::info
