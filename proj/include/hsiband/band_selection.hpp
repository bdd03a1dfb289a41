#pragma once

// Relevance/redundancy band selection.
//
// Bands are ranked by MI with the ground truth and cut at a relevance
// threshold. The survivors (ascending MI) index a square matrix D of pairwise
// normalized MI. The selection loop repeatedly takes the smallest unvisited
// cell (x, y) of D while it is below the redundancy threshold, admits band x
// if D(x, l) is below the threshold for every band l already admitted, and
// then retires the cell by overwriting it with a sentinel.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hsiband/classification.hpp"
#include "hsiband/hsi_core.hpp"
#include "hsiband/info_theory.hpp"

namespace hsiband::selection {

enum class MeasureKind { kAs, kU };

std::string_view to_string(MeasureKind kind);
MeasureKind parse_measure(std::string_view token);

// Marks a retired cell; larger than any normalized MI.
inline constexpr double kSentinel = 2.0;

class RedundancyMatrix {
 public:
  RedundancyMatrix() = default;
  RedundancyMatrix(MeasureKind kind, std::vector<std::size_t> band_order, std::vector<double> cells);

  std::size_t size() const { return band_order_.size(); }
  MeasureKind kind() const { return kind_; }
  // Original band index of each row/column, ascending MI with the ground truth.
  const std::vector<std::size_t>& band_order() const { return band_order_; }
  double at(std::size_t i, std::size_t j) const { return cells_[i * size() + j]; }
  std::span<const double> cells() const { return cells_; }

  // The block for rows/columns [first, size()). Because relevance pools are
  // MI-ascending, raising the relevance threshold keeps exactly such a suffix.
  RedundancyMatrix trailing_block(std::size_t first) const;

 private:
  MeasureKind kind_ = MeasureKind::kAs;
  std::vector<std::size_t> band_order_;
  std::vector<double> cells_;
};

struct SelectionConfig {
  double th_relevance = 0.0;   // bits
  double th_redundancy = 0.7;  // in (0, 1]
  MeasureKind measure = MeasureKind::kAs;
  info::QuantizationSpec quantization;
  info::MaskMode mask = info::MaskMode::kLabeled;

  void validate() const;
};

struct TraceStep {
  std::size_t row = 0;   // x, matrix position
  std::size_t col = 0;   // y, matrix position
  std::size_t band = 0;  // original band index of x
  double value = 0.0;    // D(x, y) when visited
  bool admitted = false;
};

struct SelectionResult {
  SelectionConfig config;
  std::vector<std::size_t> selected;  // admission order
  std::vector<std::size_t> relevant_pool;
  std::vector<double> mi_curve;
  std::vector<TraceStep> trace;
  RedundancyMatrix matrix;  // D before any cell was retired
};

// Bands with MI >= th_relevance, MI-ascending, ties by band index.
std::vector<std::size_t> select_relevant(std::span<const double> mi_curve, double th_relevance);

// D(i, j) = AS(band_i, band_j) = MI/H(band_i), or U(band_i, band_j), over
// the given positions. The diagonal is 1 (0 for a constant band).
RedundancyMatrix build_redundancy_matrix(const HsiCube& cube, std::span<const Position> positions,
                                         std::span<const std::size_t> pool, MeasureKind kind,
                                         const info::QuantizationSpec& spec);

struct LoopOutcome {
  std::vector<std::size_t> selected;  // original band indices, admission order
  std::vector<TraceStep> trace;
};

LoopOutcome run_selection_loop(const RedundancyMatrix& d, double th_redundancy);

SelectionResult run_algorithm1(const HsiCube& cube, const GroundTruth& gt, const SelectionConfig& config);

// Re-checks every admission in the trace against the original matrix.
bool replay_admissions(const RedundancyMatrix& d, std::span<const TraceStep> trace, double th_redundancy);

struct SweepCell {
  double th_relevance = 0.0;
  double th_redundancy = 0.0;
  std::vector<std::size_t> selected;
  std::optional<double> accuracy;  // empty when nothing was selected
};

struct SweepGrid {
  MeasureKind measure = MeasureKind::kAs;
  std::size_t total_bands = 0;
  std::vector<double> relevance_grid;   // ascending
  std::vector<double> redundancy_grid;  // ascending
  std::vector<SweepCell> cells;         // relevance-major
};

struct SweepOptions {
  info::QuantizationSpec quantization;
  info::MaskMode mask = info::MaskMode::kLabeled;
  classify::SplitSpec split;
  classify::ClassifierConfig classifier;
};

SweepGrid threshold_sweep(const HsiCube& cube, const GroundTruth& gt, std::vector<double> relevance_grid,
                          std::vector<double> redundancy_grid, MeasureKind measure, const SweepOptions& options);

enum class Zone { kNoAction, kHardSelection, kUseful, kVeryUseful, kOverControlled, kUnderControlled };

std::string_view to_string(Zone zone);

// Descriptive labels for each sweep cell, computed from the band count and
// accuracy relative to the grid's best and worst accuracy:
//   every band kept                       -> no action
//   nothing kept, or <= 5% of bands with
//   below-near-best accuracy              -> hard selection
//   near-best accuracy, <= 25% of bands   -> very useful
//   near-best accuracy                    -> useful
//   below near-best, <= 50% of bands      -> over-controlled
//   below near-best, > 50% of bands       -> under-controlled
// "Near best" means within 10% of the grid's accuracy range from the top.
std::vector<Zone> zone_report(const SweepGrid& grid);

}  // namespace hsiband::selection
