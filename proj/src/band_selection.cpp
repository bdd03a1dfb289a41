#include "hsiband/band_selection.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/core.h>

#include "hsiband/error.hpp"

namespace hsiband::selection {

std::string_view to_string(MeasureKind kind) { return kind == MeasureKind::kAs ? "AS" : "U"; }

MeasureKind parse_measure(std::string_view token) {
  if (token == "as" || token == "AS") return MeasureKind::kAs;
  if (token == "u" || token == "U") return MeasureKind::kU;
  throw ConfigError(fmt::format("unknown measure '{}' (expected as or u)", token));
}

RedundancyMatrix::RedundancyMatrix(MeasureKind kind, std::vector<std::size_t> band_order, std::vector<double> cells)
    : kind_(kind), band_order_(std::move(band_order)), cells_(std::move(cells)) {
  if (cells_.size() != band_order_.size() * band_order_.size())
    throw DataError("redundancy matrix cell count does not match its band order");
}

RedundancyMatrix RedundancyMatrix::trailing_block(std::size_t first) const {
  const std::size_t n = size();
  first = std::min(first, n);
  const std::size_t m = n - first;
  std::vector<double> cells(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) cells[i * m + j] = at(first + i, first + j);
  return RedundancyMatrix(kind_, {band_order_.begin() + static_cast<std::ptrdiff_t>(first), band_order_.end()},
                          std::move(cells));
}

void SelectionConfig::validate() const {
  if (!(th_redundancy > 0.0 && th_redundancy <= 1.0))
    throw ConfigError(fmt::format("th_redundancy must be in (0, 1] (got {})", th_redundancy));
  if (!(th_relevance >= 0.0)) throw ConfigError(fmt::format("th_relevance must be >= 0 (got {})", th_relevance));
  quantization.validate();
}

std::vector<std::size_t> select_relevant(std::span<const double> mi_curve, double th_relevance) {
  std::vector<std::size_t> order(mi_curve.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mi_curve[a] < mi_curve[b]; });
  std::erase_if(order, [&](std::size_t b) { return mi_curve[b] < th_relevance; });
  return order;
}

RedundancyMatrix build_redundancy_matrix(const HsiCube& cube, std::span<const Position> positions,
                                         std::span<const std::size_t> pool, MeasureKind kind,
                                         const info::QuantizationSpec& spec) {
  spec.validate();
  const std::size_t n = pool.size();
  for (const auto b : pool)
    if (b >= cube.bands()) throw DataError(fmt::format("pool band {} out of range ({} bands)", b, cube.bands()));

  std::vector<std::vector<info::BinIndex>> bins(n);
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    bins[i] = info::quantize_band(cube, pool[i], positions, spec);
    std::vector<std::uint64_t> counts(spec.num_bins, 0);
    for (const auto v : bins[i]) ++counts[v];
    h[i] = info::entropy(info::DiscreteDistribution::marginal(std::move(counts)));
  }

  std::vector<double> cells(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cells[i * n + i] = h[i] > 0.0 ? 1.0 : 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto m = info::pair_measures(info::joint_histogram(bins[i], bins[j], spec.num_bins, spec.num_bins));
      if (kind == MeasureKind::kAs) {
        cells[i * n + j] = m.as_ab();
        cells[j * n + i] = m.as_ba();
      } else {
        cells[i * n + j] = cells[j * n + i] = m.u();
      }
    }
  }
  return RedundancyMatrix(kind, {pool.begin(), pool.end()}, std::move(cells));
}

LoopOutcome run_selection_loop(const RedundancyMatrix& d, double th_redundancy) {
  const std::size_t n = d.size();
  const auto cells = d.cells();

  // Repeated argmin with row-major tie-breaking, where every visited cell is
  // overwritten by the sentinel, visits exactly the cells below the threshold
  // in ascending (value, row-major index) order. A stable sort reproduces that
  // sequence without rescanning the matrix each iteration.
  std::vector<std::size_t> visit;
  for (std::size_t idx = 0; idx < cells.size(); ++idx)
    if (cells[idx] < th_redundancy) visit.push_back(idx);
  std::stable_sort(visit.begin(), visit.end(), [&](std::size_t a, std::size_t b) { return cells[a] < cells[b]; });

  LoopOutcome out;
  out.trace.reserve(visit.size());
  std::vector<bool> admitted(n, false);
  std::vector<std::size_t> chosen;  // matrix positions
  for (const auto idx : visit) {
    const std::size_t x = idx / n;
    const std::size_t y = idx % n;
    const bool ok = !admitted[x] && std::all_of(chosen.begin(), chosen.end(),
                                                 [&](std::size_t l) { return d.at(x, l) < th_redundancy; });
    if (ok) {
      admitted[x] = true;
      chosen.push_back(x);
      out.selected.push_back(d.band_order()[x]);
    }
    out.trace.push_back({x, y, d.band_order()[x], cells[idx], ok});
  }
  return out;
}

bool replay_admissions(const RedundancyMatrix& d, std::span<const TraceStep> trace, double th_redundancy) {
  std::vector<std::size_t> chosen;
  for (const auto& step : trace) {
    if (!step.admitted) continue;
    if (std::find(chosen.begin(), chosen.end(), step.row) != chosen.end()) return false;
    for (const auto l : chosen)
      if (!(d.at(step.row, l) < th_redundancy)) return false;
    chosen.push_back(step.row);
  }
  return true;
}

SelectionResult run_algorithm1(const HsiCube& cube, const GroundTruth& gt, const SelectionConfig& config) {
  config.validate();
  SelectionResult r;
  r.config = config;
  r.mi_curve = info::band_gt_mi_curve(cube, gt, config.quantization, config.mask);
  r.relevant_pool = select_relevant(r.mi_curve, config.th_relevance);
  const auto positions = info::evaluation_positions(gt, config.mask);
  r.matrix = build_redundancy_matrix(cube, positions, r.relevant_pool, config.measure, config.quantization);
  auto loop = run_selection_loop(r.matrix, config.th_redundancy);
  r.selected = std::move(loop.selected);
  r.trace = std::move(loop.trace);
  return r;
}

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

SweepGrid threshold_sweep(const HsiCube& cube, const GroundTruth& gt, std::vector<double> relevance_grid,
                          std::vector<double> redundancy_grid, MeasureKind measure, const SweepOptions& options) {
  if (relevance_grid.empty() || redundancy_grid.empty()) throw ConfigError("sweep grids must be non-empty");
  SweepGrid grid;
  grid.measure = measure;
  grid.total_bands = cube.bands();
  grid.relevance_grid = sorted_unique(std::move(relevance_grid));
  grid.redundancy_grid = sorted_unique(std::move(redundancy_grid));
  for (const double th : grid.relevance_grid) {
    SelectionConfig probe{th, grid.redundancy_grid.front(), measure, options.quantization, options.mask};
    probe.validate();
  }
  for (const double th : grid.redundancy_grid) {
    SelectionConfig probe{grid.relevance_grid.front(), th, measure, options.quantization, options.mask};
    probe.validate();
  }
  options.classifier.validate();

  const auto mi = info::band_gt_mi_curve(cube, gt, options.quantization, options.mask);
  const auto widest_pool = select_relevant(mi, grid.relevance_grid.front());
  const auto positions = info::evaluation_positions(gt, options.mask);
  const auto full = build_redundancy_matrix(cube, positions, widest_pool, measure, options.quantization);

  for (const double th_rel : grid.relevance_grid) {
    const auto pool = select_relevant(mi, th_rel);
    const auto block = full.trailing_block(widest_pool.size() - pool.size());
    for (const double th_red : grid.redundancy_grid) {
      SweepCell cell;
      cell.th_relevance = th_rel;
      cell.th_redundancy = th_red;
      cell.selected = run_selection_loop(block, th_red).selected;
      if (!cell.selected.empty())
        cell.accuracy =
            classify::evaluate(cube, gt, cell.selected, options.split, options.classifier).overall_accuracy;
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}

std::string_view to_string(Zone zone) {
  switch (zone) {
    case Zone::kNoAction:
      return "no_action";
    case Zone::kHardSelection:
      return "hard_selection";
    case Zone::kUseful:
      return "useful";
    case Zone::kVeryUseful:
      return "very_useful";
    case Zone::kOverControlled:
      return "over_controlled";
    case Zone::kUnderControlled:
      return "under_controlled";
  }
  return "unknown";
}

std::vector<Zone> zone_report(const SweepGrid& grid) {
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& c : grid.cells) {
    if (!c.accuracy) continue;
    lo = std::min(lo, *c.accuracy);
    hi = std::max(hi, *c.accuracy);
  }
  const double total = static_cast<double>(std::max<std::size_t>(grid.total_bands, 1));

  std::vector<Zone> zones;
  zones.reserve(grid.cells.size());
  for (const auto& c : grid.cells) {
    const std::size_t kept = c.selected.size();
    if (kept == 0) {
      zones.push_back(Zone::kHardSelection);
      continue;
    }
    if (kept >= grid.total_bands) {
      zones.push_back(Zone::kNoAction);
      continue;
    }
    const double frac = static_cast<double>(kept) / total;
    const double score = hi > lo ? (c.accuracy.value_or(lo) - lo) / (hi - lo) : 1.0;
    const bool near_best = score >= 0.9;
    if (near_best)
      zones.push_back(frac <= 0.25 ? Zone::kVeryUseful : Zone::kUseful);
    else if (frac <= 0.05)
      zones.push_back(Zone::kHardSelection);
    else
      zones.push_back(frac <= 0.5 ? Zone::kOverControlled : Zone::kUnderControlled);
  }
  return zones;
}

}  // namespace hsiband::selection
