#include "hsiband/report.hpp"

#include <cmath>

#include <fmt/format.h>

namespace hsiband::report {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

std::string mi_curve_csv(std::span<const double> mi_curve, std::optional<double> class_entropy,
                         std::size_t num_classes) {
  std::string out = "band,mi_bits";
  if (class_entropy) out += ",class_entropy,conditional_entropy,fano_lower,fano_upper";
  out += '\n';
  for (std::size_t b = 0; b < mi_curve.size(); ++b) {
    out += fmt::format("{},{}", b, format_number(mi_curve[b]));
    if (class_entropy) {
      // Histogram MI of a band can exceed the label entropy only by round-off.
      const double mi = std::min(mi_curve[b], *class_entropy);
      const auto f = info::fano_bounds(*class_entropy, mi, num_classes);
      out += fmt::format(",{},{},{},{}", format_number(f.class_entropy), format_number(f.conditional_entropy),
                         format_number(f.lower), format_number(f.upper));
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json selection_json(const selection::SelectionResult& r) {
  nlohmann::ordered_json j;
  j["measure"] = selection::to_string(r.config.measure);
  j["th_relevance"] = r.config.th_relevance;
  j["th_redundancy"] = r.config.th_redundancy;
  j["bins"] = r.config.quantization.num_bins;
  j["mask"] = r.config.mask == info::MaskMode::kLabeled ? "labeled" : "all";
  j["selected"] = r.selected;
  j["relevant_pool"] = r.relevant_pool;
  j["mi_curve"] = r.mi_curve;
  auto trace = nlohmann::ordered_json::array();
  for (const auto& s : r.trace) {
    nlohmann::ordered_json t;
    t["x"] = s.row;
    t["y"] = s.col;
    t["band"] = s.band;
    t["d"] = s.value;
    t["admitted"] = s.admitted;
    trace.push_back(std::move(t));
  }
  j["trace"] = std::move(trace);
  return j;
}

std::string matrix_csv(const selection::RedundancyMatrix& d) {
  std::string out = "band";
  for (const auto b : d.band_order()) out += fmt::format(",{}", b);
  out += '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += fmt::format("{}", d.band_order()[i]);
    for (std::size_t j = 0; j < d.size(); ++j) out += "," + format_number(d.at(i, j));
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const selection::SweepGrid& grid) {
  const auto zones = selection::zone_report(grid);
  std::string out = "th_relevance,th_redundancy,num_bands,accuracy,zone\n";
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const auto& c = grid.cells[i];
    out += fmt::format("{},{},{},{},{}\n", format_number(c.th_relevance), format_number(c.th_redundancy),
                       c.selected.size(), c.accuracy ? format_number(*c.accuracy) : "",
                       selection::to_string(zones[i]));
  }
  return out;
}

nlohmann::ordered_json eval_json(const classify::EvalReport& r) {
  nlohmann::ordered_json j;
  j["classifier"] = r.classifier;
  j["overall_accuracy"] = r.overall_accuracy;
  auto per_class = nlohmann::ordered_json::array();
  for (const auto& a : r.per_class_accuracy) per_class.push_back(a ? nlohmann::ordered_json(*a) : nullptr);
  j["per_class_accuracy"] = std::move(per_class);
  j["num_classes"] = r.num_classes;
  j["num_bands_used"] = r.num_bands_used;
  j["selected"] = r.selected;
  j["dropped_bands"] = r.dropped_bands;
  j["excluded_classes"] = r.excluded_classes;
  j["train_count"] = r.train_count;
  j["test_count"] = r.test_count;
  j["split_seed"] = r.split_seed;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < r.num_classes; ++t) {
    std::vector<std::uint64_t> row(r.confusion.begin() + static_cast<std::ptrdiff_t>(t * r.num_classes),
                                   r.confusion.begin() + static_cast<std::ptrdiff_t>((t + 1) * r.num_classes));
    rows.push_back(row);
  }
  j["confusion"] = std::move(rows);
  return j;
}

std::string confusion_csv(const classify::EvalReport& r) {
  std::string out = "truth";
  for (std::size_t p = 1; p <= r.num_classes; ++p) out += fmt::format(",pred_{}", p);
  out += '\n';
  for (std::size_t t = 0; t < r.num_classes; ++t) {
    out += fmt::format("{}", t + 1);
    for (std::size_t p = 0; p < r.num_classes; ++p) out += fmt::format(",{}", r.confusion[t * r.num_classes + p]);
    out += '\n';
  }
  return out;
}

std::string design_csv(const HsiCube& cube, const GroundTruth& gt, std::span<const std::size_t> bands,
                       std::span<const Position> positions) {
  std::string out = "row,col,label";
  for (const auto b : bands) out += fmt::format(",band_{}", b);
  out += '\n';
  for (const auto& p : positions) {
    out += fmt::format("{},{},{}", p.row, p.col, gt.at(p));
    for (const auto b : bands) out += fmt::format(",{}", cube.at(b, p.row, p.col));
    out += '\n';
  }
  return out;
}

}  // namespace hsiband::report
