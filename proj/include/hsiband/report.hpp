#pragma once

// Text serializations of pipeline results. CSV output always has a header
// row, '.' decimals, LF line endings, and shortest round-trip number
// formatting, so identical inputs give byte-identical files.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsiband/band_selection.hpp"
#include "hsiband/classification.hpp"
#include "hsiband/info_theory.hpp"

namespace hsiband::report {

std::string format_number(double v);

// band,mi_bits[,class_entropy,conditional_entropy,fano_lower,fano_upper]
std::string mi_curve_csv(std::span<const double> mi_curve, std::optional<double> class_entropy,
                         std::size_t num_classes);

nlohmann::ordered_json selection_json(const selection::SelectionResult& result);

// First column is the original band index of the row; header lists column bands.
std::string matrix_csv(const selection::RedundancyMatrix& d);

// th_relevance,th_redundancy,num_bands,accuracy,zone
std::string sweep_csv(const selection::SweepGrid& grid);

nlohmann::ordered_json eval_json(const classify::EvalReport& report);

// truth,pred_1,...,pred_C
std::string confusion_csv(const classify::EvalReport& report);

// row,col,label,band_<b>...
std::string design_csv(const HsiCube& cube, const GroundTruth& gt, std::span<const std::size_t> bands,
                       std::span<const Position> positions);

}  // namespace hsiband::report
