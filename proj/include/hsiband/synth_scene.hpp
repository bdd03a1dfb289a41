#pragma once

// Synthetic band families derived from a ground-truth map. A recipe lists one
// spec per output band; every band is a deterministic function of the map and
// a seed derived from the recipe's master seed and the band position.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hsiband/hsi_core.hpp"

namespace hsiband::synth {

enum class BandKind { kClean, kNoisy, kOccluded, kDuplicateOf, kPureNoise, kInverted };

std::string_view to_string(BandKind kind);
BandKind parse_band_kind(std::string_view token);

struct SyntheticBandSpec {
  BandKind kind = BandKind::kClean;
  std::optional<std::size_t> source_band;      // kDuplicateOf
  double noise_sigma = 0.0;                    // kNoisy, in label units
  std::vector<std::uint8_t> occluded_classes;  // kOccluded: classes zeroed out
  std::uint64_t seed = 0;
};

struct SceneRecipe {
  std::vector<SyntheticBandSpec> bands;
  std::uint64_t master_seed = 0;

  // Throws ConfigError on an empty recipe, a forward or missing duplicate
  // reference, an empty occlusion set, or a negative sigma.
  void validate() const;
};

// floor(65535 / C): spacing between adjacent class levels in a clean band.
std::uint16_t clean_scale(std::size_t num_classes);

HsiCube generate_scene(const GroundTruth& gt, const SceneRecipe& recipe);

// Band positions (0-based) that play fixed roles in default_paper_recipe.
struct PaperRecipeRoles {
  std::vector<std::size_t> pure_noise{2, 6, 8};
  std::size_t duplicate_source = 3;
  std::size_t duplicate_copy = 16;
  std::size_t disjoint_low = 15;
  std::size_t disjoint_high = 17;
};

// A 19-band scene: three pure-noise bands, one duplicate pair, one pair of
// occlusions keeping disjoint class groups, and assorted clean, noisy,
// inverted and partially occluded bands. Throws ConfigError when the map has
// fewer than 4 classes or the disjoint class groups cannot be formed.
SceneRecipe default_paper_recipe(const GroundTruth& gt, std::uint64_t master_seed = 0);

// A field-mosaic label map loosely shaped like an agricultural scene: the frame
// is tiled, each tile is assigned a class, and an inset rectangle of each tile
// is labeled, leaving roughly half the frame unlabeled.
GroundTruth make_ground_truth_analog(std::size_t rows, std::size_t cols, std::size_t num_classes,
                                     std::uint64_t seed);

nlohmann::ordered_json to_json(const SceneRecipe& recipe);
SceneRecipe recipe_from_json(const nlohmann::json& j);

}  // namespace hsiband::synth
