#include "hsiband/synth_scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/core.h>

#include "hsiband/error.hpp"
#include "hsiband/random.hpp"

namespace hsiband::synth {

namespace {

constexpr double kU16Max = std::numeric_limits<std::uint16_t>::max();

// Fraction of labeled pixels each disjoint-occlusion group should cover.
constexpr double kDisjointGroupShare = 0.15;

std::uint16_t clamp_u16(double v) { return static_cast<std::uint16_t>(std::clamp(v, 0.0, kU16Max)); }

SyntheticBandSpec noisy(double sigma) {
  SyntheticBandSpec s;
  s.kind = BandKind::kNoisy;
  s.noise_sigma = sigma;
  return s;
}

SyntheticBandSpec of_kind(BandKind kind) {
  SyntheticBandSpec s;
  s.kind = kind;
  return s;
}

SyntheticBandSpec occluded(std::vector<std::uint8_t> classes) {
  SyntheticBandSpec s;
  s.kind = BandKind::kOccluded;
  s.occluded_classes = std::move(classes);
  return s;
}

SyntheticBandSpec keep_only(const std::vector<std::uint8_t>& kept, std::size_t num_classes) {
  std::vector<std::uint8_t> hidden;
  for (std::size_t c = 1; c <= num_classes; ++c)
    if (std::find(kept.begin(), kept.end(), c) == kept.end()) hidden.push_back(static_cast<std::uint8_t>(c));
  return occluded(std::move(hidden));
}

}  // namespace

std::string_view to_string(BandKind kind) {
  switch (kind) {
    case BandKind::kClean:
      return "clean";
    case BandKind::kNoisy:
      return "noisy";
    case BandKind::kOccluded:
      return "occluded";
    case BandKind::kDuplicateOf:
      return "duplicate_of";
    case BandKind::kPureNoise:
      return "pure_noise";
    case BandKind::kInverted:
      return "inverted";
  }
  return "unknown";
}

BandKind parse_band_kind(std::string_view token) {
  for (const auto k : {BandKind::kClean, BandKind::kNoisy, BandKind::kOccluded, BandKind::kDuplicateOf,
                       BandKind::kPureNoise, BandKind::kInverted})
    if (to_string(k) == token) return k;
  throw ConfigError(fmt::format("unknown synthetic band kind '{}'", token));
}

void SceneRecipe::validate() const {
  if (bands.empty()) throw ConfigError("recipe needs at least one band");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto& s = bands[i];
    if (s.noise_sigma < 0.0) throw ConfigError(fmt::format("band {}: noise_sigma must be >= 0", i));
    if (s.kind == BandKind::kDuplicateOf && (!s.source_band || *s.source_band >= i))
      throw ConfigError(fmt::format("band {}: duplicate_of must reference an earlier band", i));
    if (s.kind == BandKind::kOccluded && s.occluded_classes.empty())
      throw ConfigError(fmt::format("band {}: occluded needs at least one class", i));
  }
}

std::uint16_t clean_scale(std::size_t num_classes) {
  return static_cast<std::uint16_t>(65535 / std::max<std::size_t>(num_classes, 1));
}

HsiCube generate_scene(const GroundTruth& gt, const SceneRecipe& recipe) {
  recipe.validate();
  const std::size_t n = gt.rows() * gt.cols();
  const std::uint16_t scale = clean_scale(gt.num_classes());
  const auto labels = gt.labels();
  HsiCube cube(recipe.bands.size(), gt.rows(), gt.cols());

  for (std::size_t b = 0; b < recipe.bands.size(); ++b) {
    const auto& spec = recipe.bands[b];
    auto out = cube.band(b);
    std::mt19937_64 rng(rnd::derive_seed(rnd::derive_seed(recipe.master_seed, b), spec.seed));
    switch (spec.kind) {
      case BandKind::kClean:
        for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint16_t>(labels[i] * scale);
        break;
      case BandKind::kNoisy: {
        const double sd = spec.noise_sigma * scale;
        for (std::size_t i = 0; i < n; ++i)
          out[i] = clamp_u16(labels[i] * static_cast<double>(scale) + std::round(sd * rnd::standard_normal(rng)));
        break;
      }
      case BandKind::kOccluded:
        for (std::size_t i = 0; i < n; ++i) {
          const bool hidden = std::find(spec.occluded_classes.begin(), spec.occluded_classes.end(), labels[i]) !=
                              spec.occluded_classes.end();
          out[i] = hidden ? 0 : static_cast<std::uint16_t>(labels[i] * scale);
        }
        break;
      case BandKind::kDuplicateOf: {
        const auto src = cube.band(*spec.source_band);
        std::copy(src.begin(), src.end(), out.begin());
        break;
      }
      case BandKind::kPureNoise:
        for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint16_t>(rng() >> 48);
        break;
      case BandKind::kInverted:
        for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint16_t>(65535 - labels[i] * scale);
        break;
    }
  }
  return cube;
}

SceneRecipe default_paper_recipe(const GroundTruth& gt, std::uint64_t master_seed) {
  const std::size_t c = gt.num_classes();
  if (c < 4) throw ConfigError(fmt::format("default recipe needs at least 4 classes (got {})", c));

  std::vector<std::size_t> counts(c + 1, 0);
  std::size_t labeled = 0;
  for (const auto l : gt.labels())
    if (l != 0) {
      ++counts[l];
      ++labeled;
    }
  const auto target = kDisjointGroupShare * static_cast<double>(labeled);

  // Lowest labels for one group, highest for the other, each just reaching
  // the target share of labeled pixels.
  std::vector<std::uint8_t> low;
  std::size_t acc = 0;
  for (std::size_t l = 1; l <= c && static_cast<double>(acc) < target; ++l) {
    if (counts[l] == 0) continue;
    low.push_back(static_cast<std::uint8_t>(l));
    acc += counts[l];
  }
  std::vector<std::uint8_t> high;
  acc = 0;
  for (std::size_t l = c; l >= 1 && static_cast<double>(acc) < target; --l) {
    if (counts[l] == 0) continue;
    if (std::find(low.begin(), low.end(), l) != low.end()) break;
    high.push_back(static_cast<std::uint8_t>(l));
    acc += counts[l];
  }
  if (low.empty() || high.empty() || static_cast<double>(acc) < target)
    throw ConfigError("ground truth classes too unbalanced to build disjoint occlusion groups");
  if (low.size() + high.size() >= c) throw ConfigError("disjoint occlusion groups would cover every class");

  const auto mid = static_cast<std::uint8_t>(c / 2);
  SceneRecipe r;
  r.master_seed = master_seed;
  // Two families: label-exact bands (clean, inverted, partial occlusions),
  // which are mutually redundant, and noisy bands with sigma >= 0.75 label
  // units, which share little beyond the class signal.
  r.bands = {
      of_kind(BandKind::kClean),                            // 0
      noisy(0.75),                                          // 1
      of_kind(BandKind::kPureNoise),                        // 2
      noisy(1.0),                                           // 3  duplicate source
      of_kind(BandKind::kInverted),                         // 4
      noisy(1.25),                                          // 5
      of_kind(BandKind::kPureNoise),                        // 6
      noisy(1.5),                                           // 7
      of_kind(BandKind::kPureNoise),                        // 8
      occluded({mid, static_cast<std::uint8_t>(mid + 1)}),  // 9
      noisy(2.0),                                           // 10
      noisy(1.75),                                          // 11
      noisy(0.9),                                           // 12
      occluded({1, static_cast<std::uint8_t>(c)}),          // 13
      noisy(2.5),                                           // 14
      keep_only(low, c),                                    // 15 disjoint, low classes
      of_kind(BandKind::kDuplicateOf),                      // 16 copy of 3
      keep_only(high, c),                                   // 17 disjoint, high classes
      noisy(1.1),                                           // 18
  };
  r.bands[16].source_band = 3;
  return r;
}

GroundTruth make_ground_truth_analog(std::size_t rows, std::size_t cols, std::size_t num_classes,
                                     std::uint64_t seed) {
  if (num_classes < 1 || num_classes > 255) throw ConfigError("num_classes must be in 1..255");
  auto per_axis = static_cast<std::size_t>(std::ceil(std::sqrt(4.0 * static_cast<double>(num_classes))));
  per_axis = std::min({per_axis, rows, cols});
  if (per_axis * per_axis < num_classes)
    throw ConfigError(fmt::format("a {}x{} frame is too small for {} classes", rows, cols, num_classes));

  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> tile_class(per_axis * per_axis);
  for (std::size_t t = 0; t < tile_class.size(); ++t) tile_class[t] = static_cast<std::uint8_t>(t % num_classes + 1);
  rnd::shuffle(tile_class, rng);

  std::vector<std::uint8_t> labels(rows * cols, 0);
  for (std::size_t ty = 0; ty < per_axis; ++ty) {
    const std::size_t r0 = ty * rows / per_axis;
    const std::size_t r1 = (ty + 1) * rows / per_axis;
    for (std::size_t tx = 0; tx < per_axis; ++tx) {
      const std::size_t c0 = tx * cols / per_axis;
      const std::size_t c1 = (tx + 1) * cols / per_axis;
      // Inset margins between 10% and 20% of the tile extent per side.
      const auto margin = [&](std::size_t extent) {
        const double f = 0.10 + 0.10 * rnd::uniform01(rng);
        return static_cast<std::size_t>(std::floor(f * static_cast<double>(extent)));
      };
      const std::size_t top = margin(r1 - r0);
      const std::size_t bottom = margin(r1 - r0);
      const std::size_t left = margin(c1 - c0);
      const std::size_t right = margin(c1 - c0);
      for (std::size_t r = r0 + top; r + bottom < r1; ++r)
        for (std::size_t c = c0 + left; c + right < c1; ++c) labels[r * cols + c] = tile_class[ty * per_axis + tx];
    }
  }
  return GroundTruth(rows, cols, std::move(labels), num_classes);
}

nlohmann::ordered_json to_json(const SceneRecipe& recipe) {
  nlohmann::ordered_json j;
  j["master_seed"] = recipe.master_seed;
  j["bands"] = nlohmann::ordered_json::array();
  for (const auto& s : recipe.bands) {
    nlohmann::ordered_json b;
    b["kind"] = to_string(s.kind);
    if (s.kind == BandKind::kDuplicateOf) b["source_band"] = s.source_band.value_or(0);
    if (s.kind == BandKind::kNoisy) b["noise_sigma"] = s.noise_sigma;
    if (s.kind == BandKind::kOccluded) b["occluded_classes"] = s.occluded_classes;
    b["seed"] = s.seed;
    j["bands"].push_back(std::move(b));
  }
  return j;
}

SceneRecipe recipe_from_json(const nlohmann::json& j) {
  SceneRecipe r;
  try {
    r.master_seed = j.value("master_seed", std::uint64_t{0});
    for (const auto& b : j.at("bands")) {
      SyntheticBandSpec s;
      s.kind = parse_band_kind(b.at("kind").get<std::string>());
      if (b.contains("source_band")) s.source_band = b.at("source_band").get<std::size_t>();
      s.noise_sigma = b.value("noise_sigma", 0.0);
      if (b.contains("occluded_classes")) s.occluded_classes = b.at("occluded_classes").get<std::vector<std::uint8_t>>();
      s.seed = b.value("seed", std::uint64_t{0});
      r.bands.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed recipe: {}", e.what()));
  }
  r.validate();
  return r;
}

}  // namespace hsiband::synth
