#include "hsiband/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "hsiband/band_selection.hpp"
#include "hsiband/classification.hpp"
#include "hsiband/error.hpp"
#include "hsiband/hsi_core.hpp"
#include "hsiband/info_theory.hpp"
#include "hsiband/random.hpp"
#include "hsiband/report.hpp"
#include "hsiband/synth_scene.hpp"

namespace hsiband::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct DataOptions {
  std::string cube_header;
  std::string cube_data;
  std::string gt;
  std::size_t num_classes = 0;
  std::size_t bins = 256;
  std::string mask = "labeled";
  std::string out_dir = ".";
};

struct Options {
  DataOptions data;
  bool fano = false;

  // selection
  double th_relevance = 0.4;
  double th_redundancy = 0.7;
  std::string measure = "as";

  // sweep
  std::vector<double> relevance_grid{0.0, 0.4, 0.8, 1.2};
  std::vector<double> redundancy_grid{0.3, 0.5, 0.7, 0.9};

  // classification
  std::uint64_t seed = rnd::kDefaultSeed;
  std::string classifier = "nearest_centroid";
  std::size_t k = 5;
  bool no_standardize = false;
  double train_fraction = 0.5;
  std::vector<std::size_t> bands;
  std::string selection_file;
  bool full_scene = false;
  bool export_design = false;

  // synth
  std::string recipe;
  std::size_t rows = 145;
  std::size_t cols = 145;
  std::uint64_t gt_seed = rnd::kDefaultSeed;

  // fano
  double class_entropy = 0.0;
  double mi = 0.0;
};

void add_data_options(CLI::App* cmd, DataOptions& d, bool needs_cube) {
  auto* h = cmd->add_option("--cube-header", d.cube_header, "Cube JSON header");
  auto* c = cmd->add_option("--cube-data", d.cube_data, "Raw band-sequential u16-LE samples");
  if (needs_cube) {
    h->required();
    c->required();
  }
  cmd->add_option("--gt", d.gt, "Ground-truth map (binary PGM)")->required();
  cmd->add_option("--num-classes", d.num_classes, "Class count (0: largest label in the map)");
  cmd->add_option("--bins", d.bins, "Histogram bins per band")->check(CLI::Range(2, 65536));
  cmd->add_option("--mask", d.mask, "Pixels used for MI")->check(CLI::IsMember({"labeled", "all"}));
  cmd->add_option("--out-dir", d.out_dir, "Directory for result files");
}

void add_classifier_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--classifier", o.classifier)->check(CLI::IsMember({"nearest_centroid", "knn"}));
  cmd->add_option("--k", o.k, "Neighbours for knn (odd)");
  cmd->add_flag("--no-standardize", o.no_standardize, "Skip per-band z-scoring");
  cmd->add_option("--train-fraction", o.train_fraction);
  cmd->add_option("--seed", o.seed, "Split seed");
}

info::MaskMode mask_mode(const std::string& token) {
  return token == "all" ? info::MaskMode::kAll : info::MaskMode::kLabeled;
}

info::QuantizationSpec quantization(const DataOptions& d) {
  info::QuantizationSpec q;
  q.num_bins = d.bins;
  return q;
}

classify::ClassifierConfig classifier_config(const Options& o) {
  classify::ClassifierConfig c;
  c.kind = classify::parse_classifier_kind(o.classifier);
  c.k = o.k;
  c.standardize = !o.no_standardize;
  c.validate();
  return c;
}

classify::SplitSpec split_spec(const Options& o) {
  classify::SplitSpec s;
  s.train_fraction = o.train_fraction;
  s.seed = o.seed;
  s.validate();
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  out.close();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir, ec.message()));
  return fs::path(dir);
}

void write_manifest(const fs::path& dir, const std::string& command, const ordered_json& inputs,
                    const ordered_json& config) {
  ordered_json m;
  m["command"] = command;
  m["inputs"] = inputs;
  m["config"] = config;
  m["tool_version"] = kVersion;
  m["timestamp"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

ordered_json data_inputs(const DataOptions& d) {
  ordered_json j;
  if (!d.cube_header.empty()) j["cube_header"] = d.cube_header;
  if (!d.cube_data.empty()) j["cube_data"] = d.cube_data;
  j["gt"] = d.gt;
  return j;
}

ordered_json data_config(const DataOptions& d) {
  ordered_json j;
  j["num_classes"] = d.num_classes;
  j["bins"] = d.bins;
  j["mask"] = d.mask;
  return j;
}

struct Inputs {
  HsiCube cube;
  GroundTruth gt;
};

Inputs load(const DataOptions& d) {
  auto cube = read_cube(d.cube_header, d.cube_data);
  auto gt = read_ground_truth(d.gt, d.num_classes);
  if (cube.rows() != gt.rows() || cube.cols() != gt.cols())
    throw DataError(fmt::format("cube is {}x{} but ground truth is {}x{}", cube.rows(), cube.cols(), gt.rows(),
                                gt.cols()));
  return {std::move(cube), std::move(gt)};
}

int cmd_info(const Options& o, std::ostream& out) {
  const auto in = load(o.data);
  const auto mode = mask_mode(o.data.mask);
  const auto curve = info::band_gt_mi_curve(in.cube, in.gt, quantization(o.data), mode);
  std::optional<double> h_class;
  if (o.fano) {
    if (in.gt.num_classes() < 2) throw DataError("Fano bounds need at least 2 classes");
    h_class = info::class_entropy(in.gt, mode);
  }
  const auto dir = prepare_out_dir(o.data.out_dir);
  write_text(dir / "mi_curve.csv", report::mi_curve_csv(curve, h_class, in.gt.num_classes()));
  auto cfg = data_config(o.data);
  cfg["fano"] = o.fano;
  write_manifest(dir, "info", data_inputs(o.data), cfg);
  out << fmt::format("wrote {} band rows to {}\n", curve.size(), (dir / "mi_curve.csv").string());
  return kExitOk;
}

int cmd_synth(const Options& o, const CLI::App& sub, std::ostream& out) {
  const bool have_gt = !o.data.gt.empty();
  const auto gt = have_gt ? read_ground_truth(o.data.gt, o.data.num_classes)
                          : synth::make_ground_truth_analog(o.rows, o.cols, o.data.num_classes ? o.data.num_classes : 16,
                                                            o.gt_seed);
  synth::SceneRecipe recipe;
  if (!o.recipe.empty()) {
    std::ifstream f(o.recipe);
    if (!f) throw IoError(fmt::format("cannot open recipe '{}'", o.recipe));
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("malformed recipe: {}", e.what()));
    }
    recipe = synth::recipe_from_json(j);
    if (sub.count("--seed") > 0) recipe.master_seed = o.seed;
  } else {
    recipe = synth::default_paper_recipe(gt, o.seed);
  }
  const auto cube = synth::generate_scene(gt, recipe);

  const auto dir = prepare_out_dir(o.data.out_dir);
  write_cube(cube, dir / "cube.json", dir / "cube.raw");
  write_text(dir / "recipe.json", synth::to_json(recipe).dump(2) + "\n");
  write_ground_truth(gt, dir / "gt.pgm");

  ordered_json inputs;
  if (have_gt) inputs["gt"] = o.data.gt;
  if (!o.recipe.empty()) inputs["recipe"] = o.recipe;
  ordered_json cfg;
  cfg["master_seed"] = recipe.master_seed;
  cfg["num_classes"] = gt.num_classes();
  if (!have_gt) {
    cfg["rows"] = o.rows;
    cfg["cols"] = o.cols;
    cfg["gt_seed"] = o.gt_seed;
  }
  write_manifest(dir, "synth", inputs, cfg);
  out << fmt::format("wrote {}-band {}x{} cube to {}\n", cube.bands(), cube.rows(), cube.cols(), dir.string());
  return kExitOk;
}

selection::SelectionConfig selection_config(const Options& o) {
  selection::SelectionConfig c;
  c.th_relevance = o.th_relevance;
  c.th_redundancy = o.th_redundancy;
  c.measure = selection::parse_measure(o.measure);
  c.quantization = quantization(o.data);
  c.mask = mask_mode(o.data.mask);
  c.validate();
  return c;
}

int cmd_select(const Options& o, std::ostream& out, std::ostream& err) {
  const auto config = selection_config(o);
  const auto in = load(o.data);
  const auto result = selection::run_algorithm1(in.cube, in.gt, config);

  const auto dir = prepare_out_dir(o.data.out_dir);
  write_text(dir / "selection.json", report::selection_json(result).dump(2) + "\n");
  write_text(dir / "matrix.csv", report::matrix_csv(result.matrix));
  auto cfg = data_config(o.data);
  cfg["th_relevance"] = o.th_relevance;
  cfg["th_redundancy"] = o.th_redundancy;
  cfg["measure"] = selection::to_string(config.measure);
  write_manifest(dir, "select", data_inputs(o.data), cfg);

  if (result.selected.empty())
    err << fmt::format("warning: no band selected (relevant pool size {})\n", result.relevant_pool.size());
  out << fmt::format("selected {} of {} bands:", result.selected.size(), in.cube.bands());
  for (const auto b : result.selected) out << ' ' << b;
  out << '\n';
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  std::vector<selection::MeasureKind> measures;
  if (o.measure == "both")
    measures = {selection::MeasureKind::kAs, selection::MeasureKind::kU};
  else
    measures = {selection::parse_measure(o.measure)};

  selection::SweepOptions opts;
  opts.quantization = quantization(o.data);
  opts.mask = mask_mode(o.data.mask);
  opts.split = split_spec(o);
  opts.classifier = classifier_config(o);
  const auto in = load(o.data);

  const auto dir = prepare_out_dir(o.data.out_dir);
  for (const auto m : measures) {
    const auto grid = selection::threshold_sweep(in.cube, in.gt, o.relevance_grid, o.redundancy_grid, m, opts);
    const std::string name = m == selection::MeasureKind::kAs ? "sweep_as.csv" : "sweep_u.csv";
    write_text(dir / name, report::sweep_csv(grid));
    out << fmt::format("wrote {} rows to {}\n", grid.cells.size(), (dir / name).string());
  }
  auto cfg = data_config(o.data);
  cfg["measure"] = o.measure;
  cfg["relevance_grid"] = o.relevance_grid;
  cfg["redundancy_grid"] = o.redundancy_grid;
  cfg["classifier"] = o.classifier;
  cfg["k"] = o.k;
  cfg["standardize"] = !o.no_standardize;
  cfg["train_fraction"] = o.train_fraction;
  cfg["seed"] = o.seed;
  write_manifest(dir, "sweep", data_inputs(o.data), cfg);
  return kExitOk;
}

std::vector<std::size_t> bands_from_selection_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError(fmt::format("cannot open selection '{}'", path));
  try {
    nlohmann::json j;
    f >> j;
    return j.at("selected").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed selection file: {}", e.what()));
  }
}

int cmd_classify(const Options& o, std::ostream& out) {
  if (o.bands.empty() == o.selection_file.empty())
    throw ConfigError("classify needs exactly one of --bands or --selection");
  const auto config = classifier_config(o);
  const auto split = split_spec(o);
  const auto in = load(o.data);
  const auto bands = o.bands.empty() ? bands_from_selection_file(o.selection_file) : o.bands;
  if (bands.empty()) throw DataError("selection is empty; nothing to classify");

  const auto rep = classify::evaluate(in.cube, in.gt, bands, split, config);
  const auto scope = o.full_scene ? classify::MapScope::kFullScene : classify::MapScope::kLabeledOnly;
  const auto map = classify::reconstruct_map(in.cube, in.gt, bands, split, config, scope);

  const auto dir = prepare_out_dir(o.data.out_dir);
  write_text(dir / "report.json", report::eval_json(rep).dump(2) + "\n");
  write_text(dir / "confusion.csv", report::confusion_csv(rep));
  write_ground_truth(map, dir / "map.pgm");
  if (o.export_design) {
    const auto parts = classify::split(in.gt, split);
    write_text(dir / "train.csv", report::design_csv(in.cube, in.gt, bands, parts.train));
    write_text(dir / "test.csv", report::design_csv(in.cube, in.gt, bands, parts.test));
  }

  auto inputs = data_inputs(o.data);
  if (!o.selection_file.empty()) inputs["selection"] = o.selection_file;
  auto cfg = data_config(o.data);
  cfg["bands"] = bands;
  cfg["classifier"] = o.classifier;
  cfg["k"] = o.k;
  cfg["standardize"] = !o.no_standardize;
  cfg["train_fraction"] = o.train_fraction;
  cfg["seed"] = o.seed;
  cfg["full_scene"] = o.full_scene;
  write_manifest(dir, "classify", inputs, cfg);
  out << fmt::format("accuracy {:.4f} on {} test pixels with {} bands\n", rep.overall_accuracy, rep.test_count,
                     rep.num_bands_used);
  return kExitOk;
}

int cmd_fano(const Options& o, const CLI::App& sub, std::ostream& out) {
  const auto f = info::fano_bounds(o.class_entropy, o.mi, o.data.num_classes);
  std::string csv = "class_entropy,mi_bits,num_classes,conditional_entropy,fano_lower,fano_upper\n";
  csv += fmt::format("{},{},{},{},{},{}\n", report::format_number(o.class_entropy), report::format_number(o.mi),
                     f.num_classes, report::format_number(f.conditional_entropy), report::format_number(f.lower),
                     report::format_number(f.upper));
  out << csv;
  if (sub.count("--out-dir") > 0) {
    const auto dir = prepare_out_dir(o.data.out_dir);
    write_text(dir / "fano.csv", csv);
    ordered_json cfg;
    cfg["class_entropy"] = o.class_entropy;
    cfg["mi"] = o.mi;
    cfg["num_classes"] = o.data.num_classes;
    write_manifest(dir, "fano", ordered_json::object(), cfg);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mutual-information band selection for hyperspectral cubes", "hsiband"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto* info_cmd = app.add_subcommand("info", "MI of every band with the ground truth");
  add_data_options(info_cmd, o.data, true);
  info_cmd->add_flag("--fano", o.fano, "Add Fano error-bound columns");

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic cube from a ground-truth map");
  synth_cmd->add_option("--gt", o.data.gt, "Ground-truth map; omitted: generate a field-mosaic map");
  synth_cmd->add_option("--num-classes", o.data.num_classes);
  synth_cmd->add_option("--recipe", o.recipe, "Recipe JSON; omitted: the built-in 19-band recipe");
  synth_cmd->add_option("--seed", o.seed, "Recipe master seed");
  synth_cmd->add_option("--rows", o.rows)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--cols", o.cols)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--gt-seed", o.gt_seed);
  synth_cmd->add_option("--out-dir", o.data.out_dir);

  auto* select_cmd = app.add_subcommand("select", "Relevance cut plus greedy redundancy filtering");
  add_data_options(select_cmd, o.data, true);
  select_cmd->add_option("--th-relevance", o.th_relevance, "MI threshold in bits");
  select_cmd->add_option("--th-redundancy", o.th_redundancy, "Normalized-MI threshold in (0, 1]");
  select_cmd->add_option("--measure", o.measure)->check(CLI::IsMember({"as", "u", "AS", "U"}));

  auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy over a grid of threshold pairs");
  add_data_options(sweep_cmd, o.data, true);
  sweep_cmd->add_option("--relevance-grid", o.relevance_grid)->delimiter(',');
  sweep_cmd->add_option("--redundancy-grid", o.redundancy_grid)->delimiter(',');
  sweep_cmd->add_option("--measure", o.measure)->check(CLI::IsMember({"as", "u", "AS", "U", "both"}));
  add_classifier_options(sweep_cmd, o);

  auto* classify_cmd = app.add_subcommand("classify", "Evaluate a band subset and reconstruct the label map");
  add_data_options(classify_cmd, o.data, true);
  classify_cmd->add_option("--bands", o.bands, "Comma-separated band indices")->delimiter(',');
  classify_cmd->add_option("--selection", o.selection_file, "selection.json from `select`");
  classify_cmd->add_flag("--full-scene", o.full_scene, "Predict every pixel, labeled or not");
  classify_cmd->add_flag("--export-design", o.export_design, "Write train/test design matrices as CSV");
  add_classifier_options(classify_cmd, o);

  auto* fano_cmd = app.add_subcommand("fano", "Fano bounds on classification error");
  fano_cmd->add_option("--class-entropy", o.class_entropy, "H(C) in bits")->required();
  fano_cmd->add_option("--mi", o.mi, "I(C;X) in bits")->required();
  fano_cmd->add_option("--num-classes", o.data.num_classes)->required();
  fano_cmd->add_option("--out-dir", o.data.out_dir);

  std::vector<std::string> argv_store{"hsiband"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*info_cmd) return cmd_info(o, out);
    if (*synth_cmd) return cmd_synth(o, *synth_cmd, out);
    if (*select_cmd) return cmd_select(o, out, err);
    if (*sweep_cmd) return cmd_sweep(o, out);
    if (*classify_cmd) return cmd_classify(o, out);
    if (*fano_cmd) return cmd_fano(o, *fano_cmd, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace hsiband::cli
