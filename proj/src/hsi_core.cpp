#include "hsiband/hsi_core.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>

#include <fmt/core.h>
#include <json.hpp>

#include "hsiband/error.hpp"

namespace hsiband {

namespace {

constexpr const char* kDtype = "u16";
constexpr const char* kByteOrder = "le";

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n' && ch != '\r') ch = in.get();
    } else if (std::isspace(ch)) {
      if (!token.empty()) return token;
    } else {
      token.push_back(static_cast<char>(ch));
    }
    ch = in.get();
  }
  return token;
}

std::size_t pgm_number(std::istream& in, const char* what) {
  const std::string token = pgm_token(in);
  if (token.empty() || !std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw DataError(fmt::format("PGM header: bad {} '{}'", what, token));
  return std::stoul(token);
}

}  // namespace

HsiCube::HsiCube(std::size_t bands, std::size_t rows, std::size_t cols, std::vector<std::uint16_t> samples)
    : bands_(bands), rows_(rows), cols_(cols), samples_(std::move(samples)) {
  if (bands_ == 0 || rows_ == 0 || cols_ == 0)
    throw DataError(fmt::format("cube dimensions must be >= 1 (got {}x{}x{})", bands_, rows_, cols_));
  if (samples_.size() != bands_ * rows_ * cols_)
    throw DataError(fmt::format("cube has {} samples, expected {}", samples_.size(), bands_ * rows_ * cols_));
}

HsiCube::HsiCube(std::size_t bands, std::size_t rows, std::size_t cols)
    : HsiCube(bands, rows, cols, std::vector<std::uint16_t>(bands * rows * cols, 0)) {}

std::span<const std::uint16_t> HsiCube::band(std::size_t b) const {
  return std::span<const std::uint16_t>(samples_).subspan(b * pixels(), pixels());
}

std::span<std::uint16_t> HsiCube::band(std::size_t b) {
  return std::span<std::uint16_t>(samples_).subspan(b * pixels(), pixels());
}

std::vector<std::uint16_t> HsiCube::band_values(std::size_t b, std::span<const Position> positions) const {
  const auto image = band(b);
  std::vector<std::uint16_t> out;
  out.reserve(positions.size());
  for (const auto& p : positions) out.push_back(image[p.row * cols_ + p.col]);
  return out;
}

PixelVector HsiCube::pixel(std::size_t row, std::size_t col) const {
  PixelVector v(bands_);
  for (std::size_t b = 0; b < bands_; ++b) v[b] = at(b, row, col);
  return v;
}

GroundTruth::GroundTruth(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> labels,
                         std::size_t num_classes)
    : rows_(rows), cols_(cols), labels_(std::move(labels)), num_classes_(num_classes) {
  if (rows_ == 0 || cols_ == 0) throw DataError("ground truth dimensions must be >= 1");
  if (labels_.size() != rows_ * cols_)
    throw DataError(fmt::format("ground truth has {} labels, expected {}", labels_.size(), rows_ * cols_));
  if (num_classes_ > 255) throw DataError("at most 255 classes are supported");
  bool any = false;
  for (const auto l : labels_) {
    if (l > num_classes_) throw DataError(fmt::format("label {} exceeds num_classes {}", l, num_classes_));
    any = any || l != 0;
  }
  if (!any) throw DataError("ground truth has no labeled pixels");
}

std::vector<Position> labeled_mask(const GroundTruth& gt) {
  std::vector<Position> out;
  for (std::size_t r = 0; r < gt.rows(); ++r)
    for (std::size_t c = 0; c < gt.cols(); ++c)
      if (gt.at(r, c) != 0) out.push_back({r, c});
  return out;
}

std::vector<Position> all_positions(std::size_t rows, std::size_t cols) {
  std::vector<Position> out;
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out.push_back({r, c});
  return out;
}

std::vector<std::uint8_t> labels_at(const GroundTruth& gt, std::span<const Position> positions) {
  std::vector<std::uint8_t> out;
  out.reserve(positions.size());
  for (const auto& p : positions) out.push_back(gt.at(p));
  return out;
}

CubeHeader parse_cube_header(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed cube header: {}", e.what()));
  }
  CubeHeader h;
  try {
    h.bands = j.at("bands").get<std::size_t>();
    h.rows = j.at("rows").get<std::size_t>();
    h.cols = j.at("cols").get<std::size_t>();
    const auto dtype = j.at("dtype").get<std::string>();
    const auto order = j.at("byte_order").get<std::string>();
    if (dtype != kDtype) throw DataError(fmt::format("unsupported dtype '{}' (expected '{}')", dtype, kDtype));
    if (order != kByteOrder)
      throw DataError(fmt::format("unsupported byte_order '{}' (expected '{}')", order, kByteOrder));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed cube header: {}", e.what()));
  }
  if (h.bands == 0 || h.rows == 0 || h.cols == 0) throw DataError("cube header dimensions must be >= 1");
  return h;
}

HsiCube read_cube(std::istream& header, std::istream& data) {
  const CubeHeader h = parse_cube_header(header);
  const std::size_t count = h.bands * h.rows * h.cols;
  std::vector<char> bytes((std::istreambuf_iterator<char>(data)), std::istreambuf_iterator<char>());
  if (bytes.size() != 2 * count)
    throw DataError(fmt::format("cube data has {} bytes, header implies {}", bytes.size(), 2 * count));
  std::vector<std::uint16_t> samples(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto lo = static_cast<unsigned char>(bytes[2 * i]);
    const auto hi = static_cast<unsigned char>(bytes[2 * i + 1]);
    samples[i] = static_cast<std::uint16_t>(lo | (hi << 8));
  }
  return HsiCube(h.bands, h.rows, h.cols, std::move(samples));
}

HsiCube read_cube(const std::filesystem::path& header_path, const std::filesystem::path& data_path) {
  auto header = open_in(header_path);
  auto data = open_in(data_path);
  return read_cube(header, data);
}

void write_cube(const HsiCube& cube, std::ostream& header, std::ostream& data) {
  nlohmann::ordered_json j;
  j["bands"] = cube.bands();
  j["rows"] = cube.rows();
  j["cols"] = cube.cols();
  j["dtype"] = kDtype;
  j["byte_order"] = kByteOrder;
  header << j.dump(2) << '\n';

  const auto samples = cube.samples();
  std::vector<char> bytes(2 * samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    bytes[2 * i] = static_cast<char>(samples[i] & 0xFF);
    bytes[2 * i + 1] = static_cast<char>(samples[i] >> 8);
  }
  data.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!header || !data) throw IoError("failed writing cube");
}

void write_cube(const HsiCube& cube, const std::filesystem::path& header_path,
                const std::filesystem::path& data_path) {
  auto header = open_out(header_path);
  auto data = open_out(data_path);
  write_cube(cube, header, data);
  header.close();
  data.close();
  if (!header || !data) throw IoError(fmt::format("failed writing cube to '{}'", data_path.string()));
}

GroundTruth read_ground_truth(std::istream& in, std::size_t num_classes) {
  std::array<char, 2> magic{};
  in.read(magic.data(), 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') throw DataError("ground truth is not a binary PGM (P5)");
  const std::size_t cols = pgm_number(in, "width");
  const std::size_t rows = pgm_number(in, "height");
  const std::size_t maxval = pgm_number(in, "maxval");
  if (maxval == 0 || maxval > 255) throw DataError(fmt::format("PGM maxval {} unsupported (need 1..255)", maxval));
  // pgm_number consumed the single whitespace byte that ends the header.
  std::vector<std::uint8_t> labels(rows * cols);
  in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
  if (static_cast<std::size_t>(in.gcount()) != labels.size())
    throw DataError(fmt::format("PGM pixel data truncated: {} of {} bytes", in.gcount(), labels.size()));
  if (num_classes == 0) num_classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
  return GroundTruth(rows, cols, std::move(labels), num_classes);
}

GroundTruth read_ground_truth(const std::filesystem::path& path, std::size_t num_classes) {
  auto in = open_in(path);
  return read_ground_truth(in, num_classes);
}

void write_ground_truth(const GroundTruth& gt, std::ostream& out) {
  out << "P5\n" << gt.cols() << ' ' << gt.rows() << "\n255\n";
  const auto labels = gt.labels();
  out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
  if (!out) throw IoError("failed writing ground truth");
}

void write_ground_truth(const GroundTruth& gt, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_ground_truth(gt, out);
  out.close();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace hsiband
