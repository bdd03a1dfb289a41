#pragma once

// Hyperspectral cube and ground-truth map types, plus their file formats.
//
// Cubes are stored as a JSON header next to a raw band-sequential payload of
// 16-bit little-endian unsigned samples (all of band 0, then band 1, ...).
// Ground-truth maps are binary PGM (P5) images whose pixel values are class
// labels, 0 meaning "not labeled".
//
// Everything is row-major: sample (b, r, c) lives at b*rows*cols + r*cols + c.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace hsiband {

struct Position {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

using PixelVector = std::vector<std::uint16_t>;

class HsiCube {
 public:
  // Throws DataError unless all dimensions are >= 1 and samples.size() equals
  // bands * rows * cols.
  HsiCube(std::size_t bands, std::size_t rows, std::size_t cols, std::vector<std::uint16_t> samples);

  // Zero-filled cube.
  HsiCube(std::size_t bands, std::size_t rows, std::size_t cols);

  std::size_t bands() const { return bands_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t pixels() const { return rows_ * cols_; }

  std::uint16_t at(std::size_t band, std::size_t row, std::size_t col) const {
    return samples_[(band * rows_ + row) * cols_ + col];
  }
  std::uint16_t& at(std::size_t band, std::size_t row, std::size_t col) {
    return samples_[(band * rows_ + row) * cols_ + col];
  }

  // The whole image of one band, row-major.
  std::span<const std::uint16_t> band(std::size_t b) const;
  std::span<std::uint16_t> band(std::size_t b);

  // Values of one band at the given positions, in the order given.
  std::vector<std::uint16_t> band_values(std::size_t b, std::span<const Position> positions) const;

  PixelVector pixel(std::size_t row, std::size_t col) const;

  std::span<const std::uint16_t> samples() const { return samples_; }

  friend bool operator==(const HsiCube&, const HsiCube&) = default;

 private:
  std::size_t bands_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint16_t> samples_;
};

class GroundTruth {
 public:
  // Throws DataError if a label exceeds num_classes or no label is nonzero.
  GroundTruth(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> labels, std::size_t num_classes);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t num_classes() const { return num_classes_; }

  std::uint8_t at(std::size_t row, std::size_t col) const { return labels_[row * cols_ + col]; }
  std::uint8_t at(Position p) const { return at(p.row, p.col); }
  std::span<const std::uint8_t> labels() const { return labels_; }

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint8_t> labels_;
  std::size_t num_classes_;
};

struct CubeHeader {
  std::size_t bands = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Positions with a nonzero label, row-major.
std::vector<Position> labeled_mask(const GroundTruth& gt);

// Every position of a rows x cols frame, row-major.
std::vector<Position> all_positions(std::size_t rows, std::size_t cols);

// Labels at the given positions.
std::vector<std::uint8_t> labels_at(const GroundTruth& gt, std::span<const Position> positions);

CubeHeader parse_cube_header(std::istream& in);
HsiCube read_cube(std::istream& header, std::istream& data);
HsiCube read_cube(const std::filesystem::path& header_path, const std::filesystem::path& data_path);

void write_cube(const HsiCube& cube, std::ostream& header, std::ostream& data);
void write_cube(const HsiCube& cube, const std::filesystem::path& header_path,
                const std::filesystem::path& data_path);

// num_classes == 0 infers the class count from the largest label present.
GroundTruth read_ground_truth(std::istream& in, std::size_t num_classes);
GroundTruth read_ground_truth(const std::filesystem::path& path, std::size_t num_classes);

void write_ground_truth(const GroundTruth& gt, std::ostream& out);
void write_ground_truth(const GroundTruth& gt, const std::filesystem::path& path);

}  // namespace hsiband
