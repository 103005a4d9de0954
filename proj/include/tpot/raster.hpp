#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpot {

struct Pixel {
  std::int64_t row = 0;
  std::int64_t col = 0;

  auto operator<=>(const Pixel&) const = default;
};

// Real-valued grid with no range constraint. Used for gradients.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t width, std::size_t height, double fill = 0.0);
  Grid(std::size_t width, std::size_t height, std::vector<double> values);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }
  double& at(std::size_t row, std::size_t col) { return values_[row * width_ + col]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  Grid& operator+=(const Grid& other);
  Grid& operator*=(double s);

  bool operator==(const Grid&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> values_;
};

// A 2D likelihood map: width*height finite values in [0, 1], row-major.
// Immutable after construction.
class ScalarField {
 public:
  // Throws std::invalid_argument when the invariants do not hold.
  ScalarField(std::size_t width, std::size_t height, std::vector<double> values);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }
  double at(Pixel p) const {
    return values_[static_cast<std::size_t>(p.row) * width_ + static_cast<std::size_t>(p.col)];
  }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  Pixel pixel_of(std::size_t index) const {
    return {static_cast<std::int64_t>(index / width_), static_cast<std::int64_t>(index % width_)};
  }

  Grid to_grid() const { return Grid(width_, height_, values_); }

  bool operator==(const ScalarField&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> values_;
};

enum class FieldFormat { tpr1, pgm };

enum class ParseErrorKind { malformed_header, value_out_of_range, truncated_payload };

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& what);

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScalarField read_field(const std::filesystem::path& path, FieldFormat format);
// Picks the format from the leading magic bytes ("TPR1" or "P5").
ScalarField read_field(const std::filesystem::path& path);

ScalarField parse_tpr1(std::span<const std::uint8_t> bytes);
ScalarField parse_pgm(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_tpr1(const Grid& grid);
inline std::vector<std::uint8_t> encode_tpr1(const ScalarField& field) {
  return encode_tpr1(field.to_grid());
}
// 16-bit P5, values quantized to round(v * 65535). Lossy.
std::vector<std::uint8_t> encode_pgm(const ScalarField& field);

void write_field(const ScalarField& field, const std::filesystem::path& path);
// Gradients and other unconstrained grids. Same TPR1 layout, no range check.
void write_grid(const Grid& grid, const std::filesystem::path& path);
Grid read_grid(const std::filesystem::path& path);
void write_pgm(const ScalarField& field, const std::filesystem::path& path);

inline constexpr std::size_t kDefaultPatchSize = 65;

struct PatchLayout {
  std::size_t patch_size = kDefaultPatchSize;
  std::vector<Pixel> anchors;  // row-major sorted, unique
};

// Non-overlapping grid of anchors at multiples of patch_size; the last anchor in
// each axis is clamped to dim - patch_size so every patch keeps the full size.
// Axes shorter than patch_size get a single anchor at 0 (patch clipped).
PatchLayout tile(std::size_t width, std::size_t height, std::size_t patch_size);
inline PatchLayout tile(const ScalarField& field, std::size_t patch_size) {
  return tile(field.width(), field.height(), patch_size);
}

// Extent of a patch at anchor, clipped to the field.
struct PatchExtent {
  std::size_t width;
  std::size_t height;
};
PatchExtent patch_extent(std::size_t width, std::size_t height, Pixel anchor, std::size_t patch_size);

ScalarField extract_patch(const ScalarField& field, Pixel anchor, std::size_t patch_size);

// Adds a patch-sized grid into the full-field grid at anchor.
void scatter_add(Grid& target, const Grid& patch, Pixel anchor);

}  // namespace tpot
