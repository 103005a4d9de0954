#include "tpot/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace tpot {

namespace {

constexpr std::uint8_t kTpr1Magic[4] = {'T', 'P', 'R', '1'};
constexpr std::size_t kTpr1HeaderSize = 12;

std::uint32_t load_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::string at_offset(std::size_t offset, const std::string& msg) {
  std::ostringstream os;
  os << msg << " at byte offset " << offset;
  return os.str();
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

struct Tpr1Payload {
  std::size_t width;
  std::size_t height;
  std::vector<double> values;
};

Tpr1Payload decode_tpr1(std::span<const std::uint8_t> bytes, bool check_range) {
  if (bytes.size() < kTpr1HeaderSize) {
    throw ParseError(ParseErrorKind::malformed_header, bytes.size(),
                     at_offset(bytes.size(), "TPR1 header truncated"));
  }
  if (std::memcmp(bytes.data(), kTpr1Magic, 4) != 0) {
    throw ParseError(ParseErrorKind::malformed_header, 0, at_offset(0, "bad TPR1 magic"));
  }
  const std::size_t width = load_u32_le(bytes.data() + 4);
  const std::size_t height = load_u32_le(bytes.data() + 8);
  if (width == 0) {
    throw ParseError(ParseErrorKind::malformed_header, 4, at_offset(4, "TPR1 width is zero"));
  }
  if (height == 0) {
    throw ParseError(ParseErrorKind::malformed_header, 8, at_offset(8, "TPR1 height is zero"));
  }
  const std::size_t count = width * height;
  const std::size_t expected = kTpr1HeaderSize + 4 * count;
  if (bytes.size() < expected) {
    throw ParseError(
        ParseErrorKind::truncated_payload, bytes.size(),
        at_offset(bytes.size(), "TPR1 payload truncated (expected " + std::to_string(expected) + " bytes)"));
  }
  if (bytes.size() > expected) {
    throw ParseError(ParseErrorKind::malformed_header, expected,
                     at_offset(expected, "trailing bytes after TPR1 payload"));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t off = kTpr1HeaderSize + 4 * i;
    const float v = std::bit_cast<float>(load_u32_le(bytes.data() + off));
    if (!std::isfinite(v) || (check_range && (v < 0.0f || v > 1.0f))) {
      throw ParseError(ParseErrorKind::value_out_of_range, off,
                       at_offset(off, "value " + std::to_string(v) + " outside [0, 1]"));
    }
    values[i] = static_cast<double>(v);
  }
  return {width, height, std::move(values)};
}

// Header tokenizer for P5: whitespace separated, '#' comments to end of line.
class PgmHeader {
 public:
  explicit PgmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t next_number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > (1u << 30)) break;
      ++pos_;
    }
    if (pos_ == start) {
      throw ParseError(ParseErrorKind::malformed_header, start,
                       at_offset(start, std::string("expected PGM ") + what));
    }
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Grid::Grid(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), values_(width * height, fill) {}

Grid::Grid(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (values_.size() != width_ * height_) {
    throw std::invalid_argument("grid value count does not match width*height");
  }
}

Grid& Grid::operator+=(const Grid& other) {
  if (other.width_ != width_ || other.height_ != height_) {
    throw std::invalid_argument("grid dimension mismatch");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Grid& Grid::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ScalarField::ScalarField(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width_ < 1 || height_ < 1) throw std::invalid_argument("field must be at least 1x1");
  if (values_.size() != width_ * height_) {
    throw std::invalid_argument("field value count does not match width*height");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument("field value at index " + std::to_string(i) + " is outside [0, 1]");
    }
  }
}

ParseError::ParseError(ParseErrorKind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(what), kind_(kind), offset_(offset) {}

ScalarField parse_tpr1(std::span<const std::uint8_t> bytes) {
  auto p = decode_tpr1(bytes, true);
  return ScalarField(p.width, p.height, std::move(p.values));
}

ScalarField parse_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw ParseError(ParseErrorKind::malformed_header, 0, at_offset(0, "bad PGM magic (want P5)"));
  }
  PgmHeader header(bytes);
  header.advance(2);
  const std::size_t width = header.next_number("width");
  const std::size_t height = header.next_number("height");
  const std::size_t maxval_offset = header.pos();
  const std::size_t maxval = header.next_number("maxval");
  if (width == 0 || height == 0) {
    throw ParseError(ParseErrorKind::malformed_header, maxval_offset,
                     at_offset(maxval_offset, "PGM dimensions must be positive"));
  }
  if (maxval == 0 || maxval > 65535) {
    throw ParseError(ParseErrorKind::malformed_header, maxval_offset,
                     at_offset(maxval_offset, "PGM maxval must be in [1, 65535]"));
  }
  if (header.pos() >= bytes.size() || !std::isspace(bytes[header.pos()])) {
    throw ParseError(ParseErrorKind::malformed_header, header.pos(),
                     at_offset(header.pos(), "missing whitespace after PGM maxval"));
  }
  header.advance(1);
  const std::size_t data = header.pos();
  const std::size_t sample = maxval > 255 ? 2 : 1;
  const std::size_t count = width * height;
  if (bytes.size() < data + sample * count) {
    throw ParseError(ParseErrorKind::truncated_payload, bytes.size(),
                     at_offset(bytes.size(), "PGM payload truncated"));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t off = data + sample * i;
    const std::size_t raw =
        sample == 2 ? (static_cast<std::size_t>(bytes[off]) << 8) | bytes[off + 1] : bytes[off];
    if (raw > maxval) {
      throw ParseError(ParseErrorKind::value_out_of_range, off, at_offset(off, "PGM sample exceeds maxval"));
    }
    values[i] = static_cast<double>(raw) / static_cast<double>(maxval);
  }
  return ScalarField(width, height, std::move(values));
}

ScalarField read_field(const std::filesystem::path& path, FieldFormat format) {
  const auto bytes = slurp(path);
  return format == FieldFormat::tpr1 ? parse_tpr1(bytes) : parse_pgm(bytes);
}

ScalarField read_field(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return parse_pgm(bytes);
  return parse_tpr1(bytes);
}

std::vector<std::uint8_t> encode_tpr1(const Grid& grid) {
  std::vector<std::uint8_t> out(std::begin(kTpr1Magic), std::end(kTpr1Magic));
  out.reserve(kTpr1HeaderSize + 4 * grid.size());
  store_u32_le(out, static_cast<std::uint32_t>(grid.width()));
  store_u32_le(out, static_cast<std::uint32_t>(grid.height()));
  for (const double v : grid.values()) {
    store_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

std::vector<std::uint8_t> encode_pgm(const ScalarField& field) {
  const std::string header =
      "P5\n" + std::to_string(field.width()) + " " + std::to_string(field.height()) + "\n65535\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (const double v : field.values()) {
    const auto q = static_cast<std::uint32_t>(std::lround(v * 65535.0));
    out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xff));
  }
  return out;
}

void write_field(const ScalarField& field, const std::filesystem::path& path) {
  dump(path, encode_tpr1(field));
}

void write_grid(const Grid& grid, const std::filesystem::path& path) { dump(path, encode_tpr1(grid)); }

Grid read_grid(const std::filesystem::path& path) {
  auto p = decode_tpr1(slurp(path), false);
  return Grid(p.width, p.height, std::move(p.values));
}

void write_pgm(const ScalarField& field, const std::filesystem::path& path) { dump(path, encode_pgm(field)); }

PatchLayout tile(std::size_t width, std::size_t height, std::size_t patch_size) {
  if (patch_size < 2) throw std::invalid_argument("patch_size must be >= 2");
  auto axis = [patch_size](std::size_t dim) {
    std::vector<std::size_t> starts;
    if (dim <= patch_size) {
      starts.push_back(0);
      return starts;
    }
    for (std::size_t s = 0; s < dim; s += patch_size) {
      starts.push_back(std::min(s, dim - patch_size));
    }
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    return starts;
  };
  PatchLayout layout;
  layout.patch_size = patch_size;
  for (const auto r : axis(height)) {
    for (const auto c : axis(width)) {
      layout.anchors.push_back({static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)});
    }
  }
  return layout;
}

PatchExtent patch_extent(std::size_t width, std::size_t height, Pixel anchor, std::size_t patch_size) {
  if (anchor.row < 0 || anchor.col < 0 || static_cast<std::size_t>(anchor.row) >= height ||
      static_cast<std::size_t>(anchor.col) >= width) {
    throw std::out_of_range("patch anchor (" + std::to_string(anchor.row) + ", " +
                            std::to_string(anchor.col) + ") outside field");
  }
  return {std::min(patch_size, width - static_cast<std::size_t>(anchor.col)),
          std::min(patch_size, height - static_cast<std::size_t>(anchor.row))};
}

ScalarField extract_patch(const ScalarField& field, Pixel anchor, std::size_t patch_size) {
  const auto ext = patch_extent(field.width(), field.height(), anchor, patch_size);
  std::vector<double> values;
  values.reserve(ext.width * ext.height);
  for (std::size_t r = 0; r < ext.height; ++r) {
    const auto row = static_cast<std::size_t>(anchor.row) + r;
    for (std::size_t c = 0; c < ext.width; ++c) {
      values.push_back(field.at(row, static_cast<std::size_t>(anchor.col) + c));
    }
  }
  return ScalarField(ext.width, ext.height, std::move(values));
}

void scatter_add(Grid& target, const Grid& patch, Pixel anchor) {
  const auto r0 = static_cast<std::size_t>(anchor.row);
  const auto c0 = static_cast<std::size_t>(anchor.col);
  if (r0 + patch.height() > target.height() || c0 + patch.width() > target.width()) {
    throw std::out_of_range("patch does not fit inside target grid");
  }
  for (std::size_t r = 0; r < patch.height(); ++r) {
    for (std::size_t c = 0; c < patch.width(); ++c) target.at(r0 + r, c0 + c) += patch.at(r, c);
  }
}

}  // namespace tpot
