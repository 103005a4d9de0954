#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "tpot/demo.hpp"

namespace tpot {

namespace {

// mt19937_64 with a fixed 53-bit uniform recipe.
class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Sparse additive speckle: each pixel with probability `density` gains U(lo, hi).
void add_speckle(std::vector<double>& values, SceneRng& rng, double density, double lo, double hi) {
  for (auto& v : values) {
    const double roll = rng.uniform();
    const double amp = rng.uniform(lo, hi);
    if (roll < density) v += amp;
  }
}

ScalarField finish(std::size_t n, std::vector<double> values) {
  for (auto& v : values) v = clamp01(v);
  return ScalarField(n, n, std::move(values));
}

Scene broken_ring(std::size_t n, std::uint64_t seed) {
  SceneRng rng(seed);
  const double centre = 0.5 * static_cast<double>(n - 1);
  const double radius = 0.3 * static_cast<double>(n);
  const double gap_angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
  constexpr double kGapHalfWidth = 0.25;  // radians
  constexpr double kGapLevel = 0.3;       // relative ring intensity inside the gap

  std::vector<double> ref(n * n);
  std::vector<double> deg(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double dy = static_cast<double>(r) - centre;
      const double dx = static_cast<double>(c) - centre;
      const double d = std::abs(std::hypot(dx, dy) - radius);
      const double profile = clamp01((2.5 - d) / 1.5);
      double off = std::atan2(dy, dx) - gap_angle;
      off = std::remainder(off, 2.0 * std::numbers::pi);
      ref[r * n + c] = profile;
      deg[r * n + c] = std::abs(off) < kGapHalfWidth ? kGapLevel * profile : profile;
    }
  }
  add_speckle(deg, rng, 0.015, 0.03, 0.12);
  return {SceneKind::broken_ring, n, seed, finish(n, std::move(deg)), finish(n, std::move(ref))};
}

Scene two_blobs(std::size_t n, std::uint64_t seed) {
  SceneRng rng(seed);
  const double s = static_cast<double>(n);
  const double sigma = 0.06 * s;
  auto jitter = [&] { return rng.uniform(-0.05, 0.05) * s; };
  const double ay = 0.3 * s + jitter(), ax = 0.3 * s + jitter();
  const double by = 0.7 * s + jitter(), bx = 0.7 * s + jitter();
  const double cy = 0.3 * s + jitter(), cx = 0.7 * s + jitter();
  auto blob = [sigma](double y, double x, double py, double px) {
    const double d2 = (y - py) * (y - py) + (x - px) * (x - px);
    return std::exp(-d2 / (2.0 * sigma * sigma));
  };

  std::vector<double> ref(n * n);
  std::vector<double> deg(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double y = static_cast<double>(r);
      const double x = static_cast<double>(c);
      const double pair = std::max(blob(y, x, ay, ax), blob(y, x, by, bx));
      ref[r * n + c] = pair;
      deg[r * n + c] = std::max(pair, 0.6 * blob(y, x, cy, cx));
    }
  }
  add_speckle(deg, rng, 0.03, 0.02, 0.1);
  return {SceneKind::two_blobs, n, seed, finish(n, std::move(deg)), finish(n, std::move(ref))};
}

Scene noisy_vessel(std::size_t n, std::uint64_t seed) {
  SceneRng rng(seed);
  std::vector<double> ref(n * n, 0.0);
  std::vector<std::size_t> path_rows;
  std::size_t row = n / 2;
  for (std::size_t c = 2; c + 2 < n; ++c) {
    const double u = rng.uniform();
    if (u < 0.3 && row > 4) --row;
    if (u > 0.7 && row + 5 < n) ++row;
    const std::size_t prev = path_rows.empty() ? row : path_rows.back();
    path_rows.push_back(row);
    for (std::size_t r = std::min(row, prev) - 1; r <= std::max(row, prev) + 1; ++r) {
      ref[r * n + c] = std::max(ref[r * n + c], 0.45);
    }
    ref[row * n + c] = 1.0;
    ref[prev * n + c] = 1.0;  // 4-connected bridge at row steps
  }

  std::vector<double> deg = ref;
  constexpr std::size_t kBreaks = 3;
  constexpr std::size_t kBreakLength = 4;
  for (std::size_t b = 0; b < kBreaks; ++b) {
    const auto span = static_cast<double>(path_rows.size() - kBreakLength);
    const auto start = static_cast<std::size_t>(rng.uniform() * span);
    for (std::size_t k = start; k < start + kBreakLength; ++k) {
      const std::size_t c = k + 2;
      for (std::size_t r = path_rows[k] - 1; r <= path_rows[k] + 1; ++r) deg[r * n + c] *= 0.25;
    }
  }
  for (auto& v : deg) v += rng.uniform(0.0, 0.15);
  return {SceneKind::noisy_vessel, n, seed, finish(n, std::move(deg)), finish(n, std::move(ref))};
}

}  // namespace

SceneKind parse_scene(const std::string& name) {
  if (name == "broken-ring") return SceneKind::broken_ring;
  if (name == "two-blobs") return SceneKind::two_blobs;
  if (name == "noisy-vessel") return SceneKind::noisy_vessel;
  throw std::invalid_argument("unknown scene '" + name +
                              "' (expected broken-ring, two-blobs or noisy-vessel)");
}

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::broken_ring:
      return "broken-ring";
    case SceneKind::two_blobs:
      return "two-blobs";
    case SceneKind::noisy_vessel:
      return "noisy-vessel";
  }
  return "unknown";
}

Scene generate_scene(SceneKind kind, std::size_t size, std::uint64_t seed) {
  if (size < 32) throw std::invalid_argument("scene size must be >= 32");
  switch (kind) {
    case SceneKind::broken_ring:
      return broken_ring(size, seed);
    case SceneKind::two_blobs:
      return two_blobs(size, seed);
    case SceneKind::noisy_vessel:
      return noisy_vessel(size, seed);
  }
  throw std::invalid_argument("unknown scene kind");
}

}  // namespace tpot
