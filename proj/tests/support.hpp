#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "tpot/persistence.hpp"
#include "tpot/raster.hpp"

namespace tpot::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

inline ScalarField random_field(std::size_t w, std::size_t h, std::uint64_t seed, double lo = 0.0,
                                double hi = 1.0) {
  Rng rng(seed);
  std::vector<double> v(w * h);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return ScalarField(w, h, std::move(v));
}

// Assigns jittered lattice levels to pixels in the given rank order (rank 0 gets the
// highest level). Adjacent levels stay at least 0.4 / n apart inside [margin, 1 - margin].
inline ScalarField lattice_field(std::size_t w, std::size_t h, const std::vector<std::size_t>& order,
                                 Rng& rng, double margin) {
  const std::size_t n = w * h;
  const double span = 1.0 - 2.0 * margin;
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double level =
        (static_cast<double>(n - 1 - k) + 0.5 + rng.uniform(-0.3, 0.3)) / static_cast<double>(n);
    v[order[k]] = margin + span * level;
  }
  return ScalarField(w, h, std::move(v));
}

// Distinct values in a uniformly random order.
inline ScalarField distinct_field(std::size_t w, std::size_t h, std::uint64_t seed, double margin = 0.0) {
  Rng rng(seed);
  std::vector<std::size_t> order(w * h);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return lattice_field(w, h, order, rng, margin);
}

// Distinct values ordered like a sum of a few random Gaussian bumps, so the field has
// few critical points but no ties.
inline ScalarField bumpy_field(std::size_t w, std::size_t h, std::uint64_t seed, int bumps, double margin) {
  Rng rng(seed);
  std::vector<double> s(w * h, 0.0);
  for (int b = 0; b < bumps; ++b) {
    const double cy = rng.uniform(0.0, static_cast<double>(h));
    const double cx = rng.uniform(0.0, static_cast<double>(w));
    const double sigma = rng.uniform(2.0, 6.0);
    const double amp = rng.uniform(0.3, 1.0);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const double dy = static_cast<double>(r) - cy;
        const double dx = static_cast<double>(c) - cx;
        s[r * w + c] += amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      }
    }
  }
  std::vector<std::size_t> order(w * h);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return lattice_field(w, h, order, rng, margin);
}

inline double min_gap(const ScalarField& f) {
  std::vector<double> v(f.values().begin(), f.values().end());
  std::sort(v.begin(), v.end());
  double gap = INFINITY;
  for (std::size_t i = 1; i < v.size(); ++i) gap = std::min(gap, v[i] - v[i - 1]);
  return gap;
}

// Smallest persistence difference between two points of the same dimension.
inline double min_persistence_gap(const PersistenceDiagram& d) {
  double gap = INFINITY;
  for (int dim = 0; dim < 2; ++dim) {
    auto pts = d.of_dim(dim);
    std::vector<double> p;
    for (const auto& q : pts) p.push_back(q.persistence());
    std::sort(p.begin(), p.end());
    for (std::size_t i = 1; i < p.size(); ++i) gap = std::min(gap, p[i] - p[i - 1]);
  }
  return gap;
}

// 5x5, value `ring` on the 8 pixels around (2, 2), `inside` at the centre, `outside` elsewhere.
inline ScalarField ring5(double ring = 1.0, double inside = 0.0, double outside = 0.0) {
  std::vector<double> v(25, outside);
  for (std::size_t r = 1; r <= 3; ++r) {
    for (std::size_t c = 1; c <= 3; ++c) v[r * 5 + c] = ring;
  }
  v[2 * 5 + 2] = inside;
  return ScalarField(5, 5, std::move(v));
}

// 5x9: a 0.9 ring around a 0.1 centre at (2,2) and a 0.6 ring around a 0.4 centre at (2,6).
inline ScalarField two_rings() {
  std::vector<double> v(45, 0.0);
  auto put_ring = [&](std::size_t cc, double ring, double inside) {
    for (std::size_t r = 1; r <= 3; ++r) {
      for (std::size_t c = cc - 1; c <= cc + 1; ++c) v[r * 9 + c] = ring;
    }
    v[2 * 9 + cc] = inside;
  };
  put_ring(2, 0.9, 0.1);
  put_ring(6, 0.6, 0.4);
  return ScalarField(9, 5, std::move(v));
}

// 5x9 with only the left ring, 1.0 around a 0.0 centre.
inline ScalarField left_ring() {
  std::vector<double> v(45, 0.0);
  for (std::size_t r = 1; r <= 3; ++r) {
    for (std::size_t c = 1; c <= 3; ++c) v[r * 9 + c] = 1.0;
  }
  v[2 * 9 + 2] = 0.0;
  return ScalarField(9, 5, std::move(v));
}

inline ScalarField constant(std::size_t w, std::size_t h, double value) {
  return ScalarField(w, h, std::vector<double>(w * h, value));
}

}  // namespace tpot::testing
