#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tpot/persistence.hpp"

namespace tpot {

struct MatchPair {
  PersistencePoint gen;
  std::optional<PersistencePoint> target;  // nullopt = diagonal

  bool to_diagonal() const noexcept { return !target.has_value(); }
  bool operator==(const MatchPair&) const = default;
};

// Correspondence from generated points to reference points or the diagonal.
struct Matching {
  std::vector<MatchPair> pairs;  // dim 0 first, then dim 1; each in rank order
  double eps_min = 0.0;
};

// Persistence-rank matching per dimension. Essential points pair with essential
// points regardless of eps_min. Finite points with persistence <= eps_min are
// skipped on both sides; the k-th most persistent generated point takes the k-th
// most persistent reference point (ties by birth pixel, row-major), and surplus
// generated points go to the diagonal. Throws std::invalid_argument when the
// diagrams were computed for different dimensions.
Matching match(const PersistenceDiagram& gen, const PersistenceDiagram& ref, double eps_min = 0.0);

// Nearest diagonal point (m, m), m = (birth + death) / 2.
std::pair<double, double> diagonal_target(const PersistencePoint& p);

// (birth_target, death_target) for a pair.
std::pair<double, double> target_coordinates(const MatchPair& pair);

}  // namespace tpot
