#include "tpot/matching.hpp"

#include <algorithm>
#include <stdexcept>

namespace tpot {

namespace {

bool rank_before(const PersistencePoint& a, const PersistencePoint& b) {
  if (a.persistence() != b.persistence()) return a.persistence() > b.persistence();
  if (a.birth_pixel != b.birth_pixel) return a.birth_pixel < b.birth_pixel;
  return a.death_pixel < b.death_pixel;
}

struct Ranked {
  std::optional<PersistencePoint> essential;
  std::vector<PersistencePoint> finite;
};

Ranked ranked(const PersistenceDiagram& d, int dim, double eps_min) {
  Ranked out;
  for (const auto& p : d.points) {
    if (p.dim != dim) continue;
    if (p.essential) {
      out.essential = p;
    } else if (p.persistence() > eps_min) {
      out.finite.push_back(p);
    }
  }
  std::stable_sort(out.finite.begin(), out.finite.end(), rank_before);
  return out;
}

}  // namespace

Matching match(const PersistenceDiagram& gen, const PersistenceDiagram& ref, double eps_min) {
  if (!(gen.dims_computed == ref.dims_computed)) {
    throw std::invalid_argument("diagrams computed for different dimensions (" +
                                to_string(gen.dims_computed) + " vs " + to_string(ref.dims_computed) + ")");
  }
  Matching m;
  m.eps_min = eps_min;
  for (int dim = 0; dim <= 1; ++dim) {
    if (!gen.dims_computed.contains(dim)) continue;
    const Ranked g = ranked(gen, dim, eps_min);
    const Ranked r = ranked(ref, dim, eps_min);
    if (g.essential) m.pairs.push_back({*g.essential, r.essential});
    for (std::size_t k = 0; k < g.finite.size(); ++k) {
      std::optional<PersistencePoint> target;
      if (k < r.finite.size()) target = r.finite[k];
      m.pairs.push_back({g.finite[k], target});
    }
  }
  return m;
}

std::pair<double, double> diagonal_target(const PersistencePoint& p) {
  const double mid = 0.5 * (p.birth + p.death);
  return {mid, mid};
}

std::pair<double, double> target_coordinates(const MatchPair& pair) {
  if (pair.target) return {pair.target->birth, pair.target->death};
  return diagonal_target(pair.gen);
}

}  // namespace tpot
