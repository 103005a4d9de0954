#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpot/raster.hpp"

namespace tpot {

// Homology dimensions to compute / penalize.
struct Dims {
  bool zero = true;
  bool one = true;

  bool contains(int dim) const noexcept { return dim == 0 ? zero : (dim == 1 ? one : false); }
  bool operator==(const Dims&) const = default;
};

// Parses "0", "1", "0,1". Throws std::invalid_argument otherwise.
Dims parse_dims(const std::string& text);
std::string to_string(Dims dims);

// One feature of the superlevel filtration. birth >= death.
struct PersistencePoint {
  int dim = 0;
  double birth = 0.0;
  double death = 0.0;
  bool essential = false;
  Pixel birth_pixel;
  Pixel death_pixel;

  double persistence() const noexcept { return birth - death; }
  bool operator==(const PersistencePoint&) const = default;
};

struct PersistenceDiagram {
  std::vector<PersistencePoint> points;
  Dims dims_computed;
  std::optional<Pixel> source;  // patch anchor; nullopt for the full field

  std::vector<PersistencePoint> of_dim(int dim) const;
  bool operator==(const PersistenceDiagram&) const = default;
};

// Superlevel-set persistence of the V-construction cubical complex: pixels are
// vertices, 4-neighbours share edges, 2x2 blocks are squares, each cell takes the
// minimum of its vertex values. Pixels enter in descending value with ties broken
// by ascending row-major index.
//
// Non-essential points with birth == death (plateau ties) are not reported.
//
// Dim 0 runs union-find with the elder rule. Dim 1 uses Alexander duality: the
// complement is swept in reverse order with 8-connectivity and a virtual outer
// region, and each bounded complement component that merges away is a loop.
PersistenceDiagram compute_diagram(const ScalarField& field, Dims dims = {});

// Number of points alive at each threshold: birth >= alpha > death for finite
// points, birth >= alpha >= death for the essential point.
std::vector<std::size_t> betti_curve(const PersistenceDiagram& diagram, int dim,
                                     const std::vector<double>& thresholds);

// Keyed by index into diagram.points.
std::map<std::size_t, std::pair<Pixel, Pixel>> critical_pixels(const PersistenceDiagram& diagram);

// Canonical order: (dim, -persistence, birth_pixel row-major, death_pixel).
void sort_canonical(std::vector<PersistencePoint>& points);

}  // namespace tpot
