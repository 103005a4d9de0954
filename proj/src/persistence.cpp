#include "tpot/persistence.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tpot/union_find.hpp"

namespace tpot {

namespace {

// Filtration order: value descending, row-major index ascending among ties.
std::vector<std::size_t> filtration_order(const ScalarField& field) {
  std::vector<std::size_t> order(field.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto values = field.values();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

std::size_t global_min_index(const ScalarField& field) {
  const auto values = field.values();
  return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
}

// Per-component bookkeeping indexed by union-find root. `key` is the position in
// the sweep at which the component was born (smaller = elder); `pixel` is the
// pixel that gave birth to it.
struct Component {
  std::ptrdiff_t key;
  std::size_t pixel;
};

// Collects distinct roots of present neighbours, then merges everything into the
// eldest root. Every younger root yields one (birth=its pixel, death=current).
template <typename NeighbourFn, typename EmitFn>
void sweep(const std::vector<std::size_t>& sequence, std::vector<Component>& comp, UnionFind& uf,
           std::vector<char>& present, NeighbourFn&& neighbours, EmitFn&& emit) {
  std::vector<std::size_t> roots;
  roots.reserve(9);
  for (std::size_t pos = 0; pos < sequence.size(); ++pos) {
    const std::size_t v = sequence[pos];
    roots.clear();
    neighbours(v, [&](std::size_t n) {
      if (!present[n]) return;
      const std::size_t r = uf.find(n);
      if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    });
    present[v] = 1;
    if (roots.empty()) {
      comp[v] = {static_cast<std::ptrdiff_t>(pos), v};
      continue;
    }
    std::sort(roots.begin(), roots.end(),
              [&](std::size_t a, std::size_t b) { return comp[a].key < comp[b].key; });
    const Component elder = comp[roots.front()];
    for (std::size_t k = 1; k < roots.size(); ++k) emit(comp[roots[k]].pixel, v);
    std::size_t root = roots.front();
    for (std::size_t k = 1; k < roots.size(); ++k) root = uf.unite(root, roots[k]);
    root = uf.unite(root, v);
    comp[root] = elder;
  }
}

}  // namespace

Dims parse_dims(const std::string& text) {
  Dims dims{false, false};
  std::stringstream ss(text);
  std::string item;
  bool any = false;
  while (std::getline(ss, item, ',')) {
    if (item == "0") {
      dims.zero = true;
    } else if (item == "1") {
      dims.one = true;
    } else {
      throw std::invalid_argument("invalid homology dimension '" + item + "' (allowed: 0, 1)");
    }
    any = true;
  }
  if (!any) throw std::invalid_argument("empty dimension list");
  return dims;
}

std::string to_string(Dims dims) {
  if (dims.zero && dims.one) return "0,1";
  if (dims.zero) return "0";
  if (dims.one) return "1";
  return "";
}

std::vector<PersistencePoint> PersistenceDiagram::of_dim(int dim) const {
  std::vector<PersistencePoint> out;
  for (const auto& p : points) {
    if (p.dim == dim) out.push_back(p);
  }
  return out;
}

PersistenceDiagram compute_diagram(const ScalarField& field, Dims dims) {
  const std::size_t width = field.width();
  const std::size_t height = field.height();
  const std::size_t n = field.size();
  const auto values = field.values();
  const auto order = filtration_order(field);

  PersistenceDiagram diagram;
  diagram.dims_computed = dims;

  auto make_point = [&](int dim, std::size_t birth, std::size_t death) {
    PersistencePoint p;
    p.dim = dim;
    p.birth = values[birth];
    p.death = values[death];
    p.birth_pixel = field.pixel_of(birth);
    p.death_pixel = field.pixel_of(death);
    return p;
  };

  if (dims.zero) {
    UnionFind uf(n);
    std::vector<Component> comp(n);
    std::vector<char> present(n, 0);
    auto four = [&](std::size_t v, auto&& visit) {
      const std::size_t r = v / width;
      const std::size_t c = v % width;
      if (r > 0) visit(v - width);
      if (c > 0) visit(v - 1);
      if (c + 1 < width) visit(v + 1);
      if (r + 1 < height) visit(v + width);
    };
    sweep(order, comp, uf, present, four, [&](std::size_t birth, std::size_t death) {
      if (values[birth] != values[death]) diagram.points.push_back(make_point(0, birth, death));
    });
    PersistencePoint essential = make_point(0, order.front(), global_min_index(field));
    essential.essential = true;
    diagram.points.push_back(essential);
  }

  if (dims.one) {
    // Complement sweep: reverse filtration order, 8-connectivity, node n is the
    // region outside the field and is older than every pixel.
    const std::size_t outer = n;
    UnionFind uf(n + 1);
    std::vector<Component> comp(n + 1);
    std::vector<char> present(n + 1, 0);
    present[outer] = 1;
    comp[outer] = {-1, outer};
    std::vector<std::size_t> reversed(order.rbegin(), order.rend());
    auto eight = [&](std::size_t v, auto&& visit) {
      const std::size_t r = v / width;
      const std::size_t c = v % width;
      if (r == 0 || c == 0 || r + 1 == height || c + 1 == width) visit(outer);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const auto rr = static_cast<std::ptrdiff_t>(r) + dr;
          const auto cc = static_cast<std::ptrdiff_t>(c) + dc;
          if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(height) ||
              cc >= static_cast<std::ptrdiff_t>(width)) {
            continue;
          }
          visit(static_cast<std::size_t>(rr) * width + static_cast<std::size_t>(cc));
        }
      }
    };
    // A younger complement component born at pixel m disappears into an older one
    // when pixel p joins them: in the superlevel sweep p closes a loop (birth) and
    // m is the last pixel to fill the enclosed region (death).
    sweep(reversed, comp, uf, present, eight, [&](std::size_t m, std::size_t p) {
      if (values[p] != values[m]) diagram.points.push_back(make_point(1, p, m));
    });
  }

  sort_canonical(diagram.points);
  return diagram;
}

std::vector<std::size_t> betti_curve(const PersistenceDiagram& diagram, int dim,
                                     const std::vector<double>& thresholds) {
  if (!diagram.dims_computed.contains(dim)) {
    throw std::invalid_argument("dimension " + std::to_string(dim) + " was not computed");
  }
  std::vector<std::size_t> counts(thresholds.size(), 0);
  for (const auto& p : diagram.points) {
    if (p.dim != dim) continue;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      const double a = thresholds[i];
      const bool alive = p.essential ? (p.birth >= a && a >= p.death) : (p.birth >= a && a > p.death);
      if (alive) ++counts[i];
    }
  }
  return counts;
}

std::map<std::size_t, std::pair<Pixel, Pixel>> critical_pixels(const PersistenceDiagram& diagram) {
  std::map<std::size_t, std::pair<Pixel, Pixel>> out;
  for (std::size_t i = 0; i < diagram.points.size(); ++i) {
    out.emplace(i, std::make_pair(diagram.points[i].birth_pixel, diagram.points[i].death_pixel));
  }
  return out;
}

void sort_canonical(std::vector<PersistencePoint>& points) {
  std::sort(points.begin(), points.end(), [](const PersistencePoint& a, const PersistencePoint& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.persistence() != b.persistence()) return a.persistence() > b.persistence();
    if (a.birth_pixel != b.birth_pixel) return a.birth_pixel < b.birth_pixel;
    if (a.death_pixel != b.death_pixel) return a.death_pixel < b.death_pixel;
    return a.essential > b.essential;
  });
}

}  // namespace tpot
