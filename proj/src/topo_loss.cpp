#include "tpot/topo_loss.hpp"

#include <stdexcept>

#include "tpot/parallel.hpp"

namespace tpot {

namespace {

void require_same_shape(std::size_t w1, std::size_t h1, std::size_t w2, std::size_t h2) {
  if (w1 != w2 || h1 != h2) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(w1) + "x" + std::to_string(h1) +
                                " vs " + std::to_string(w2) + "x" + std::to_string(h2));
  }
}

}  // namespace

ReferenceDiagrams reference_diagrams(const ScalarField& ref, std::size_t patch_size, Dims dims,
                                     unsigned threads) {
  ReferenceDiagrams out;
  out.width = ref.width();
  out.height = ref.height();
  out.layout = tile(ref, patch_size);
  out.dims = dims;
  out.diagrams.resize(out.layout.anchors.size());
  parallel_for(out.layout.anchors.size(), threads, [&](std::size_t i) {
    const Pixel anchor = out.layout.anchors[i];
    out.diagrams[i] = compute_diagram(extract_patch(ref, anchor, patch_size), dims);
    out.diagrams[i].source = anchor;
  });
  return out;
}

PatchLossResult topo_loss_patch(const ScalarField& gen, const PersistenceDiagram& ref_diagram,
                                double eps_min) {
  PatchLossResult result;
  result.gradient = Grid(gen.width(), gen.height());
  result.matching = match(compute_diagram(gen, ref_diagram.dims_computed), ref_diagram, eps_min);
  result.point_losses.reserve(result.matching.pairs.size());
  for (const auto& pair : result.matching.pairs) {
    const auto [birth_target, death_target] = target_coordinates(pair);
    const double db = pair.gen.birth - birth_target;
    const double dd = pair.gen.death - death_target;
    const double loss = db * db + dd * dd;
    result.point_losses.push_back(loss);
    result.loss += loss;
    const Pixel b = pair.gen.birth_pixel;
    const Pixel d = pair.gen.death_pixel;
    result.gradient.at(static_cast<std::size_t>(b.row), static_cast<std::size_t>(b.col)) += 2.0 * db;
    result.gradient.at(static_cast<std::size_t>(d.row), static_cast<std::size_t>(d.col)) += 2.0 * dd;
  }
  return result;
}

PatchLossResult topo_loss_patch(const ScalarField& gen, const ScalarField& ref, Dims dims, double eps_min) {
  require_same_shape(gen.width(), gen.height(), ref.width(), ref.height());
  return topo_loss_patch(gen, compute_diagram(ref, dims), eps_min);
}

TopoLossReport topo_loss_full(const ScalarField& gen, const ReferenceDiagrams& ref,
                              const TopoLossOptions& options) {
  require_same_shape(gen.width(), gen.height(), ref.width, ref.height);
  if (ref.layout.patch_size != options.patch_size) {
    throw std::invalid_argument("reference diagrams were built for a different patch size");
  }
  const auto& anchors = ref.layout.anchors;
  std::vector<PatchLossResult> patches(anchors.size());
  parallel_for(anchors.size(), options.threads, [&](std::size_t i) {
    patches[i] =
        topo_loss_patch(extract_patch(gen, anchors[i], options.patch_size), ref.diagrams[i], options.eps_min);
  });

  // Merged in anchor order.
  TopoLossReport report;
  report.gradient = Grid(gen.width(), gen.height());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    report.total += patches[i].loss;
    report.per_patch.push_back({anchors[i], patches[i].loss});
    scatter_add(report.gradient, patches[i].gradient, anchors[i]);
    for (std::size_t k = 0; k < patches[i].matching.pairs.size(); ++k) {
      report.per_point.push_back({anchors[i], patches[i].matching.pairs[k], patches[i].point_losses[k]});
    }
  }
  return report;
}

TopoLossReport topo_loss_full(const ScalarField& gen, const ScalarField& ref,
                              const TopoLossOptions& options) {
  require_same_shape(gen.width(), gen.height(), ref.width(), ref.height());
  return topo_loss_full(gen, reference_diagrams(ref, options.patch_size, options.dims, options.threads),
                        options);
}

}  // namespace tpot
