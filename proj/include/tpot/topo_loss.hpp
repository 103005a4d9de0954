#pragma once

#include <memory>
#include <vector>

#include "tpot/matching.hpp"
#include "tpot/persistence.hpp"
#include "tpot/raster.hpp"

namespace tpot {

struct TopoLossOptions {
  std::size_t patch_size = kDefaultPatchSize;
  Dims dims;
  double eps_min = 0.0;
  unsigned threads = 0;  // 0 = all cores
};

struct PointContribution {
  Pixel anchor;  // patch the point belongs to
  MatchPair pair;
  double loss = 0.0;
};

struct PatchLossResult {
  double loss = 0.0;
  Grid gradient;  // patch-shaped
  Matching matching;
  std::vector<double> point_losses;  // parallel to matching.pairs
};

struct PatchLoss {
  Pixel anchor;
  double loss = 0.0;
};

struct TopoLossReport {
  double total = 0.0;
  std::vector<PatchLoss> per_patch;
  std::vector<PointContribution> per_point;
  Grid gradient;  // same shape as the generated field
};

// Per-patch reference diagrams, computed once for a fixed reference field.
struct ReferenceDiagrams {
  std::size_t width = 0;
  std::size_t height = 0;
  PatchLayout layout;
  Dims dims;
  std::vector<PersistenceDiagram> diagrams;  // parallel to layout.anchors
};

ReferenceDiagrams reference_diagrams(const ScalarField& ref, std::size_t patch_size, Dims dims,
                                     unsigned threads = 0);

// Sum over matched generated points of (b - b*)^2 + (d - d*)^2. The gradient puts
// 2(b - b*) on the birth pixel and 2(d - d*) on the death pixel, with the matching
// held fixed.
PatchLossResult topo_loss_patch(const ScalarField& gen, const PersistenceDiagram& ref_diagram,
                                double eps_min = 0.0);
PatchLossResult topo_loss_patch(const ScalarField& gen, const ScalarField& ref, Dims dims = {},
                                double eps_min = 0.0);

// Sum of patch losses over a shared tiling; overlapping gradients add up.
TopoLossReport topo_loss_full(const ScalarField& gen, const ReferenceDiagrams& ref,
                              const TopoLossOptions& options = {});
TopoLossReport topo_loss_full(const ScalarField& gen, const ScalarField& ref,
                              const TopoLossOptions& options = {});

}  // namespace tpot
