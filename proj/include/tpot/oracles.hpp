#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tpot/msssim.hpp"
#include "tpot/raster.hpp"
#include "tpot/topo_loss.hpp"

namespace tpot {

// Brute-force validators. They share no code with the persistence and loss paths.

struct BettiOracleResult {
  std::vector<double> thresholds;  // unique field values, descending
  std::vector<std::size_t> beta0;
  std::vector<std::size_t> beta1;
};

inline constexpr std::size_t kOracleMaxSide = 64;

// For each unique value a: mask = {v >= a}; beta0 by 4-connected flood fill,
// chi = V - E + F over the V-construction cells, beta1 = beta0 - chi.
// Throws std::invalid_argument for fields larger than 64x64.
BettiOracleResult betti_by_floodfill(const ScalarField& field);

// beta0 and Euler characteristic of a single binary mask (row-major, 0/1).
struct MaskTopology {
  std::size_t beta0 = 0;
  long long euler = 0;
  std::size_t beta1() const { return static_cast<std::size_t>(static_cast<long long>(beta0) - euler); }
};
MaskTopology mask_topology(const std::vector<char>& mask, std::size_t width, std::size_t height);

using FieldLoss = std::function<double(const ScalarField&)>;

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h per pixel. Pixels within
// h of the [0, 1] bounds fall back to the one-sided difference that stays inside.
// Throws std::domain_error if the loss is not finite.
Grid fd_gradient(const FieldLoss& loss, const ScalarField& field, double h = 1e-4);

// Cross-checks used by the verify commands and the acceptance suite.

struct BettiMismatch {
  double threshold = 0.0;
  int dim = 0;
  std::size_t diagram = 0;
  std::size_t oracle = 0;
};

struct DiagramVerification {
  std::size_t thresholds_checked = 0;
  std::vector<BettiMismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// betti_curve(compute_diagram(field)) against betti_by_floodfill at every unique value.
DiagramVerification verify_diagram(const ScalarField& field);

struct GradientCheck {
  double max_rel_error = 0.0;      // over checked pixels
  double max_abs_unchecked = 0.0;  // largest |analytic| or |numeric| off the checked set
  std::size_t checked = 0;
  bool ok = false;
};

// Relative error |a - n| / max(|a|, |n|, floor) on pixels where `checked` is set;
// everywhere else both gradients must be exactly zero.
GradientCheck compare_gradients(const Grid& analytic, const Grid& numeric, const std::vector<char>& checked,
                                double rel_tol, double floor = 1e-6);

// Checked set = birth/death pixels of every matched generated point.
GradientCheck verify_topo_gradient(const ScalarField& gen, const ScalarField& ref,
                                   const TopoLossOptions& options, double h = 1e-4, double rel_tol = 1e-3);

// Every pixel is checked.
GradientCheck verify_ssim_gradient(const ScalarField& a, const ScalarField& b, const MsssimConfig& cfg = {},
                                   double h = 1e-4, double rel_tol = 1e-3);

}  // namespace tpot
