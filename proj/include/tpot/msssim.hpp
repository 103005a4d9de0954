#pragma once

#include <cstddef>
#include <vector>

#include "tpot/raster.hpp"

namespace tpot {

struct MsssimConfig {
  std::size_t window_size = 11;
  double window_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
  std::vector<double> scale_weights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  std::size_t max_scales = 0;  // 0 = as many as scale_weights allows
};

// Component values at or below this are clamped before exponentiation.
inline constexpr double kMsssimFloor = 1e-6;

// Largest s <= requested with min(width, height) >= window_size * 2^(s-1).
// Returns 0 when the field is smaller than one window.
std::size_t feasible_scales(std::size_t width, std::size_t height, const MsssimConfig& cfg);

struct MsssimResult {
  double value = 0.0;
  std::vector<double> weights;     // renormalized, one per scale used
  std::vector<double> components;  // contrast-structure means, final entry is mean SSIM
};

MsssimResult msssim_detail(const ScalarField& a, const ScalarField& b, const MsssimConfig& cfg = {});
double msssim(const ScalarField& a, const ScalarField& b, const MsssimConfig& cfg = {});

struct CostWithGradient {
  double cost = 0.0;
  Grid gradient;  // with respect to the first argument
};

// 1 - MS-SSIM(a, b) and its analytic gradient with respect to a.
CostWithGradient ssim_cost(const ScalarField& a, const ScalarField& b, const MsssimConfig& cfg = {});

// 10 log10(1 / MSE); +inf for identical fields.
double psnr(const ScalarField& a, const ScalarField& b);

}  // namespace tpot
