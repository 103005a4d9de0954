#include "tpot/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tpot/persistence.hpp"

namespace tpot {

MaskTopology mask_topology(const std::vector<char>& mask, std::size_t width, std::size_t height) {
  auto in = [&](std::size_t r, std::size_t c) { return mask[r * width + c] != 0; };

  MaskTopology t;
  long long vertices = 0;
  long long edges = 0;
  long long squares = 0;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      if (!in(r, c)) continue;
      ++vertices;
      if (c + 1 < width && in(r, c + 1)) ++edges;
      if (r + 1 < height && in(r + 1, c)) ++edges;
      if (r + 1 < height && c + 1 < width && in(r, c + 1) && in(r + 1, c) && in(r + 1, c + 1)) {
        ++squares;
      }
    }
  }
  t.euler = vertices - edges + squares;

  std::vector<char> seen(mask.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || seen[start]) continue;
    ++t.beta0;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      const std::size_t r = v / width;
      const std::size_t c = v % width;
      const std::size_t nbrs[4] = {r > 0 ? v - width : v, c > 0 ? v - 1 : v, c + 1 < width ? v + 1 : v,
                                   r + 1 < height ? v + width : v};
      for (const std::size_t n : nbrs) {
        if (n != v && mask[n] && !seen[n]) {
          seen[n] = 1;
          stack.push_back(n);
        }
      }
    }
  }
  return t;
}

BettiOracleResult betti_by_floodfill(const ScalarField& field) {
  if (field.width() > kOracleMaxSide || field.height() > kOracleMaxSide) {
    throw std::invalid_argument("betti oracle is limited to 64x64 fields");
  }
  BettiOracleResult out;
  out.thresholds.assign(field.values().begin(), field.values().end());
  std::sort(out.thresholds.begin(), out.thresholds.end(), std::greater<>());
  out.thresholds.erase(std::unique(out.thresholds.begin(), out.thresholds.end()), out.thresholds.end());

  std::vector<char> mask(field.size());
  for (const double alpha : out.thresholds) {
    for (std::size_t i = 0; i < field.size(); ++i) mask[i] = field[i] >= alpha ? 1 : 0;
    const auto t = mask_topology(mask, field.width(), field.height());
    out.beta0.push_back(t.beta0);
    out.beta1.push_back(t.beta1());
  }
  return out;
}

Grid fd_gradient(const FieldLoss& loss, const ScalarField& field, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd step must be positive");
  auto eval = [&](const std::vector<double>& values) {
    const double v = loss(ScalarField(field.width(), field.height(), values));
    if (!std::isfinite(v)) throw std::domain_error("loss is not finite under perturbation");
    return v;
  };

  Grid grad(field.width(), field.height());
  std::vector<double> work(field.values().begin(), field.values().end());
  double centre = 0.0;
  bool have_centre = false;
  for (std::size_t i = 0; i < work.size(); ++i) {
    const double v = work[i];
    const bool up_ok = v + h <= 1.0;
    const bool down_ok = v - h >= 0.0;
    if (up_ok && down_ok) {
      work[i] = v + h;
      const double plus = eval(work);
      work[i] = v - h;
      const double minus = eval(work);
      grad[i] = (plus - minus) / (2.0 * h);
    } else {
      if (!have_centre) {
        centre = eval(work);
        have_centre = true;
      }
      work[i] = up_ok ? v + h : v - h;
      const double moved = eval(work);
      grad[i] = up_ok ? (moved - centre) / h : (centre - moved) / h;
    }
    work[i] = v;
  }
  return grad;
}

DiagramVerification verify_diagram(const ScalarField& field) {
  const auto oracle = betti_by_floodfill(field);
  const auto diagram = compute_diagram(field, Dims{});
  const auto b0 = betti_curve(diagram, 0, oracle.thresholds);
  const auto b1 = betti_curve(diagram, 1, oracle.thresholds);
  DiagramVerification out;
  out.thresholds_checked = oracle.thresholds.size();
  for (std::size_t i = 0; i < oracle.thresholds.size(); ++i) {
    if (b0[i] != oracle.beta0[i]) out.mismatches.push_back({oracle.thresholds[i], 0, b0[i], oracle.beta0[i]});
    if (b1[i] != oracle.beta1[i]) out.mismatches.push_back({oracle.thresholds[i], 1, b1[i], oracle.beta1[i]});
  }
  return out;
}

GradientCheck compare_gradients(const Grid& analytic, const Grid& numeric, const std::vector<char>& checked,
                                double rel_tol, double floor) {
  if (analytic.size() != numeric.size() || checked.size() != analytic.size()) {
    throw std::invalid_argument("gradient comparison: size mismatch");
  }
  GradientCheck out;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i];
    const double n = numeric[i];
    if (checked[i]) {
      ++out.checked;
      const double denom = std::max({std::abs(a), std::abs(n), floor});
      out.max_rel_error = std::max(out.max_rel_error, std::abs(a - n) / denom);
    } else {
      out.max_abs_unchecked = std::max({out.max_abs_unchecked, std::abs(a), std::abs(n)});
    }
  }
  out.ok = out.max_rel_error <= rel_tol && out.max_abs_unchecked == 0.0;
  return out;
}

GradientCheck verify_topo_gradient(const ScalarField& gen, const ScalarField& ref,
                                   const TopoLossOptions& options, double h, double rel_tol) {
  const auto ref_diagrams = reference_diagrams(ref, options.patch_size, options.dims, options.threads);
  const auto report = topo_loss_full(gen, ref_diagrams, options);
  std::vector<char> critical(gen.size(), 0);
  for (const auto& pc : report.per_point) {
    for (const Pixel p : {pc.pair.gen.birth_pixel, pc.pair.gen.death_pixel}) {
      const auto r = static_cast<std::size_t>(pc.anchor.row + p.row);
      const auto c = static_cast<std::size_t>(pc.anchor.col + p.col);
      critical[r * gen.width() + c] = 1;
    }
  }
  const auto numeric = fd_gradient(
      [&](const ScalarField& f) { return topo_loss_full(f, ref_diagrams, options).total; }, gen, h);
  return compare_gradients(report.gradient, numeric, critical, rel_tol);
}

GradientCheck verify_ssim_gradient(const ScalarField& a, const ScalarField& b, const MsssimConfig& cfg,
                                   double h, double rel_tol) {
  const auto analytic = ssim_cost(a, b, cfg);
  const auto numeric = fd_gradient([&](const ScalarField& f) { return 1.0 - msssim(f, b, cfg); }, a, h);
  return compare_gradients(analytic.gradient, numeric, std::vector<char>(a.size(), 1), rel_tol);
}

}  // namespace tpot
