#include "tpot/msssim.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tpot {

namespace {

std::vector<double> gaussian_kernel(std::size_t size, double sigma) {
  std::vector<double> k(size);
  const double centre = 0.5 * static_cast<double>(size - 1);
  for (std::size_t i = 0; i < size; ++i) {
    const double x = static_cast<double>(i) - centre;
    k[i] = std::exp(-(x * x) / (2.0 * sigma * sigma));
  }
  const double sum = std::accumulate(k.begin(), k.end(), 0.0);
  for (auto& v : k) v /= sum;
  return k;
}

// Valid-region separable correlation: output is (w - n + 1) x (h - n + 1).
Grid filter_valid(const Grid& in, const std::vector<double>& k) {
  const std::size_t n = k.size();
  const std::size_t ow = in.width() - n + 1;
  const std::size_t oh = in.height() - n + 1;
  Grid tmp(ow, in.height());
  for (std::size_t r = 0; r < in.height(); ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += k[t] * in.at(r, c + t);
      tmp.at(r, c) = s;
    }
  }
  Grid out(ow, oh);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += k[t] * tmp.at(r + t, c);
      out.at(r, c) = s;
    }
  }
  return out;
}

// Adjoint of filter_valid: scatters a (w - n + 1) x (h - n + 1) map back to w x h.
Grid filter_valid_adjoint(const Grid& out, const std::vector<double>& k, std::size_t width,
                          std::size_t height) {
  const std::size_t n = k.size();
  Grid tmp(out.width(), height);
  for (std::size_t r = 0; r < out.height(); ++r) {
    for (std::size_t c = 0; c < out.width(); ++c) {
      const double v = out.at(r, c);
      for (std::size_t t = 0; t < n; ++t) tmp.at(r + t, c) += k[t] * v;
    }
  }
  Grid in(width, height);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < tmp.width(); ++c) {
      const double v = tmp.at(r, c);
      for (std::size_t t = 0; t < n; ++t) in.at(r, c + t) += k[t] * v;
    }
  }
  return in;
}

// 2x2 mean pooling; an odd trailing row/column is dropped.
Grid pool2(const Grid& in) {
  Grid out(in.width() / 2, in.height() / 2);
  for (std::size_t r = 0; r < out.height(); ++r) {
    for (std::size_t c = 0; c < out.width(); ++c) {
      out.at(r, c) = 0.25 * (in.at(2 * r, 2 * c) + in.at(2 * r, 2 * c + 1) + in.at(2 * r + 1, 2 * c) +
                             in.at(2 * r + 1, 2 * c + 1));
    }
  }
  return out;
}

Grid pool2_adjoint(const Grid& out, std::size_t width, std::size_t height) {
  Grid in(width, height);
  for (std::size_t r = 0; r < out.height(); ++r) {
    for (std::size_t c = 0; c < out.width(); ++c) {
      const double v = 0.25 * out.at(r, c);
      in.at(2 * r, 2 * c) += v;
      in.at(2 * r, 2 * c + 1) += v;
      in.at(2 * r + 1, 2 * c) += v;
      in.at(2 * r + 1, 2 * c + 1) += v;
    }
  }
  return in;
}

Grid product(const Grid& x, const Grid& y) {
  Grid out(x.width(), x.height());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  return out;
}

struct ScaleValue {
  double mean = 0.0;
  Grid grad_a;  // d mean / d a at this scale; empty unless requested
};

// Mean contrast-structure (or, with luminance, full SSIM) over the valid map.
ScaleValue scale_statistic(const Grid& a, const Grid& b, const std::vector<double>& k, double c1, double c2,
                           bool with_luminance, bool want_grad) {
  const Grid mu_a = filter_valid(a, k);
  const Grid mu_b = filter_valid(b, k);
  const Grid s_aa = filter_valid(product(a, a), k);
  const Grid s_bb = filter_valid(product(b, b), k);
  const Grid s_ab = filter_valid(product(a, b), k);

  const std::size_t count = mu_a.size();
  const double inv_count = 1.0 / static_cast<double>(count);
  Grid g_mu(mu_a.width(), mu_a.height());
  Grid g_saa(mu_a.width(), mu_a.height());
  Grid g_sab(mu_a.width(), mu_a.height());

  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = s_aa[i] - ma * ma;
    const double var_b = s_bb[i] - mb * mb;
    const double cov = s_ab[i] - ma * mb;
    const double cs_den = var_a + var_b + c2;
    const double cs = (2.0 * cov + c2) / cs_den;

    // d cs / d(S_aa), d(S_ab), d(mu_a) through var_a and cov.
    const double dcs_saa = -cs / cs_den;
    const double dcs_sab = 2.0 / cs_den;
    const double dcs_mu = (2.0 * ma * cs - 2.0 * mb) / cs_den;

    if (!with_luminance) {
      sum += cs;
      g_mu[i] = dcs_mu * inv_count;
      g_saa[i] = dcs_saa * inv_count;
      g_sab[i] = dcs_sab * inv_count;
      continue;
    }
    const double l_den = ma * ma + mb * mb + c1;
    const double l = (2.0 * ma * mb + c1) / l_den;
    const double dl_mu = (2.0 * mb - 2.0 * ma * l) / l_den;
    sum += l * cs;
    g_mu[i] = (l * dcs_mu + cs * dl_mu) * inv_count;
    g_saa[i] = l * dcs_saa * inv_count;
    g_sab[i] = l * dcs_sab * inv_count;
  }

  ScaleValue out;
  out.mean = sum * inv_count;
  if (!want_grad) return out;

  const Grid back_mu = filter_valid_adjoint(g_mu, k, a.width(), a.height());
  const Grid back_saa = filter_valid_adjoint(g_saa, k, a.width(), a.height());
  const Grid back_sab = filter_valid_adjoint(g_sab, k, a.width(), a.height());
  out.grad_a = Grid(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.grad_a[i] = back_mu[i] + 2.0 * a[i] * back_saa[i] + b[i] * back_sab[i];
  }
  return out;
}

struct Evaluation {
  MsssimResult result;
  Grid grad_value;  // d MS-SSIM / d a
};

Evaluation evaluate(const ScalarField& a, const ScalarField& b, const MsssimConfig& cfg, bool want_grad) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument("msssim: dimension mismatch");
  }
  const std::size_t scales = feasible_scales(a.width(), a.height(), cfg);
  if (scales == 0) {
    throw std::invalid_argument("msssim: field " + std::to_string(a.width()) + "x" +
                                std::to_string(a.height()) + " is smaller than the " +
                                std::to_string(cfg.window_size) + "-pixel window");
  }
  for (const double w : cfg.scale_weights) {
    if (!(w > 0.0)) throw std::invalid_argument("msssim: scale weights must be positive");
  }

  Evaluation ev;
  auto& res = ev.result;
  const double weight_sum =
      std::accumulate(cfg.scale_weights.begin(), cfg.scale_weights.begin() + scales, 0.0);
  for (std::size_t j = 0; j < scales; ++j) res.weights.push_back(cfg.scale_weights[j] / weight_sum);

  const auto k = gaussian_kernel(cfg.window_size, cfg.window_sigma);
  const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
  const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);

  std::vector<Grid> pyr_a{a.to_grid()};
  std::vector<Grid> pyr_b{b.to_grid()};
  for (std::size_t j = 1; j < scales; ++j) {
    pyr_a.push_back(pool2(pyr_a.back()));
    pyr_b.push_back(pool2(pyr_b.back()));
  }

  std::vector<ScaleValue> stats;
  std::vector<bool> clamped;
  res.value = 1.0;
  for (std::size_t j = 0; j < scales; ++j) {
    stats.push_back(scale_statistic(pyr_a[j], pyr_b[j], k, c1, c2, j + 1 == scales, want_grad));
    const double raw = stats.back().mean;
    clamped.push_back(raw <= kMsssimFloor);
    const double v = clamped.back() ? kMsssimFloor : raw;
    res.components.push_back(v);
    res.value *= std::pow(v, res.weights[j]);
  }
  if (!want_grad) return ev;

  // d M / d V_j = w_j M / V_j; walk from the coarsest scale back to full size.
  Grid acc;
  for (std::size_t jj = scales; jj-- > 0;) {
    Grid here(pyr_a[jj].width(), pyr_a[jj].height());
    if (jj + 1 < scales) here = pool2_adjoint(acc, pyr_a[jj].width(), pyr_a[jj].height());
    if (!clamped[jj]) {
      const double coef = res.weights[jj] * res.value / res.components[jj];
      for (std::size_t i = 0; i < here.size(); ++i) here[i] += coef * stats[jj].grad_a[i];
    }
    acc = std::move(here);
  }
  ev.grad_value = std::move(acc);
  return ev;
}

}  // namespace

std::size_t feasible_scales(std::size_t width, std::size_t height, const MsssimConfig& cfg) {
  std::size_t s = cfg.scale_weights.size();
  if (cfg.max_scales > 0) s = std::min(s, cfg.max_scales);
  const std::size_t side = std::min(width, height);
  while (s > 0 && side < cfg.window_size * (std::size_t{1} << (s - 1))) --s;
  return s;
}

MsssimResult msssim_detail(const ScalarField& a, const ScalarField& b, const MsssimConfig& cfg) {
  return evaluate(a, b, cfg, false).result;
}

double msssim(const ScalarField& a, const ScalarField& b, const MsssimConfig& cfg) {
  return msssim_detail(a, b, cfg).value;
}

CostWithGradient ssim_cost(const ScalarField& a, const ScalarField& b, const MsssimConfig& cfg) {
  auto ev = evaluate(a, b, cfg, true);
  CostWithGradient out;
  out.cost = 1.0 - ev.result.value;
  out.gradient = std::move(ev.grad_value);
  out.gradient *= -1.0;
  return out;
}

double psnr(const ScalarField& a, const ScalarField& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument("psnr: dimension mismatch");
  }
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace tpot
