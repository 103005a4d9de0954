#include "tpot/objective.hpp"

#include <bit>
#include <stdexcept>

namespace tpot {

namespace {

std::uint64_t fingerprint(const ScalarField& f, std::size_t patch_size, Dims dims) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(f.width());
  mix(f.height());
  mix(patch_size);
  mix((dims.zero ? 1u : 0u) | (dims.one ? 2u : 0u));
  for (const double v : f.values()) mix(std::bit_cast<std::uint64_t>(v));
  return h;
}

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument(std::string("objective: ") + what + " dimension mismatch");
  }
}

}  // namespace

void ObjectiveConfig::validate() const {
  if (lambda_ssim < 0.0 || lambda_idt < 0.0 || lambda_topo < 0.0) {
    throw std::invalid_argument("objective weights must be non-negative");
  }
  if (gate_step < 0) throw std::invalid_argument("gate step must be non-negative");
  if (patch_size < 2) throw std::invalid_argument("patch_size must be >= 2");
}

std::shared_ptr<const ReferenceDiagrams> ReferenceDiagramCache::get(const ScalarField& ref,
                                                                    std::size_t patch_size, Dims dims,
                                                                    unsigned threads) {
  const auto key = fingerprint(ref, patch_size, dims);
  auto lookup = [&]() -> std::shared_ptr<const ReferenceDiagrams> {
    auto [lo, hi] = entries_.equal_range(key);
    for (auto it = lo; it != hi; ++it) {
      const Entry& e = it->second;
      if (e.patch_size == patch_size && e.dims == dims && e.field == ref) return e.diagrams;
    }
    return nullptr;
  };
  {
    std::shared_lock lock(mutex_);
    if (auto hit = lookup()) return hit;
  }
  auto built = std::make_shared<const ReferenceDiagrams>(reference_diagrams(ref, patch_size, dims, threads));
  std::unique_lock lock(mutex_);
  if (auto hit = lookup()) return hit;
  entries_.emplace(key, Entry{ref, patch_size, dims, built});
  return built;
}

std::size_t ReferenceDiagramCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

ObjectiveReport evaluate(const ObjectiveInputs& in, const ObjectiveConfig& cfg,
                         ReferenceDiagramCache* cache) {
  cfg.validate();
  require_same_shape(in.gen, in.input, "gen/input");
  if (in.identity) require_same_shape(in.gen, *in.identity, "gen/ident");
  const ScalarField& topo_ref = in.topo_reference ? *in.topo_reference : in.input;
  require_same_shape(in.gen, topo_ref, "gen/topo-reference");

  ObjectiveReport report;
  report.step = in.step;
  report.external_w1 = in.external_w1;
  report.gate_active = in.step >= cfg.gate_step;

  auto transport = ssim_cost(in.gen, in.input, cfg.msssim);
  report.transport_cost = transport.cost;
  report.gradient = std::move(transport.gradient);
  report.gradient *= cfg.lambda_ssim;

  double weighted = cfg.lambda_ssim * report.transport_cost;
  if (in.identity) {
    auto identity = ssim_cost(in.gen, *in.identity, cfg.msssim);
    report.identity_cost = identity.cost;
    weighted += cfg.lambda_idt * identity.cost;
    identity.gradient *= cfg.lambda_idt;
    report.gradient += identity.gradient;
  }

  TopoLossOptions topo_opts{cfg.patch_size, cfg.dims, cfg.eps_min, cfg.threads};
  std::shared_ptr<const ReferenceDiagrams> ref_diagrams =
      cache ? cache->get(topo_ref, cfg.patch_size, cfg.dims, cfg.threads)
            : std::make_shared<const ReferenceDiagrams>(
                  reference_diagrams(topo_ref, cfg.patch_size, cfg.dims, cfg.threads));
  auto topo = topo_loss_full(in.gen, *ref_diagrams, topo_opts);
  report.topo_cost = topo.total;
  report.topo_per_patch = std::move(topo.per_patch);

  report.total = weighted + in.external_w1;
  if (report.gate_active) {
    report.total += cfg.lambda_topo * report.topo_cost;
    topo.gradient *= cfg.lambda_topo;
    report.gradient += topo.gradient;
  }
  return report;
}

}  // namespace tpot
