#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>

#include "tpot/msssim.hpp"
#include "tpot/topo_loss.hpp"

namespace tpot {

struct ObjectiveConfig {
  double lambda_ssim = 30.0;
  double lambda_idt = 15.0;
  double lambda_topo = 1.0;
  std::int64_t gate_step = 100;  // topology term active once step >= gate_step
  std::size_t patch_size = kDefaultPatchSize;
  Dims dims;
  double eps_min = 0.0;
  unsigned threads = 0;
  MsssimConfig msssim;

  // Throws std::invalid_argument on negative weights or gate step.
  void validate() const;
};

struct ObjectiveReport {
  std::int64_t step = 0;
  double transport_cost = 0.0;
  std::optional<double> identity_cost;
  double topo_cost = 0.0;  // ungated C_topo value
  double external_w1 = 0.0;
  bool gate_active = false;
  double total = 0.0;
  Grid gradient;  // excludes the external term
  std::vector<PatchLoss> topo_per_patch;
};

// Reference diagrams keyed by field content, patch size and dims. Entries are
// immutable once inserted; lookups may run concurrently.
class ReferenceDiagramCache {
 public:
  std::shared_ptr<const ReferenceDiagrams> get(const ScalarField& ref, std::size_t patch_size, Dims dims,
                                               unsigned threads = 0);
  std::size_t size() const;

 private:
  struct Entry {
    ScalarField field;
    std::size_t patch_size;
    Dims dims;
    std::shared_ptr<const ReferenceDiagrams> diagrams;
  };
  mutable std::shared_mutex mutex_;
  std::unordered_multimap<std::uint64_t, Entry> entries_;
};

struct ObjectiveInputs {
  const ScalarField& gen;
  const ScalarField& input;                     // x: transport anchor and default topology reference
  const ScalarField* identity = nullptr;        // y, optional
  const ScalarField* topo_reference = nullptr;  // overrides x as the diagram source
  std::int64_t step = 0;
  double external_w1 = 0.0;
};

// total = lambda_ssim * C(gen, x) + lambda_idt * C(gen, y)
//       + [step >= gate_step] * lambda_topo * C_topo(gen, ref) + external_w1
ObjectiveReport evaluate(const ObjectiveInputs& in, const ObjectiveConfig& cfg,
                         ReferenceDiagramCache* cache = nullptr);

}  // namespace tpot
