#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tpot/objective.hpp"
#include "tpot/raster.hpp"

namespace tpot {

enum class SceneKind { broken_ring, two_blobs, noisy_vessel };

// Throws std::invalid_argument for unknown names.
SceneKind parse_scene(const std::string& name);
std::string to_string(SceneKind kind);

struct Scene {
  SceneKind kind;
  std::size_t size;
  std::uint64_t seed;
  ScalarField degraded;
  ScalarField reference;
};

// Deterministic in (kind, size, seed). size >= 32.
Scene generate_scene(SceneKind kind, std::size_t size = 64, std::uint64_t seed = 0);

struct TraceRecord {
  std::int64_t step = 0;
  double total = 0.0;
  double transport = 0.0;
  double topo = 0.0;  // gated: exactly 0 before the gate opens
  std::size_t betti0 = 0;
  std::size_t betti1 = 0;
};

struct DemoTrace {
  std::vector<TraceRecord> records;  // steps 0..steps; the last one is the final field
  ScalarField final_field;
};

struct DemoOptions {
  std::size_t steps = 2000;
  double eta = 0.05;
  double betti_threshold = 0.5;
  // Called with (step, field) before each update when dump_every > 0.
  std::size_t dump_every = 0;
  std::function<void(std::int64_t, const ScalarField&)> on_dump;
};

// Projected gradient descent on pixels: z <- clamp(z - eta * grad total(z)), with
// the transport cost anchored to the degraded field and the topology reference
// taken from the clean reference. Throws std::runtime_error on a non-finite gradient.
DemoTrace run_demo(const Scene& scene, const ObjectiveConfig& cfg, const DemoOptions& options);

std::string trace_csv(const DemoTrace& trace);

}  // namespace tpot
