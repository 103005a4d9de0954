#include "tpot/demo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tpot/persistence.hpp"

namespace tpot {

namespace {

TraceRecord record(std::int64_t step, const ObjectiveReport& rep, const ScalarField& z, double threshold) {
  const auto diagram = compute_diagram(z, Dims{});
  TraceRecord rec;
  rec.step = step;
  rec.total = rep.total;
  rec.transport = rep.transport_cost;
  rec.topo = rep.gate_active ? rep.topo_cost : 0.0;
  rec.betti0 = betti_curve(diagram, 0, {threshold}).front();
  rec.betti1 = betti_curve(diagram, 1, {threshold}).front();
  return rec;
}

}  // namespace

DemoTrace run_demo(const Scene& scene, const ObjectiveConfig& cfg, const DemoOptions& options) {
  if (options.steps < 1) throw std::invalid_argument("demo needs at least one step");
  if (!(options.eta > 0.0)) throw std::invalid_argument("demo step size must be positive");
  cfg.validate();

  ReferenceDiagramCache cache;
  ScalarField z = scene.degraded;
  DemoTrace trace{{}, z};
  trace.records.reserve(options.steps + 1);

  auto evaluate_at = [&](std::int64_t step) {
    ObjectiveInputs in{z, scene.degraded, nullptr, &scene.reference, step, 0.0};
    return evaluate(in, cfg, &cache);
  };

  for (std::size_t s = 0; s < options.steps; ++s) {
    const auto step = static_cast<std::int64_t>(s);
    if (options.dump_every > 0 && s % options.dump_every == 0 && options.on_dump) {
      options.on_dump(step, z);
    }
    const auto rep = evaluate_at(step);
    trace.records.push_back(record(step, rep, z, options.betti_threshold));

    std::vector<double> next(z.values().begin(), z.values().end());
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double g = rep.gradient[i];
      if (!std::isfinite(g)) {
        throw std::runtime_error("non-finite gradient at step " + std::to_string(s) + ", pixel " +
                                 std::to_string(i));
      }
      next[i] = std::clamp(next[i] - options.eta * g, 0.0, 1.0);
    }
    z = ScalarField(z.width(), z.height(), std::move(next));
  }

  const auto last = static_cast<std::int64_t>(options.steps);
  trace.records.push_back(record(last, evaluate_at(last), z, options.betti_threshold));
  trace.final_field = z;
  return trace;
}

std::string trace_csv(const DemoTrace& trace) {
  std::string out = "step,total,transport,topo,b0,b1\n";
  char line[256];
  for (const auto& r : trace.records) {
    std::snprintf(line, sizeof(line), "%lld,%.17g,%.17g,%.17g,%zu,%zu\n", static_cast<long long>(r.step),
                  r.total, r.transport, r.topo, r.betti0, r.betti1);
    out += line;
  }
  return out;
}

}  // namespace tpot
