#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "tpot/matching.hpp"
#include "tpot/objective.hpp"
#include "tpot/persistence.hpp"
#include "tpot/topo_loss.hpp"

namespace tpot {

using Json = nlohmann::ordered_json;

Json point_to_json(const PersistencePoint& p);
PersistencePoint point_from_json(const Json& j);

// Array of points in canonical order.
Json diagram_to_json(const PersistenceDiagram& d);
// The point array carries no dimension set, so the caller supplies it.
PersistenceDiagram diagram_from_json(const Json& j, Dims dims);

Json matching_to_json(const Matching& m);

Json topo_report_to_json(const TopoLossReport& r, const std::optional<std::string>& grad_path);

Json objective_report_to_json(const ObjectiveReport& r, const std::optional<std::string>& grad_path);

// Non-finite doubles become null.
Json number(double v);

}  // namespace tpot
