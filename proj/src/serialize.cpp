#include "tpot/serialize.hpp"

#include <cmath>
#include <stdexcept>

namespace tpot {

namespace {

Json pixel_json(Pixel p) { return Json::array({p.row, p.col}); }

Pixel pixel_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("pixel must be [row, col]");
  return {j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>()};
}

}  // namespace

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json point_to_json(const PersistencePoint& p) {
  Json j;
  j["dim"] = p.dim;
  j["birth"] = p.birth;
  j["death"] = p.death;
  j["essential"] = p.essential;
  j["birth_pixel"] = pixel_json(p.birth_pixel);
  j["death_pixel"] = pixel_json(p.death_pixel);
  return j;
}

PersistencePoint point_from_json(const Json& j) {
  PersistencePoint p;
  p.dim = j.at("dim").get<int>();
  if (p.dim != 0 && p.dim != 1) throw std::invalid_argument("point dim must be 0 or 1");
  p.birth = j.at("birth").get<double>();
  p.death = j.at("death").get<double>();
  p.essential = j.at("essential").get<bool>();
  p.birth_pixel = pixel_from(j.at("birth_pixel"));
  p.death_pixel = pixel_from(j.at("death_pixel"));
  if (p.birth < p.death) throw std::invalid_argument("point has birth < death");
  return p;
}

Json diagram_to_json(const PersistenceDiagram& d) {
  auto points = d.points;
  sort_canonical(points);
  Json arr = Json::array();
  for (const auto& p : points) arr.push_back(point_to_json(p));
  return arr;
}

PersistenceDiagram diagram_from_json(const Json& j, Dims dims) {
  if (!j.is_array()) throw std::invalid_argument("diagram JSON must be an array of points");
  PersistenceDiagram d;
  d.dims_computed = dims;
  for (const auto& item : j) {
    auto p = point_from_json(item);
    if (!dims.contains(p.dim)) {
      throw std::invalid_argument("diagram has a dim-" + std::to_string(p.dim) + " point but dims are " +
                                  to_string(dims));
    }
    d.points.push_back(p);
  }
  sort_canonical(d.points);
  return d;
}

Json matching_to_json(const Matching& m) {
  Json arr = Json::array();
  for (const auto& pair : m.pairs) {
    Json j;
    j["gen"] = point_to_json(pair.gen);
    j["target"] = pair.target ? point_to_json(*pair.target) : Json("diagonal");
    arr.push_back(j);
  }
  return arr;
}

Json topo_report_to_json(const TopoLossReport& r, const std::optional<std::string>& grad_path) {
  Json j;
  j["total"] = r.total;
  Json patches = Json::array();
  for (const auto& p : r.per_patch) {
    Json pj;
    pj["anchor"] = pixel_json(p.anchor);
    pj["loss"] = p.loss;
    patches.push_back(pj);
  }
  j["per_patch"] = patches;
  j["grad"] = grad_path ? Json(*grad_path) : Json(nullptr);
  return j;
}

Json objective_report_to_json(const ObjectiveReport& r, const std::optional<std::string>& grad_path) {
  Json j;
  j["step"] = r.step;
  j["transport_cost"] = r.transport_cost;
  j["identity_cost"] = r.identity_cost ? Json(*r.identity_cost) : Json(nullptr);
  j["topo_cost"] = r.topo_cost;
  j["external_w1"] = r.external_w1;
  j["gate_active"] = r.gate_active;
  j["total"] = r.total;
  j["grad"] = grad_path ? Json(*grad_path) : Json(nullptr);
  return j;
}

}  // namespace tpot
