#include "s3tori/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace s3tori {

using nlohmann::json;

json to_json(const Vec4& x) { return json::array({x[0], x[1], x[2], x[3]}); }

json to_json(const IntersectionCurve& c, bool with_points) {
  json j{{"winding", {c.winding[0], c.winding[1]}},
         {"length", c.length},
         {"max_curvature", c.max_curvature},
         {"min_curvature", c.min_curvature},
         {"tangencies", c.tangencies}};
  json pts = json::array();
  if (with_points) {
    for (const auto& p : c.points) pts.push_back({p.u, p.v, p.x[0], p.x[1], p.x[2], p.x[3]});
  }
  j["points"] = std::move(pts);
  return j;
}

json to_json(const TangencyPoint& t) {
  return {{"u", t.u},
          {"v", t.v},
          {"x", to_json(t.x)},
          {"value", t.value},
          {"grad_norm", t.grad_norm},
          {"hessian", {t.hessian(0, 0), t.hessian(0, 1), t.hessian(1, 1)}},
          {"saddle", t.is_saddle()}};
}

json to_json(const IntersectionReport& r, bool with_points) {
  json curves = json::array();
  for (const auto& c : r.curves) curves.push_back(to_json(c, with_points));
  json tangencies = json::array();
  for (const auto& t : r.tangencies) tangencies.push_back(to_json(t));
  return {{"equator", to_json(r.equator)},
          {"type", static_cast<int>(r.type)},
          {"type_name", to_string(r.type)},
          {"curves", std::move(curves)},
          {"tangencies", std::move(tangencies)},
          {"crossing_angles", r.crossing_angles},
          {"component_count", r.component_count},
          {"resolution", r.resolution},
          {"newton_divergences", r.newton_divergences}};
}

json to_json(const ScanReport& r) {
  json counts = json::object();
  for (const auto& [k, n] : r.count_histogram) counts[std::to_string(k)] = n;
  json failures = json::array();
  for (const auto& f : r.failures) {
    json e{{"index", f.index}, {"pole", to_json(f.pole)}, {"count", f.count}};
    if (!f.error.empty()) e["error"] = f.error;
    failures.push_back(std::move(e));
  }
  json j{{"samples", r.samples},
         {"seed", r.seed},
         {"resolution", r.resolution},
         {"pass", r.pass},
         {"count_histogram", std::move(counts)},
         {"failures", std::move(failures)}};
  if (!r.type_histogram.empty()) j["type_histogram"] = r.type_histogram;
  return j;
}

json to_json(const SpectralResult& r) {
  json groups = json::array();
  for (const auto& g : r.groups) {
    groups.push_back({{"first", g.first}, {"size", g.size}, {"mean", g.mean}});
  }
  return {{"eigenvalues", r.eigenvalues},
          {"multiplicity_groups", std::move(groups)},
          {"residuals", r.residuals},
          {"resolution", {r.n_u, r.n_v}},
          {"iterations", r.iterations}};
}

json to_json(const HolderReport& r) {
  return {{"alpha", r.alpha},
          {"sup_term", r.sup_term},
          {"grad_term", r.grad_term},
          {"hess_term", r.hess_term},
          {"seminorm_term", r.seminorm_term},
          {"total", r.total},
          {"samples", r.samples},
          {"pairs", r.pairs},
          {"seed", r.seed},
          {"seminorm_is_lower_bound", true}};
}

json to_json(const TauReport& r) {
  return {{"tau", r.tau}, {"forward", to_json(r.forward)}, {"inverse", to_json(r.inverse)}};
}

json to_json(const MontielRosReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"lambda1", r.lambda1},
          {"margin", r.margin},
          {"coordinate_residual", r.coordinate_residual},
          {"lower_bound_warning", r.lower_bound_warning}};
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp);
    os << contents;
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

}  // namespace s3tori
