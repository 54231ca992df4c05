#include "s3tori/descriptor.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <vector>

#include "s3tori/errors.hpp"

namespace s3tori {

namespace {

double to_double(const std::string& s, const std::string& what) {
  double x = 0;
  const char* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x)) {
    throw ParseError("invalid number '" + s + "' in " + what);
  }
  return x;
}

int to_int(const std::string& s, const std::string& what) {
  int x = 0;
  const char* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end) throw ParseError("invalid integer '" + s + "' in " + what);
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto k = s.find(sep, start);
    out.push_back(s.substr(start, k == std::string::npos ? std::string::npos : k - start));
    if (k == std::string::npos) break;
    start = k + 1;
  }
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Wraps construction errors of well-formed but invalid parameters.
template <class F>
SurfacePtr build(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const std::domain_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace

const std::map<std::string, CyclideParams>& cyclide_presets() {
  static const std::map<std::string, CyclideParams> presets{
      {"default", {1.5, 1.0, 0.3}},
      {"elliptic", {3.0, 0.3, 1.0}},
  };
  return presets;
}

TrigBump bump_from_json(const nlohmann::json& j) {
  const nlohmann::json& terms = j.is_object() ? j.at("bump") : j;
  if (!terms.is_array()) throw ParseError("bump must be a list of [m, k, amplitude, phase]");
  std::vector<BumpTerm> out;
  try {
    for (const auto& t : terms) {
      if (!t.is_array() || t.size() != 4) {
        throw ParseError("bump term must be [m, k, amplitude, phase]");
      }
      out.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>(), t[3].get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad bump term: ") + e.what());
  }
  return TrigBump(std::move(out));
}

TrigBump parse_bump(const std::string& spec) {
  const std::string prefix = "bump=";
  if (spec.rfind(prefix, 0) != 0) return bump_from_json(read_json(spec));
  std::vector<BumpTerm> out;
  for (const auto& term : split(spec.substr(prefix.size()), ';')) {
    const auto f = split(term, ',');
    if (f.size() != 4) throw ParseError("bump term '" + term + "' needs m,k,amplitude,phase");
    out.push_back({to_int(f[0], "bump"), to_int(f[1], "bump"), to_double(f[2], "bump"),
                   to_double(f[3], "bump")});
  }
  return TrigBump(std::move(out));
}

SurfacePtr surface_from_json(const nlohmann::json& j) {
  try {
    if (j.is_string()) return parse_surface(j.get<std::string>());
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "clifford") return clifford_torus();
    if (kind == "homogeneous") {
      const double r = j.at("r").get<double>();
      return build("homogeneous", [&] { return homogeneous_torus(r); });
    }
    if (kind == "cyclide") {
      if (j.contains("name")) return parse_surface("cyclide:" + j.at("name").get<std::string>());
      const CyclideParams p{j.at("R").get<double>(), j.at("r").get<double>(),
                            j.value("c", 0.0)};
      return build("cyclide", [&] { return cyclide_torus(p); });
    }
    if (kind == "perturbed") {
      return perturb_normal(surface_from_json(j.at("base")), bump_from_json(j.at("bump")));
    }
    throw ParseError("unknown surface kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad surface description: ") + e.what());
  }
}

SurfacePtr parse_surface(const std::string& d) {
  if (d == "clifford") return clifford_torus();
  if (ends_with(d, ".json") && d.find(':') == std::string::npos) {
    return surface_from_json(read_json(d));
  }
  const auto colon = d.find(':');
  const std::string head = d.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : d.substr(colon + 1);
  if (head == "homogeneous" && !rest.empty()) {
    const double r = to_double(rest, d);
    return build(d, [&] { return homogeneous_torus(r); });
  }
  if (head == "cyclide" && !rest.empty()) {
    const auto& presets = cyclide_presets();
    if (const auto it = presets.find(rest); it != presets.end()) return cyclide_torus(it->second);
    const auto f = split(rest, ',');
    if (f.size() != 3) throw ParseError("cyclide needs a preset name or R,r,c: " + d);
    const CyclideParams p{to_double(f[0], d), to_double(f[1], d), to_double(f[2], d)};
    return build(d, [&] { return cyclide_torus(p); });
  }
  if (head == "perturbed") {
    const auto last = d.rfind(':');
    if (last <= colon) throw ParseError("perturbed needs <base>:<bump>: " + d);
    const SurfacePtr base = parse_surface(d.substr(colon + 1, last - colon - 1));
    return perturb_normal(base, parse_bump(d.substr(last + 1)));
  }
  throw ParseError("unknown surface descriptor '" + d + "'");
}

}  // namespace s3tori
