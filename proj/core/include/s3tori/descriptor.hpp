#pragma once

// Surface descriptors:
//   clifford
//   homogeneous:<r>
//   cyclide:<name>  or  cyclide:<R>,<r>,<c>
//   perturbed:<base>:bump=<m>,<k>,<amp>,<phase>[;...]
//   perturbed:<base>:<bump-file.json>
//   <descriptor-file.json>
// The bump part of a perturbed descriptor is everything after the last ':'.

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "s3tori/surface.hpp"

namespace s3tori {

// Named cyclides. "default" has S < 0 everywhere; "elliptic" is a thin tube
// with elliptic points lying in a small cap of S^3.
const std::map<std::string, CyclideParams>& cyclide_presets();

// Throws ParseError on malformed input.
SurfacePtr parse_surface(const std::string& descriptor);

// {"kind": ..., ...}; "base" is a descriptor string or object, "bump" a list
// of [m, k, amplitude, phase].
SurfacePtr surface_from_json(const nlohmann::json& j);

TrigBump parse_bump(const std::string& spec);
TrigBump bump_from_json(const nlohmann::json& j);

}  // namespace s3tori
