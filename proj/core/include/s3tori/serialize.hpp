#pragma once

// JSON views of the report types. Objects use nlohmann::json, whose keys are
// sorted, so equal reports dump to identical bytes.

#include <string>

#include <nlohmann/json.hpp>

#include "s3tori/deform.hpp"
#include "s3tori/intersection.hpp"
#include "s3tori/spectral.hpp"

namespace s3tori {

nlohmann::json to_json(const Vec4& x);

// Curve points are included as [u, v, x0, x1, x2, x3] rows when requested.
nlohmann::json to_json(const IntersectionCurve& c, bool with_points = true);
nlohmann::json to_json(const TangencyPoint& t);
nlohmann::json to_json(const IntersectionReport& r, bool with_points = true);
nlohmann::json to_json(const ScanReport& r);
nlohmann::json to_json(const SpectralResult& r);
nlohmann::json to_json(const HolderReport& r);
nlohmann::json to_json(const TauReport& r);
nlohmann::json to_json(const MontielRosReport& r);

// Writes `contents` to a sibling temporary and renames it over `path`.
// Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace s3tori
