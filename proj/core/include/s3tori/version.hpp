#pragma once

namespace s3tori {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace s3tori
