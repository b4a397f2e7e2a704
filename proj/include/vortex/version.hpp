#pragma once

namespace vortex {

inline constexpr const char* tool_name = "vortexdiag";
inline constexpr const char* tool_version = "0.1.0";
inline constexpr int report_schema_version = 1;

}  // namespace vortex
