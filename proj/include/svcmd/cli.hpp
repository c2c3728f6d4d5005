#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "svcmd/scalable_encoder.hpp"

namespace svcmd {

/// "28" -> uniform point; "24/28/32" -> BL/EL1/EL2.
QpPoint parse_qp_point(std::string_view text);

/// report.json -> report.baseline.json
std::filesystem::path with_strategy_suffix(const std::filesystem::path& path, Strategy strategy);

// Entry point of the svcmd tool. Returns the process exit code: 0 on success,
// 1 on runtime errors, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace svcmd
