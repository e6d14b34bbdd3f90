#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace ineq {

std::string tool_version();

/// Serializes with lexicographically ordered keys and floats at 17
/// significant digits, so equal payloads are byte-identical.
std::string dump_json(const nlohmann::json& j, int indent = 2);

std::uint64_t fnv1a(std::string_view s);

/// Deterministic envelope: version, command echo, seed, config digest,
/// payload. Wall time is deliberately not part of it.
nlohmann::json run_report(const std::string& command, std::uint64_t seed,
                          nlohmann::json payload);

}  // namespace ineq
