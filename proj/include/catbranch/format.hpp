#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace catbranch {

/// Shortest round-trip decimal representation; locale independent.
std::string format_double(double v);

double parse_double(std::string_view text, const char* what);
std::int64_t parse_int(std::string_view text, const char* what);
std::uint64_t parse_u64(std::string_view text, const char* what);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace catbranch
