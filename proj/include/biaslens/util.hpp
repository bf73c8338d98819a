#pragma once

#include <string>
#include <string_view>

namespace biaslens {

/// Shortest round-trip decimal form; non-finite values become "inf", "-inf"
/// or "nan".
std::string format_number(double v);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace biaslens
