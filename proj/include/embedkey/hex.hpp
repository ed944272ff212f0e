#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace embedkey {

using Bytes = std::vector<std::uint8_t>;

/// Lowercase hex.
std::string to_hex(std::span<const std::uint8_t> bytes);

/// Accepts upper or lower case; throws FormatError(field) on odd length or a
/// non-hex character.
Bytes from_hex(std::string_view text, const std::string& field = "hex");

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

} // namespace embedkey
