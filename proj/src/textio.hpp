#pragma once

// Private helpers shared by the file readers and writers.

#include <filesystem>
#include <string>

#include <json.hpp>

namespace embedkey::detail {

/// Whole file as a string; IoError("file not found: ...") when missing.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// 17 significant digits, enough to round-trip any double exactly.
/// Throws std::invalid_argument for non-finite values.
std::string format_double(double v);

/// Parses JSON text; FormatError("json") on syntax errors.
nlohmann::json parse_json(const std::string& text, const std::string& what);

const nlohmann::json& require(const nlohmann::json& obj, const char* field);
double require_number(const nlohmann::json& v, const std::string& field);
std::uint64_t require_unsigned(const nlohmann::json& v, const std::string& field);
const std::string& require_string(const nlohmann::json& v, const std::string& field);

} // namespace embedkey::detail
