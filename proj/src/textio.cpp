#include "textio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "embedkey/error.hpp"

namespace embedkey::detail {

std::string read_text_file(const std::filesystem::path& path)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw IoError("file not found: " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << text;
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

std::string format_double(double v)
{
    if (!std::isfinite(v)) throw std::invalid_argument("cannot serialize a non-finite value");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json parse_json(const std::string& text, const std::string& what)
{
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("json", what + ": malformed JSON (" + e.what() + ")");
    }
}

const nlohmann::json& require(const nlohmann::json& obj, const char* field)
{
    if (!obj.is_object()) throw FormatError("json", "expected a JSON object");
    auto it = obj.find(field);
    if (it == obj.end()) throw FormatError(field, std::string("missing field '") + field + "'");
    return *it;
}

double require_number(const nlohmann::json& v, const std::string& field)
{
    if (!v.is_number()) throw FormatError(field, "field '" + field + "' must be a number");
    return v.get<double>();
}

std::uint64_t require_unsigned(const nlohmann::json& v, const std::string& field)
{
    if (!v.is_number_unsigned())
        throw FormatError(field, "field '" + field + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

const std::string& require_string(const nlohmann::json& v, const std::string& field)
{
    if (!v.is_string()) throw FormatError(field, "field '" + field + "' must be a string");
    return v.get_ref<const std::string&>();
}

} // namespace embedkey::detail
