#pragma once

// Internal helpers shared by the file-format code.

#include <charconv>
#include <filesystem>
#include <string>
#include <string_view>
#include <system_error>

#include <json.hpp>

#include "tcal/error.hpp"

namespace tcal::detail {

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, std::string_view text);

/// Parse JSON, mapping nlohmann's byte offset onto a 1-based line number.
nlohmann::json parse_json(std::string_view text);

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Fetch a required member, raising SchemaError naming `context`.
const nlohmann::json &require(const nlohmann::json &obj, const char *key,
                              std::string_view context);

} // namespace tcal::detail
