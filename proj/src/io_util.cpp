#include "io_util.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tcal::detail {

std::string read_text_file(const std::filesystem::path &path) {
  if (path.empty())
    throw IoError("empty path");
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad())
    throw IoError("read failed on '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path &path, std::string_view text) {
  if (path.empty())
    throw IoError("empty path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out)
    throw IoError("write failed on '" + path.string() + "'");
}

nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error &e) {
    // e.byte is 1-based and may point one past the end
    const auto end = std::min<std::size_t>(e.byte, text.size());
    const auto line =
        1 + static_cast<std::size_t>(std::count(text.begin(),
                                                text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
    std::string msg = e.what();
    if (auto pos = msg.find("parse error"); pos != std::string::npos)
      msg = msg.substr(pos);
    throw ParseError(msg, line);
  }
}

const nlohmann::json &require(const nlohmann::json &obj, const char *key,
                              std::string_view context) {
  if (!obj.is_object())
    throw SchemaError(std::string(context) + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError(std::string(context) + ": missing field '" + key + "'");
  return *it;
}

} // namespace tcal::detail
