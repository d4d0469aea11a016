#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "io_util.hpp"
#include "tcal/acquisition.hpp"
#include "tcal/error.hpp"

namespace tcal {

namespace {

template <class T>
T parse_field(std::string_view field, std::size_t line, const char *name) {
  T value{};
  const auto *first = field.data();
  const auto *last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError("bad value '" + std::string(field) + "' in column " + name,
                     line);
  return value;
}

} // namespace

void write_log(std::span<const SyncedRecord> records, std::ostream &out) {
  std::string buf;
  buf.reserve(64 * records.size() + 64);
  buf.append(kLogMagic).push_back('\n');
  buf.append(kLogColumns).push_back('\n');
  for (const auto &r : records) {
    if (!r.force_N.allFinite())
      throw ValidationError("record at t_us=" + std::to_string(r.t_us) +
                            " has a non-finite force");
    buf += std::to_string(r.t_us);
    buf += ',';
    buf += std::to_string(r.taxel_id);
    for (int i = 0; i < 3; ++i) {
      buf += ',';
      buf += std::to_string(r.counts[i]);
    }
    for (int i = 0; i < 3; ++i) {
      buf += ',';
      buf += detail::format_double(r.force_N[i]);
    }
    buf += ',';
    buf += std::to_string(r.skew_us);
    buf += r.clamp_flag ? ",1\n" : ",0\n";
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out)
    throw IoError("failed writing log stream");
}

void write_log(std::span<const SyncedRecord> records,
               const std::filesystem::path &path) {
  if (path.empty())
    throw IoError("empty path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  write_log(records, out);
}

std::vector<SyncedRecord> read_log(std::istream &in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line))
      return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    return true;
  };

  if (!next() || line != kLogMagic)
    throw SchemaError("not a tcal log: expected header '" +
                      std::string(kLogMagic) + "', found '" + line + "'");
  if (!next() || line != kLogColumns)
    throw SchemaError("tcal log column mismatch: expected '" +
                      std::string(kLogColumns) + "', found '" + line + "'");

  std::vector<SyncedRecord> records;
  while (next()) {
    if (line.empty())
      continue;
    std::string_view rest = line;
    std::string_view f[10];
    std::size_t n = 0;
    while (true) {
      const auto comma = rest.find(',');
      if (n == 10)
        throw ParseError("expected 10 columns, found more", lineno);
      f[n++] = rest.substr(0, comma);
      if (comma == std::string_view::npos)
        break;
      rest.remove_prefix(comma + 1);
    }
    if (n != 10)
      throw ParseError("expected 10 columns, found " + std::to_string(n), lineno);

    SyncedRecord r;
    r.t_us = parse_field<std::int64_t>(f[0], lineno, "t_us");
    r.taxel_id = parse_field<int>(f[1], lineno, "taxel");
    r.counts = {parse_field<int>(f[2], lineno, "cx"),
                parse_field<int>(f[3], lineno, "cy"),
                parse_field<int>(f[4], lineno, "cz")};
    r.force_N = {parse_field<double>(f[5], lineno, "fx"),
                 parse_field<double>(f[6], lineno, "fy"),
                 parse_field<double>(f[7], lineno, "fz")};
    if (!r.force_N.allFinite())
      throw ParseError("non-finite force", lineno);
    r.skew_us = parse_field<std::int64_t>(f[8], lineno, "skew_us");
    const int clamp = parse_field<int>(f[9], lineno, "clamp");
    if (clamp != 0 && clamp != 1)
      throw ParseError("clamp must be 0 or 1", lineno);
    r.clamp_flag = clamp == 1;
    records.push_back(r);
  }
  if (in.bad())
    throw IoError("failed reading log stream");
  return records;
}

std::vector<SyncedRecord> read_log(const std::filesystem::path &path) {
  if (path.empty())
    throw IoError("empty path");
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "' for reading");
  return read_log(in);
}

} // namespace tcal
