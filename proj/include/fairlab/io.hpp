#pragma once

// Dataset CSV interchange (`g,v,y,w`) and DatasetSpec JSON.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairlab/dataset.hpp"
#include "fairlab/errors.hpp"

namespace fairlab {

// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, end);
}

inline constexpr std::string_view kCsvHeader = "g,v,y,w";

inline void write_csv(const Dataset& data, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : data.records) {
    os << r.g << ',' << format_double(r.v) << ',' << r.y << ',' << format_double(r.w) << '\n';
  }
}

inline std::string to_csv(const Dataset& data) {
  std::ostringstream os;
  write_csv(data, os);
  return os.str();
}

inline void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(data, os);
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

namespace detail {

inline std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view field, const char* name, std::size_t line) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(std::string("malformed ") + name + " value '" + std::string(field) + "'", line);
  }
  return x;
}

inline int parse_binary(std::string_view field, const char* name, std::size_t line) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw ParseError(std::string(name) + " must be 0 or 1, got '" + std::string(field) + "'", line);
}

}  // namespace detail

inline Dataset parse_csv(std::istream& is, std::string provenance = {}) {
  Dataset data;
  data.provenance = std::move(provenance);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw ParseError("missing header", 1);
  ++line_no;
  if (detail::trim_cr(line) != kCsvHeader) {
    throw ParseError("header must be exactly 'g,v,y,w'", line_no);
  }
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view row = detail::trim_cr(line);
    if (row.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = row.find(',', start);
      fields.push_back(row.substr(start, comma == std::string_view::npos ? row.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line_no);
    }
    Record r;
    r.g = detail::parse_binary(fields[0], "g", line_no);
    r.v = detail::parse_real(fields[1], "v", line_no);
    r.y = detail::parse_binary(fields[2], "y", line_no);
    r.w = detail::parse_real(fields[3], "w", line_no);
    if (!std::isfinite(r.v)) throw ParseError("v must be finite", line_no);
    if (!(r.w >= 0.0) || !std::isfinite(r.w)) throw ParseError("w must be finite and nonnegative", line_no);
    data.records.push_back(r);
  }
  return data;
}

inline Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "': file not found or unreadable");
  return parse_csv(is, path.stem().string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "': file not found or unreadable");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

// Pretty-printed, key-sorted, newline-terminated.
inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void to_json(nlohmann::json& j, const GroupSpec& g) {
  j = {{"group_id", g.group_id}, {"size", g.size}, {"mean", g.mean}, {"std", g.std},
       {"p_favorable", g.p_favorable}};
}

inline void from_json(const nlohmann::json& j, GroupSpec& g) {
  j.at("group_id").get_to(g.group_id);
  j.at("size").get_to(g.size);
  j.at("mean").get_to(g.mean);
  j.at("std").get_to(g.std);
  j.at("p_favorable").get_to(g.p_favorable);
}

inline void to_json(nlohmann::json& j, const DatasetSpec& s) {
  j = {{"name", s.name}, {"seed", s.seed}, {"groups", s.groups}};
}

inline void from_json(const nlohmann::json& j, DatasetSpec& s) {
  j.at("name").get_to(s.name);
  s.seed = j.value("seed", std::uint64_t{0});
  j.at("groups").get_to(s.groups);
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig(what + ": " + e.what());
  }
}

inline DatasetSpec read_spec(const std::filesystem::path& path) {
  const auto j = parse_json_text(read_text_file(path), path.string());
  DatasetSpec spec;
  try {
    spec = j.get<DatasetSpec>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(path.string() + ": " + e.what());
  }
  validate(spec);
  return spec;
}

}  // namespace fairlab
