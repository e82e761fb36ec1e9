#include "treadmill/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "treadmill/errors.hpp"

namespace treadmill {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto result = std::from_chars(s.data(), end, out);
  return result.ec == std::errc() && result.ptr == end;
}

}  // namespace

int CsvTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  const int idx = find(name);
  if (idx < 0) throw ParseError("missing column '" + name + "'");
  return columns[static_cast<std::size_t>(idx)];
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  if (text.rfind("\xEF\xBB\xBF", 0) == 0)
    throw ParseError(fmt::format("{}: row 1: byte-order mark not accepted", source));

  CsvTable table;
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++row;
    if (!line.empty() && line.back() == '\r')
      throw ParseError(fmt::format("{}: row {}: CR line ending, expected LF", source, row));
    if (line.empty()) {
      if (pos >= text.size()) break;
      throw ParseError(fmt::format("{}: row {}: empty line", source, row));
    }

    auto fields = split_fields(line);
    if (table.header.empty()) {
      for (std::size_t c = 0; c < fields.size(); ++c) {
        auto name = trim(fields[c]);
        if (name.empty())
          throw ParseError(fmt::format("{}: row 1, column {}: empty header field", source, c + 1));
        double dummy = 0.0;
        if (parse_double(name, dummy))
          throw ParseError(fmt::format("{}: row 1, column {}: header missing (numeric field '{}')",
                                       source, c + 1, name));
        table.header.emplace_back(name);
      }
      table.columns.resize(table.header.size());
      continue;
    }
    if (fields.size() != table.header.size())
      throw ParseError(fmt::format("{}: row {}: expected {} columns, found {}", source, row,
                                   table.header.size(), fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v))
        throw ParseError(fmt::format("{}: row {}, column {} ('{}'): cannot parse '{}'", source, row,
                                     c + 1, table.header[c], fields[c]));
      table.columns[c].push_back(v);
    }
  }
  if (table.header.empty()) throw ParseError(source + ": empty file, header row is mandatory");
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

CsvTable read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text_file(path), path.string());
}

std::string format_number(double v) { return fmt::format("{}", v); }

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c) out += ',';
    out += table.header[c];
  }
  out += '\n';
  const std::size_t rows = table.rows();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out += ',';
      out += format_number(table.columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_text_file(path, format_csv(table));
}

}  // namespace treadmill
