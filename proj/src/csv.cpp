#include "levval/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "levval/errors.hpp"

namespace levval {

namespace {

std::string_view trim(std::string_view cell) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) {
    cell.remove_prefix(1);
  }
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) {
    cell.remove_suffix(1);
  }
  return cell;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc{} && result.ptr == last;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  // Lines keep their 1-based position in the original text; a single
  // trailing empty segment from a final newline is not a line.
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  {
    std::string_view rest{text};
    std::size_t number = 1;
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      std::string_view line =
          nl == std::string_view::npos ? rest : rest.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(number, line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
      ++number;
    }
    if (!lines.empty() && lines.back().second.empty()) lines.pop_back();
  }
  if (lines.empty()) {
    raise(Errc::ParseError, "empty CSV input");
  }

  CsvTable table;
  std::size_t first_data = 0;
  const auto first_cells = split_cells(lines[0].second);
  double probe = 0.0;
  bool all_numeric = true;
  for (std::string_view cell : first_cells) {
    if (!parse_double(cell, probe)) {
      all_numeric = false;
      break;
    }
  }
  if (!all_numeric) {
    for (std::string_view cell : first_cells) {
      table.header.emplace_back(cell);
    }
    first_data = 1;
  }
  if (first_data >= lines.size()) {
    raise(Errc::ParseError, "CSV has a header but no data rows");
  }

  const std::size_t cols = all_numeric
                               ? first_cells.size()
                               : table.header.size();
  const std::size_t rows = lines.size() - first_data;
  table.values.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& [line_number, line] = lines[first_data + r];
    const auto cells = split_cells(line);
    if (cells.size() != cols) {
      raise(Errc::ParseError,
            "line " + std::to_string(line_number) + ": expected " +
                std::to_string(cols) + " columns, got " +
                std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double value = 0.0;
      if (!parse_double(cells[c], value)) {
        raise(Errc::ParseError,
              "line " + std::to_string(line_number) + ", column " +
                  std::to_string(c + 1) + ": '" + std::string(cells[c]) +
                  "' is not a number");
      }
      table.values(static_cast<Index>(r), static_cast<Index>(c)) = value;
    }
  }
  return table;
}

CsvTable load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::ParseError, "cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

LabeledTable split_target(const CsvTable& table, const std::string& target) {
  const Index cols = table.values.cols();
  Index column = -1;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == target) {
      column = static_cast<Index>(i);
      break;
    }
  }
  if (column < 0) {
    Index parsed = 0;
    const char* first = target.data();
    const char* last = target.data() + target.size();
    const auto result = std::from_chars(first, last, parsed);
    if (result.ec != std::errc{} || result.ptr != last || parsed < 0 ||
        parsed >= cols) {
      raise(Errc::ParseError,
            "target column '" + target + "' matches no header name and is "
            "not a column index in [0, " + std::to_string(cols) + ")");
    }
    column = parsed;
  }
  if (cols < 2) {
    raise(Errc::ParseError, "need at least one feature column besides the target");
  }

  LabeledTable out;
  const Index n = table.values.rows();
  out.features.resize(n, cols - 1);
  out.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double raw = table.values(i, column);
    const double rounded = std::nearbyint(raw);
    if (!(std::abs(raw - rounded) <= 1e-9) || rounded < 0.0) {
      raise(Errc::ParseError,
            "row " + std::to_string(i) + ": target value " +
                std::to_string(raw) + " is not a non-negative integer");
    }
    out.labels[static_cast<std::size_t>(i)] = static_cast<int>(rounded);
    Index w = 0;
    for (Index c = 0; c < cols; ++c) {
      if (c == column) continue;
      out.features(i, w++) = table.values(i, c);
    }
  }
  return out;
}

std::string format_csv(const Matrix& values,
                       const std::vector<std::string>& header) {
  if (!header.empty() &&
      static_cast<Index>(header.size()) != values.cols()) {
    raise(Errc::ParseError, "header length must match column count");
  }
  std::string out;
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i > 0) out += ',';
      out += header[i];
    }
    out += '\n';
  }
  char buffer[64];
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out += ',';
      const auto result =
          std::to_chars(buffer, buffer + sizeof(buffer), values(i, j));
      out.append(buffer, result.ptr);
    }
    out += '\n';
  }
  return out;
}

void save_csv(const std::string& path, const Matrix& values,
              const std::vector<std::string>& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    raise(Errc::ParseError, "cannot write '" + path + "'");
  }
  out << format_csv(values, header);
  if (!out) {
    raise(Errc::ParseError, "write to '" + path + "' failed");
  }
}

}  // namespace levval
