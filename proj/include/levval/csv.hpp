#pragma once

#include <string>
#include <vector>

#include "levval/linalg.hpp"

namespace levval {

/// Parsed CSV: numeric body plus the optional header row. The first row is
/// taken as the header exactly when at least one of its cells fails to parse
/// as a number; an all-numeric header is therefore indistinguishable from
/// data and is read as data.
struct CsvTable {
  std::vector<std::string> header;  // empty when the file has no header row
  Matrix values;
};

/// Features plus the integer label column extracted from a CsvTable.
struct LabeledTable {
  Matrix features;
  std::vector<int> labels;
};

/// Parse CSV text: comma separator, decimal-point reals, optional single
/// header row, LF or CRLF line endings. Every row must have the same column
/// count. Throws ParseError naming the 1-based line (and column) at fault.
CsvTable parse_csv(const std::string& text);

/// parse_csv over the file's bytes. Throws ParseError if unreadable.
CsvTable load_csv(const std::string& path);

/// Select the label column by header name first, then by 0-based index.
/// Label cells must be non-negative integers (within 1e-9); the remaining
/// columns become the feature matrix, which must be non-empty.
LabeledTable split_target(const CsvTable& table, const std::string& target);

/// Shortest round-trip formatting: parse_csv(format_csv(m)) reproduces m
/// bit for bit. Rows end with a bare LF.
std::string format_csv(const Matrix& values,
                       const std::vector<std::string>& header = {});

/// format_csv to a file. Throws ParseError if the path is unwritable.
void save_csv(const std::string& path, const Matrix& values,
              const std::vector<std::string>& header = {});

}  // namespace levval
