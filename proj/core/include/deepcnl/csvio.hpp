#ifndef DEEPCNL_CSVIO_HPP
#define DEEPCNL_CSVIO_HPP

#include <string>
#include <vector>

namespace deepcnl {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by header name, -1 if absent.
  int column(const std::string& name) const;
};

/// Reads a comma-separated file with a header row. Lines starting with '#'
/// and blank lines are skipped (provenance comments).
CsvTable read_csv(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

/// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);

}  // namespace deepcnl

#endif  // DEEPCNL_CSVIO_HPP
