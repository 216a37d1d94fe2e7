#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace deconf::csv {

struct Table {
  Eigen::MatrixXd values;
  std::vector<std::string> columns;
};

// CSV with one header row, comma separated, '.' decimal point.  Every cell
// must parse as a finite double; errors carry the 1-based (row, col) of the
// offending cell.
Table read_table(const std::string& path);

// Doubles are written with 17 significant digits so a read round-trips
// bit-exactly.
void write_table(const std::string& path, const Eigen::MatrixXd& values,
                 const std::vector<std::string>& columns);

std::string format_double(double v);

}  // namespace deconf::csv
