#pragma once

#include <istream>
#include <string>
#include <vector>

#include "eigcoint/covstack.hpp"

namespace eigcoint {

/// Rows are time points and columns are series. The first row is treated as
/// a header when any of its cells is not a number. Cells are comma separated
/// with '.' as decimal point; missing cells are an error.
struct CsvPanel {
  std::vector<std::string> header;
  SeriesMatrix<double> panel;
};

/// Throws ParseError naming the 1-based line and column of the first bad cell.
CsvPanel read_panel_csv(std::istream& in);
CsvPanel read_panel_csv(const std::string& path);

/// Writes `m` with full round-trip precision, optionally preceded by a header.
void write_matrix_csv(std::ostream& out, const Matrix<double>& m,
                      const std::vector<std::string>& header = {});

}  // namespace eigcoint
