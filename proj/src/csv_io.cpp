#include "eigcoint/csv_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

namespace eigcoint {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (used != cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

CsvPanel read_panel_csv(std::istream& in) {
  CsvPanel out;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (first && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    if (first) {
      first = false;
      width = cells.size();
      bool numeric = true;
      for (const auto& c : cells) numeric = numeric && parse_number(c).has_value();
      if (!numeric) {
        out.header = cells;
        continue;
      }
    }
    if (cells.size() != width) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(width) + " cells, found " +
                                        std::to_string(cells.size()));
    }
    std::vector<double> row(width);
    for (std::size_t k = 0; k < width; ++k) {
      const auto v = parse_number(cells[k]);
      if (!v) {
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ", column " +
                                          std::to_string(k + 1) + ": not a number: '" +
                                          cells[k] + "'");
      }
      row[k] = *v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2 || width == 0) {
    throw Error(Errc::ParseError, "need at least 2 data rows and 1 column");
  }
  Matrix<double> m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t k = 0; k < width; ++k)
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = rows[t][k];
  out.panel = SeriesMatrix<double>(m);
  return out;
}

CsvPanel read_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
  return read_panel_csv(in);
}

void write_matrix_csv(std::ostream& out, const Matrix<double>& m,
                      const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
  }
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) out << (k ? "," : "") << m(t, k);
    out << '\n';
  }
}

}  // namespace eigcoint
