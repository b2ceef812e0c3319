#include <gtest/gtest.h>

#include <sstream>

#include "eigcoint/csv_io.hpp"

using namespace eigcoint;

namespace {

std::string parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_panel_csv(in);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

}  // namespace

TEST(ReadPanelCsv, HeaderDetected) {
  std::istringstream in("a,b\n1,2\n3,4.5\n");
  const auto csv = read_panel_csv(in);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(csv.panel.n(), 2);
  EXPECT_EQ(csv.panel.data()(1, 1), 4.5);
}

TEST(ReadPanelCsv, NoHeaderAndBom) {
  std::istringstream in("\xEF\xBB\xBF" "1,2\r\n-3e2,4\r\n");
  const auto csv = read_panel_csv(in);
  EXPECT_TRUE(csv.header.empty());
  EXPECT_EQ(csv.panel.data()(1, 0), -300.0);
}

TEST(ReadPanelCsv, ErrorsNameLineAndColumn) {
  EXPECT_NE(parse_error("x,y\n1,2\n3,abc\n").find("line 3, column 2"), std::string::npos);
  EXPECT_NE(parse_error("x,y\n1,2\n3\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("x,y\n1,\n2,3\n").find("line 2, column 2"), std::string::npos);
  EXPECT_NE(parse_error("x,y\n1,nan\n2,3\n").find("line 2, column 2"), std::string::npos);
}

TEST(ReadPanelCsv, TooFewRows) {
  std::istringstream in("a,b\n1,2\n");
  EXPECT_THROW(read_panel_csv(in), Error);
}

TEST(WriteMatrixCsv, RoundTripsExactly) {
  Matrix<double> m(2, 2);
  m << 0.1, 1.0 / 3.0, -2e-300, 12345.678901234567;
  std::ostringstream out;
  write_matrix_csv(out, m, {"u", "v"});
  std::istringstream in(out.str());
  const auto csv = read_panel_csv(in);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"u", "v"}));
  EXPECT_EQ(csv.panel.data(), m);
}
