#include "oracles.hpp"

#include <gdsvd/matrix_market.hpp>
#include <gdsvd/serialize.hpp>

#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gdsvd;

namespace {

LoadedMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_market(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const MatrixMarketError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST(MatrixMarket, ArraySymmetricTwoByTwo) {
  const LoadedMatrix m = parse(
      "%%MatrixMarket matrix array real symmetric\n"
      "2 2\n"
      "2\n1\n2\n");
  ASSERT_TRUE(std::holds_alternative<DenseSymMatrix>(m));
  const Spectrum s = jacobi_eigh(std::get<DenseSymMatrix>(m));
  EXPECT_NEAR(s.values[0], 3.0, 1e-14);
  EXPECT_NEAR(s.values[1], 1.0, 1e-14);
}

TEST(MatrixMarket, CoordinateLowerTriangleIsMirrored) {
  const LoadedMatrix m = parse(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "% a comment\n"
      "3 3 4\n"
      "1 1 4.0\n"
      "2 1 -1.5\n"
      "3 2 2.0\n"
      "3 3 1.0\n");
  const RowMatrix& v = std::get<DenseSymMatrix>(m).values();
  RowMatrix expected(3, 3);
  expected << 4.0, -1.5, 0.0, -1.5, 0.0, 2.0, 0.0, 2.0, 1.0;
  EXPECT_EQ(v, expected);
}

TEST(MatrixMarket, GeneralFileGivesPlainMatrix) {
  const LoadedMatrix m = parse(
      "%%MatrixMarket matrix array real general\n"
      "2 3\n"
      "1\n2\n3\n4\n5\n6\n");
  ASSERT_TRUE(std::holds_alternative<Matrix>(m));
  Matrix expected(2, 3);
  expected << 1, 3, 5, 2, 4, 6;
  EXPECT_EQ(std::get<Matrix>(m), expected);
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
  EXPECT_THROW(parse(""), MatrixMarketError);
  EXPECT_EQ(error_line(""), 1u);
  EXPECT_EQ(error_line("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 3\n"), 3u);
  EXPECT_EQ(error_line("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"), 3u);
  EXPECT_EQ(error_line("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n"), 6u);
  EXPECT_EQ(error_line("%%MatrixMarket matrix array real general\n1 1\n1\n2\n"), 4u);
}

TEST(MatrixMarket, UnsupportedFields) {
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate integer general\n1 1 1\n1 1 1\n"), UnsupportedFormatError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"), UnsupportedFormatError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"), UnsupportedFormatError);
  EXPECT_THROW(parse("%%MatrixMarket matrix array real skew-symmetric\n2 2\n1\n"), UnsupportedFormatError);
}

TEST(MatrixMarket, WriteThenReadIsExact) {
  const Matrix a = oracle::random_symmetric(5, 3);
  std::stringstream buf;
  write_matrix_market(buf, a, true);
  const LoadedMatrix back = read_matrix_market(buf);
  EXPECT_EQ(Matrix(std::get<DenseSymMatrix>(back).values()), a);

  const Matrix g = oracle::random_matrix(3, 4, 9);
  std::stringstream buf2;
  write_matrix_market(buf2, g, false);
  EXPECT_EQ(std::get<Matrix>(read_matrix_market(buf2)), g);
}

TEST(MatrixMarket, LoadFromDisk) {
  const auto path = std::filesystem::temp_directory_path() / "gdsvd_io_test.mtx";
  {
    std::ofstream out(path);
    out << "%%MatrixMarket matrix array real symmetric\n2 2\n2\n1\n2\n";
  }
  EXPECT_TRUE(std::holds_alternative<DenseSymMatrix>(load_matrix_market(path)));
  std::filesystem::remove(path);
  EXPECT_THROW(load_matrix_market(path), MatrixMarketError);
}

TEST(Serialize, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Serialize, KsvdResultJsonShape) {
  KsvdResult r;
  r.method = Method::Power;
  r.pairs.push_back({2.5, Vector::Unit(2, 0)});
  r.per_pair_iterations = {7};
  r.total_matvecs = 9;
  const nlohmann::json j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j["method"], "power");
  EXPECT_EQ(j["converged"], true);
  EXPECT_EQ(j["pairs"][0]["sigma"], 2.5);
  EXPECT_EQ(j["pairs"][0]["u"].size(), 2u);
  EXPECT_EQ(j["iterations"][0], 7);
  EXPECT_EQ(j["matvecs"], 9);
}

TEST(Serialize, SpectrumRoundTripIsExact) {
  const Spectrum s = jacobi_eigh(oracle::random_symmetric(4, 2));
  const Spectrum back = spectrum_from_json(to_json(s, 2));
  EXPECT_EQ(back.values, s.values);
  EXPECT_EQ(back.vectors, s.vectors);
  EXPECT_THROW(spectrum_from_json("{\"values\": [1]}"), std::exception);
}

TEST(Serialize, TraceCsvRoundTrip) {
  TraceRecord a;
  a.t = 0;
  a.norm_x = 1.25;
  a.cos_theta1 = 0.5;
  TraceRecord b;
  b.t = 1;
  b.norm_x = 1.0 / 3.0;
  b.eps_u = 1e-9;
  b.eps_sigma = 2e-9;
  b.grad_norm = 0.1;
  std::stringstream buf;
  buf << "# manifest {}\n";
  write_trace_csv(buf, {{a}, {b}});
  const auto rows = read_trace_csv(buf);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].pair, 0u);
  EXPECT_EQ(rows[1].pair, 1u);
  EXPECT_EQ(rows[0].record.cos_theta1, 0.5);
  EXPECT_FALSE(rows[0].record.eps_u.has_value());
  EXPECT_EQ(rows[1].record.norm_x, 1.0 / 3.0);
  EXPECT_EQ(rows[1].record.eps_sigma, 2e-9);

  std::istringstream bad("pair,t\n1,2\n");
  EXPECT_THROW(read_trace_csv(bad), std::runtime_error);
}
