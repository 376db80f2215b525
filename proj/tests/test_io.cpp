#include "doctest.h"

#include "txn/io.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace txn;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string &name) {
  const auto dir = fs::temp_directory_path() / "txn_test_io";
  fs::create_directories(dir);
  return dir / name;
}
} // namespace

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 20000; ++i) {
    const double v = std::ldexp(mant(gen), ex(gen));
    CHECK(parse_double(format_double(v)) == v);
  }
  for (double v : {0.0, -0.0, 1.0 / 3.0, std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max(), 0.1})
    CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK(parse_double("+2.5") == 2.5);
  CHECK_THROWS_AS(parse_double("2.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("csv quoting") {
  CHECK(quote_csv_field("plain") == "plain");
  CHECK(quote_csv_field("a,b") == "\"a,b\"");
  CHECK(quote_csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const auto f = split_csv_record("x,\"a,b\",\"q\"\"q\",");
  REQUIRE(f.size() == 4);
  CHECK(f[1] == "a,b");
  CHECK(f[2] == "q\"q");
  CHECK(f[3].empty());
  CHECK_THROWS(split_csv_record("\"open"));
}

TEST_CASE("csv tables round-trip losslessly") {
  CsvTable t;
  t.manifest = {{"command", "test"}, {"note", "a = b"}};
  t.columns = {"t", "odd, name", "v"};
  t.units = {"s", "", "1/m"};
  t.data.resize(50, 3);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd(0.0, 1e3);
  for (Eigen::Index i = 0; i < t.data.size(); ++i)
    t.data.data()[i] = nd(gen);
  t.data(3, 1) = std::nan("");
  const auto path = scratch("table.csv");
  write_csv(path, t);
  const auto back = read_csv(path);
  CHECK(back.columns == t.columns);
  CHECK(back.units == t.units);
  CHECK(back.manifest == t.manifest);
  REQUIRE(back.data.rows() == 50);
  for (Eigen::Index i = 0; i < t.data.size(); ++i) {
    const double a = t.data.data()[i], b = back.data.data()[i];
    CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
  }
  CHECK(back.column("v") == 2);
  CHECK_THROWS_AS(back.column("w"), std::out_of_range);

  std::istringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(ragged), IoError);
  CHECK_THROWS_AS(read_csv(scratch("missing.csv")), IoError);
  CHECK_THROWS_AS(write_csv(fs::path("/proc/none/x.csv"), t), IoError);
}

TEST_CASE("binary grid round-trip and layout") {
  GridFile g;
  g.x = Eigen::VectorXd::LinSpaced(4, 0.0, 3.0);
  g.y = Eigen::VectorXd::LinSpaced(3, -1.0, 1.0);
  g.times = {0.0, 0.5};
  for (int k = 0; k < 2; ++k) {
    Eigen::MatrixXd f(3, 4);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c)
        f(r, c) = 100 * k + 10 * r + c;
    g.frames.push_back(f);
  }
  g.frames[1](2, 3) = std::nan("");
  const auto path = scratch("g.grid");
  write_grid(path, g);
  CHECK(fs::file_size(path) == 8 + 16 + 8 * (4 + 3 + 2 + 2 * 12));
  const auto back = read_grid(path);
  CHECK(back.x == g.x);
  CHECK(back.y == g.y);
  CHECK(back.times == g.times);
  CHECK(back.frames[0] == g.frames[0]);
  CHECK(std::isnan(back.frames[1](2, 3)));
  CHECK(back.frames[1](2, 2) == 122.0);

  // row-major: the second stored value of frame 0 is (row 0, col 1)
  std::ifstream is(path, std::ios::binary);
  is.seekg(8 + 16 + 8 * 9 + 8);
  double v = 0;
  is.read(reinterpret_cast<char *>(&v), 8);
  CHECK(v == 1.0);

  fs::resize_file(path, fs::file_size(path) - 5);
  CHECK_THROWS_AS(read_grid(path), IoError);
  std::ofstream(scratch("bad.grid")) << "NOTAGRID and more";
  CHECK_THROWS_AS(read_grid(scratch("bad.grid")), IoError);
}
