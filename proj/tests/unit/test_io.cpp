#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "smoothqr/errors.hpp"
#include "smoothqr/io.hpp"

using namespace smoothqr;

TEST_CASE("ingest a small file") {
  std::istringstream in("y,a,b\n1,2,3\n4,5,6\n7,8,9\n\n");
  const auto ing = ingest_csv(in, "y");
  CHECK(ing.data.n() == 3);
  CHECK(ing.data.dim() == 3);
  CHECK(ing.response == "y");
  CHECK(ing.covariates == std::vector<std::string>{"a", "b"});
  CHECK(ing.data.y() == Vector{{1.0, 4.0, 7.0}});
  const auto& x = dynamic_cast<const DenseDesign&>(ing.data.design()).matrix();
  CHECK(x(1, 0) == 1.0);
  CHECK(x(1, 2) == 6.0);
}

TEST_CASE("response in the middle keeps header order for covariates") {
  std::istringstream in("a,y,b\r\n1,2,3\r\n4,5,6\r\n");
  const auto ing = ingest_csv(in, "y");
  CHECK(ing.covariates == std::vector<std::string>{"a", "b"});
  CHECK(ing.data.y() == Vector{{2.0, 5.0}});
}

TEST_CASE("missing response names the headers") {
  std::istringstream in("y,a,b\n1,2,3\n");
  try {
    (void)ingest_csv(in, "z");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("y") != std::string::npos);
    CHECK(msg.find("a") != std::string::npos);
    CHECK(msg.find("b") != std::string::npos);
  }
}

TEST_CASE("bad cells are located") {
  std::istringstream bad("y,a\n1,2\n3,oops\n");
  try {
    (void)read_csv(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
  std::istringstream empty_cell("y,a\n1,\n");
  CHECK_THROWS_AS(read_csv(empty_cell), ParseError);
  std::istringstream dup("y,a,a\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(dup), ParseError);
  std::istringstream ragged("y,a\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(ragged), ParseError);
  CHECK_THROWS_AS(read_csv_file("/nonexistent/file.csv"), Error);
}

TEST_CASE("emitted datasets read back exactly") {
  CounterRng rng(3);
  Vector y(25);
  RowMajorMatrix x(25, 3);
  for (auto& e : y) e = rng.normal() * 1e3;
  for (Eigen::Index i = 0; i < 25; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.normal() / 7.0;
  std::stringstream buf;
  write_dataset_csv(buf, y, x, "resp", {"u", "v", "w"});
  const auto ing = ingest_csv(buf, "resp");
  CHECK(ing.data.y() == y);
  const auto& back = dynamic_cast<const DenseDesign&>(ing.data.design()).matrix();
  CHECK(back.rightCols(3) == x);
}

TEST_CASE("plot data") {
  std::ostringstream empty;
  emit_plot_data(empty, {});
  CHECK(empty.str() == "x,series,metric,value\n");
  std::ostringstream out;
  emit_plot_data(out, {{50, "lasso", "seconds", 0.5}, {100, "lasso", "seconds", 0.25}});
  CHECK(out.str() == "x,series,metric,value\n50,lasso,seconds,0.5\n100,lasso,seconds,0.25\n");
  CHECK(std::stod(format_double(0.1)) == 0.1);
}
