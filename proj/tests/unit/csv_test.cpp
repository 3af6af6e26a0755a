#include "dynex/csv.hpp"
#include "dynex/dsl.hpp"
#include "dynex/exploitation.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

#include <sstream>

using namespace dynex;

namespace {

Trajectory tiny() {
  Trajectory t;
  t.times = {0.0, 0.5};
  t.names = {"a", "b"};
  t.columns = {{1.0, 0.1}, {1.0 / 3.0, -2e-9}};
  return t;
}

std::string csv(const Trajectory& t, std::vector<std::string> cols) {
  std::ostringstream os;
  const auto n = write_csv(t, cols, os);
  EXPECT_EQ(n, os.str().size());
  return os.str();
}

} // namespace

TEST(Csv, HeaderRowsAndShortestNumbers) {
  EXPECT_EQ(csv(tiny(), {"b", "a"}), "time,b,a\n0,0.3333333333333333,1\n0.5,-2e-09,0.1\n");
}

TEST(Csv, TimeOnly) { EXPECT_EQ(csv(tiny(), {}), "time\n0\n0.5\n"); }

TEST(Csv, OneRowOneColumn) {
  Trajectory t;
  t.times = {0.0};
  t.names = {"x"};
  t.columns = {{4.0}};
  const auto text = csv(t, {"x"});
  EXPECT_EQ(text, "time,x\n0,4\n");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(Csv, Errors) {
  std::ostringstream os;
  const std::vector<std::string> bad{"ghost"};
  EXPECT_THROW(write_csv(tiny(), bad, os), UnknownColumn);
  std::ostringstream broken;
  broken.setstate(std::ios::badbit);
  const std::vector<std::string> ok{"a"};
  EXPECT_THROW(write_csv(tiny(), ok, broken), SinkError);
}

TEST(Csv, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e300, 5e-324, -0.0, 123456789.125, 2.0 / 3.0 * 1e-20})
    EXPECT_EQ(std::strtod(format_shortest(v).c_str(), nullptr), v);
  EXPECT_EQ(format_shortest(100.0), "100");
}

TEST(Csv, FlagshipRunIsReproducible) {
  RunConfig cfg;
  cfg.t_end = 12.5;
  cfg.dt = 0.125;
  const auto m = build_exploitation_model();
  const auto a = simulate(m, cfg);
  EXPECT_EQ(a.rows(), 101u);
  std::vector<std::string> cols;
  for (const auto& s : m.stocks)
    cols.push_back(s.id);
  EXPECT_EQ(csv(a, cols), csv(simulate(m, cfg), cols));
}
