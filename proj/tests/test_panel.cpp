#include "doctest.h"

#include <filesystem>
#include <random>
#include <sstream>

#include "cdcv/error.hpp"
#include "cdcv/panel.hpp"

using namespace cdcv;

namespace {

ReturnPanel parse(const std::string& text) {
  std::istringstream in(text);
  return parse_panel(in, {}, "test.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("panel_io") {
  TEST_CASE("three rows, two assets") {
    auto p = parse("date,A,B\n2020-01-01,0.01,0.02\n2020-01-02,-0.01,0.03\n2020-01-03,0.02,-0.01\n");
    CHECK(p.rows() == 3);
    CHECK(p.cols() == 2);
    CHECK(p.assets == std::vector<std::string>{"A", "B"});
    CHECK(p.returns(1, 1) == doctest::Approx(0.03));
  }

  TEST_CASE("empty cell is named in the error") {
    const auto msg = error_of("date,A,B\n2020-01-01,0.01,\n2020-01-02,0.02,0.03\n2020-01-03,0.0,0.1\n");
    CHECK(msg.find("missing value") != std::string::npos);
    CHECK(msg.find("B") != std::string::npos);
  }

  TEST_CASE("unsorted dates are re-sorted") {
    auto sorted = parse("date,A,B\n2020-01-01,1,4\n2020-01-02,2,5\n2020-01-03,3,7\n");
    auto shuffled = parse("date,A,B\n2020-01-03,3,7\n2020-01-01,1,4\n2020-01-02,2,5\n");
    CHECK(shuffled.dates == sorted.dates);
    CHECK(shuffled.returns == sorted.returns);
  }

  TEST_CASE("load errors") {
    CHECK(error_of("date,A,B\n2020-01-01,1,2\n2020-01-01,2,3\n").find("duplicate date") != std::string::npos);
    CHECK(error_of("date,A,B\n2020-01-01,1,2\n2020-01-02,1,3\n").find("constant") != std::string::npos);
    CHECK(error_of("date,A,B\n2020-01-01,1,x\n2020-01-02,2,3\n").find("cannot parse") != std::string::npos);
    CHECK(error_of("date,A,B\n2020-13-01,1,2\n2020-01-02,2,3\n").find("date") != std::string::npos);
    CHECK(error_of("date,A,A\n2020-01-01,1,2\n2020-01-02,2,3\n").find("duplicate asset") != std::string::npos);
    CHECK(error_of("date,A,B\n2020-01-01,1\n2020-01-02,2,3\n").find("fields") != std::string::npos);
    CHECK_THROWS_AS(load_panel("/nonexistent/panel.csv"), InputError);
  }

  TEST_CASE("write then load round trips exactly") {
    std::mt19937_64 g(3);
    std::normal_distribution<double> z(0.0, 0.013);
    ReturnPanel p;
    p.assets = {"X", "Y", "Z"};
    p.returns.resize(40, 3);
    for (int t = 0; t < 40; ++t) {
      p.dates.push_back(parse_date("2021-03-01") + std::chrono::days(t));
      for (int j = 0; j < 3; ++j) p.returns(t, j) = z(g);
    }
    std::stringstream s;
    write_panel(s, p);
    auto q = parse_panel(s);
    std::stringstream s2;
    write_panel(s2, q);
    CHECK(q.dates == p.dates);
    CHECK(q.assets == p.assets);
    CHECK(q.returns == p.returns);
    CHECK(s.str() == s2.str());
  }

  TEST_CASE("rolling window validation") {
    CHECK_NOTHROW((RollingWindow{0, 150}.validate(150)));
    CHECK_THROWS_AS((RollingWindow{1, 150}.validate(150)), InputError);
    CHECK_THROWS_AS((RollingWindow{0, 29}.validate(150)), InputError);
  }

  TEST_CASE("series statistics") {
    SUBCASE("alternating series has zero mean and skew") {
      std::vector<double> x;
      for (int i = 0; i < 100; ++i) x.push_back(i % 2 ? -1.0 : 1.0);
      auto s = series_stats(x);
      CHECK(s.mean == doctest::Approx(0.0));
      CHECK(s.skew == doctest::Approx(0.0));
    }
    SUBCASE("sample variance of 1..5") { CHECK(series_stats(std::vector<double>{1, 2, 3, 4, 5}).variance == doctest::Approx(2.5)); }
    SUBCASE("Gaussian kurtosis is near 3") {
      std::mt19937_64 g(11);
      std::normal_distribution<double> z;
      std::vector<double> x(100000);
      for (auto& v : x) v = z(g);
      CHECK(std::abs(series_stats(x).kurtosis - 3.0) < 0.1);
    }
    SUBCASE("moments are invariant under row permutation") {
      std::mt19937_64 g(5);
      std::exponential_distribution<double> e;
      std::vector<double> x(500);
      for (auto& v : x) v = e(g);
      auto y = x;
      std::shuffle(y.begin(), y.end(), g);
      auto a = series_stats(x), b = series_stats(y);
      CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
      CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-12));
      CHECK(a.skew == doctest::Approx(b.skew).epsilon(1e-12));
      CHECK(a.kurtosis == doctest::Approx(b.kurtosis).epsilon(1e-12));
      CHECK(a.min == b.min);
      CHECK(a.max == b.max);
    }
  }
}
