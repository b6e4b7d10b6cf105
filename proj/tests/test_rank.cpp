#include "doctest.h"

#include <random>

#include "cdcv/error.hpp"
#include "cdcv/rank.hpp"

using namespace cdcv;

namespace {

// O(n^2) enumeration of concordant and discordant pairs.
double brute_tau(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = (x[i] - x[j]) * (y[i] - y[j]);
      s += (p > 0) - (p < 0);
    }
  }
  return s / (n * (n - 1) / 2.0);
}

}  // namespace

TEST_SUITE("rank") {
  TEST_CASE("identical and reversed rankings") {
    std::vector<double> x{1, 2, 3, 4, 5, 6}, neg{-1, -2, -3, -4, -5, -6};
    CHECK(kendall_tau(x, x) == 1.0);
    CHECK(spearman_rho(x, x) == doctest::Approx(1.0));
    CHECK(kendall_tau(x, neg) == -1.0);
    CHECK(spearman_rho(x, neg) == doctest::Approx(-1.0));
  }

  TEST_CASE("small hand example") {
    std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
    CHECK(kendall_tau(x, y) == doctest::Approx(brute_tau(x, y)));
    CHECK(kendall_tau(x, y) == doctest::Approx(2.0 / 3.0));
  }

  TEST_CASE("merge-sort tau equals brute force, with and without ties") {
    std::mt19937_64 g(4);
    for (int rep = 0; rep < 40; ++rep) {
      const std::size_t n = 2 + rep * 7;
      std::uniform_int_distribution<int> small(0, rep % 2 ? 5 : 1000000);
      std::vector<double> x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = small(g);
        y[i] = small(g) + 0.5 * x[i];
      }
      if (*std::min_element(x.begin(), x.end()) == *std::max_element(x.begin(), x.end())) continue;
      if (*std::min_element(y.begin(), y.end()) == *std::max_element(y.begin(), y.end())) continue;
      CHECK(kendall_tau(x, y) == doctest::Approx(brute_tau(x, y)).epsilon(1e-12));
      const double t = kendall_tau(x, y), r = spearman_rho(x, y);
      CHECK(t >= -1.0);
      CHECK(t <= 1.0);
      CHECK(r >= -1.0);
      CHECK(r <= 1.0);
    }
  }

  TEST_CASE("spearman equals pearson of ranks") {
    std::vector<double> x{0.3, -1.2, 2.2, 0.3, 5.0, -0.7}, y{1.0, 0.0, 3.0, 2.0, 2.5, -4.0};
    CHECK(spearman_rho(x, y) == doctest::Approx(pearson(ranks(x), ranks(y))));
    CHECK(ranks(x) == std::vector<double>{3.5, 1, 5, 3.5, 6, 2});
  }

  TEST_CASE("errors") {
    std::vector<double> c{1, 1, 1}, x{1, 2, 3};
    CHECK_THROWS_AS(kendall_tau(c, x), InputError);
    CHECK_THROWS_AS(spearman_rho(x, c), InputError);
    CHECK_THROWS_AS(kendall_tau(x, std::vector<double>{1, 2}), InputError);
    CHECK_THROWS_AS(kendall_tau(std::vector<double>{1}, std::vector<double>{1}), InputError);
  }
}
