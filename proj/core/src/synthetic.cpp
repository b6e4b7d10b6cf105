#include "cdcv/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "cdcv/error.hpp"
#include "cdcv/rng.hpp"

namespace cdcv {
namespace {

double interpolate(double hi, double lo, std::size_t j, std::size_t m) {
  if (m == 1) return hi;
  return hi + static_cast<double>(j) / static_cast<double>(m - 1) * (lo - hi);
}

double sector_loading(const FactorSpec& s, std::size_t j) {
  return interpolate(s.sector_high, s.sector_low, j, s.assets_per_sector);
}

double market_loading(const FactorSpec& s, std::size_t k, std::size_t j) {
  const std::size_t m = s.assets_per_sector;
  return interpolate(s.market_high, s.market_low, (j + k) % m, m);
}

double draw(const FactorSpec& s, Rng& rng) {
  if (s.innovation == Innovation::Gaussian) return rng.normal();
  const double t = rng.normal() / std::sqrt(rng.chi_square(s.nu) / s.nu);
  return t / std::sqrt(s.nu / (s.nu - 2.0));
}

}  // namespace

std::string_view to_string(Innovation i) { return i == Innovation::Gaussian ? "Gaussian" : "StudentT"; }

Innovation innovation_from_string(std::string_view s) {
  if (s == "Gaussian") return Innovation::Gaussian;
  if (s == "StudentT") return Innovation::StudentT;
  throw InputError("unknown innovation '" + std::string(s) + "'");
}

void FactorSpec::validate() const {
  if (sectors < 1 || assets_per_sector < 1 || sectors * assets_per_sector < 2) {
    throw InputError("generator: need at least 2 assets");
  }
  if (rows < 2) throw InputError("generator: need at least 2 rows");
  if (!(vol > 0.0)) throw InputError("generator: vol must be > 0");
  const double a = std::max(std::abs(market_high), std::abs(market_low));
  const double b = std::max(std::abs(sector_high), std::abs(sector_low));
  if (!(a * a + b * b < 1.0)) {
    throw InputError("generator: squared loadings must sum below 1");
  }
  if (innovation == Innovation::StudentT && !(nu > 2.0)) throw InputError("generator: nu must be > 2");
}

SyntheticPanel generate_factor_panel(const FactorSpec& spec) {
  spec.validate();
  const std::size_t n = spec.sectors * spec.assets_per_sector;
  SyntheticPanel out;
  auto& p = out.panel;
  for (std::size_t k = 0; k < spec.sectors; ++k) {
    for (std::size_t j = 0; j < spec.assets_per_sector; ++j) {
      p.assets.push_back("S" + std::to_string(k + 1) + "_A" + std::to_string(j + 1));
      out.sector.push_back(k);
    }
  }
  using namespace std::chrono;
  sys_days day = year_month_day{year{2005}, January, 3d};
  for (std::size_t t = 0; t < spec.rows; ++t) {
    while (weekday{day} == Saturday || weekday{day} == Sunday) day += days{1};
    p.dates.push_back(day);
    day += days{1};
  }
  p.returns.resize(static_cast<Eigen::Index>(spec.rows), static_cast<Eigen::Index>(n));
  Rng rng(spec.seed);
  std::vector<double> sector(spec.sectors);
  for (std::size_t t = 0; t < spec.rows; ++t) {
    const double m = draw(spec, rng);
    for (auto& s : sector) s = draw(spec, rng);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i % spec.assets_per_sector;
      const double a = market_loading(spec, out.sector[i], j);
      const double b = sector_loading(spec, j);
      const double c = std::sqrt(1.0 - a * a - b * b);
      p.returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
          spec.vol * (a * m + b * sector[out.sector[i]] + c * draw(spec, rng));
    }
  }
  p.validate();
  return out;
}

}  // namespace cdcv
