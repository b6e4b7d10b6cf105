#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cdcv/panel.hpp"

namespace cdcv {

enum class Innovation { Gaussian, StudentT };

std::string_view to_string(Innovation i);
Innovation innovation_from_string(std::string_view s);

/// Two-level factor model
///   r_i = vol * (a_i M + b_i S_k(i) + c_i e_i),  c_i = sqrt(1 - a_i^2 - b_i^2),
/// with unit-variance market M, sector S_k and idiosyncratic e_i factors.
/// Within a sector the loadings b_i fall linearly from sector_high (the
/// first asset) to sector_low (the last). Asset j of sector k takes the
/// market loading at grid position (j + k) mod m on the same kind of ramp
/// from market_high to market_low, so betas differ across sectors.
struct FactorSpec {
  std::size_t sectors = 3;
  std::size_t assets_per_sector = 4;
  std::size_t rows = 1000;
  double market_high = 0.8;
  double market_low = 0.4;
  double sector_high = 0.55;
  double sector_low = 0.45;
  double vol = 0.01;
  Innovation innovation = Innovation::Gaussian;
  double nu = 5.0;  // StudentT innovations, scaled to unit variance
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticPanel {
  ReturnPanel panel;
  std::vector<std::size_t> sector;  // generating sector of each asset
};

/// Asset ids are S<k>_A<j>; dates are consecutive weekdays from 2005-01-03.
SyntheticPanel generate_factor_panel(const FactorSpec& spec);

}  // namespace cdcv
