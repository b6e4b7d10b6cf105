#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdcv {

using Date = std::chrono::sys_days;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws InputError.
Date parse_date(std::string_view text);
std::string format_date(Date date);

/// Contiguous block of rows used as a learning period.
struct RollingWindow {
  static constexpr std::size_t kMinLength = 30;

  std::size_t start = 0;
  std::size_t length = 150;

  /// Throws InputError unless start + length <= rows and length >= kMinLength.
  void validate(std::size_t rows) const;
};

/// T x n matrix of per-period relative returns, one column per asset.
///
/// Invariants (checked by validate()): dates strictly increasing, asset ids
/// unique and non-empty, every column has at least two distinct values,
/// n >= 2, T >= 2, all cells finite.
struct ReturnPanel {
  std::vector<Date> dates;
  std::vector<std::string> assets;
  Eigen::MatrixXd returns;

  std::size_t rows() const { return static_cast<std::size_t>(returns.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(returns.cols()); }

  void validate() const;

  /// Copy of the rows covered by `w`. Throws InputError if out of range.
  ReturnPanel window(const RollingWindow& w) const;

  /// Column index of an asset id, or throws InputError.
  std::size_t asset_index(std::string_view id) const;
};

struct CsvFormat {
  char delimiter = ',';
};

/// Reads a panel: header `date,<asset>,...`, then one row per date.
/// Rows are sorted by date after reading. Errors name the offending
/// line and column.
ReturnPanel load_panel(const std::filesystem::path& path, const CsvFormat& format = {});
ReturnPanel parse_panel(std::istream& in, const CsvFormat& format = {},
                        std::string_view source = "<stream>");

/// Writes shortest round-trip decimal representations, so load(write(p)) == p.
void write_panel(std::ostream& out, const ReturnPanel& panel, const CsvFormat& format = {});
void save_panel(const std::filesystem::path& path, const ReturnPanel& panel,
                const CsvFormat& format = {});

struct SeriesStats {
  double mean = 0.0;
  double variance = 0.0;  // n - 1 denominator
  double skew = 0.0;      // m3 / m2^(3/2)
  double kurtosis = 0.0;  // m4 / m2^2, not excess: Gaussian -> 3
  double min = 0.0;
  double max = 0.0;
};

SeriesStats series_stats(std::span<const double> x);
std::vector<SeriesStats> panel_stats(const ReturnPanel& panel);

/// Copies column `j` of a matrix into a vector.
std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j);

}  // namespace cdcv
