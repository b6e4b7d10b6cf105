#include "cdcv/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "cdcv/error.hpp"

namespace cdcv {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(delim, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& value) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Date parse_date(std::string_view text) {
  const std::string_view s = trim(text);
  int y = 0;
  unsigned m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !parse_number(s.substr(0, 4), y) ||
      !parse_number(s.substr(5, 2), m) || !parse_number(s.substr(8, 2), d)) {
    throw InputError("invalid ISO-8601 date '" + std::string(s) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw InputError("invalid calendar date '" + std::string(s) + "'");
  return Date{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

void RollingWindow::validate(std::size_t rows) const {
  if (length < kMinLength) {
    throw InputError("window length " + std::to_string(length) + " is below the minimum of " +
                     std::to_string(kMinLength));
  }
  if (start + length > rows) {
    throw InputError("window [" + std::to_string(start) + ", " + std::to_string(start + length) +
                     ") exceeds panel of " + std::to_string(rows) + " rows");
  }
}

void ReturnPanel::validate() const {
  if (cols() < 2) throw InputError("panel needs at least 2 assets");
  if (rows() < 2) throw InputError("panel needs at least 2 rows");
  if (dates.size() != rows()) throw InputError("date count does not match row count");
  if (assets.size() != cols()) throw InputError("asset count does not match column count");
  std::set<std::string_view> seen;
  for (const auto& a : assets) {
    if (a.empty()) throw InputError("empty asset id");
    if (!seen.insert(a).second) throw InputError("duplicate asset id '" + a + "'");
  }
  for (std::size_t t = 1; t < rows(); ++t) {
    if (!(dates[t - 1] < dates[t])) {
      throw InputError("dates not strictly increasing at row " + std::to_string(t + 1) + " (" +
                       format_date(dates[t]) + ")");
    }
  }
  for (std::size_t j = 0; j < cols(); ++j) {
    const auto c = returns.col(static_cast<Eigen::Index>(j));
    if (!c.allFinite()) throw InputError("non-finite value in column '" + assets[j] + "'");
    if (c.maxCoeff() == c.minCoeff()) {
      throw InputError("column '" + assets[j] + "' is constant");
    }
  }
}

ReturnPanel ReturnPanel::window(const RollingWindow& w) const {
  w.validate(rows());
  ReturnPanel out;
  out.assets = assets;
  out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(w.start),
                   dates.begin() + static_cast<std::ptrdiff_t>(w.start + w.length));
  out.returns = returns.middleRows(static_cast<Eigen::Index>(w.start),
                                   static_cast<Eigen::Index>(w.length));
  return out;
}

std::size_t ReturnPanel::asset_index(std::string_view id) const {
  for (std::size_t j = 0; j < assets.size(); ++j) {
    if (assets[j] == id) return j;
  }
  throw InputError("unknown asset '" + std::string(id) + "'");
}

ReturnPanel parse_panel(std::istream& in, const CsvFormat& format, std::string_view source) {
  const std::string src(source);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, header_line)) {
    ++line_no;
    if (!trim(header_line).empty()) break;
  }
  if (trim(header_line).empty()) throw InputError(src + ": empty file");
  header = split(header_line, format.delimiter);
  if (header.size() < 3) {
    throw InputError(src + ": header must name a date column and at least 2 assets");
  }
  ReturnPanel panel;
  for (std::size_t j = 1; j < header.size(); ++j) panel.assets.emplace_back(header[j]);

  std::vector<std::pair<Date, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, format.delimiter);
    const std::string where = src + ":" + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw InputError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    Date date;
    try {
      date = parse_date(fields[0]);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    std::vector<double> values(header.size() - 1);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const std::string cell = "row " + std::to_string(line_no) + ", column '" +
                               panel.assets[j - 1] + "'";
      if (fields[j].empty()) throw InputError(src + ": missing value at " + cell);
      double v = 0.0;
      if (!parse_number(fields[j], v) || !std::isfinite(v)) {
        throw InputError(src + ": cannot parse '" + std::string(fields[j]) + "' at " + cell);
      }
      values[j - 1] = v;
    }
    rows.emplace_back(date, std::move(values));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t t = 1; t < rows.size(); ++t) {
    if (rows[t - 1].first == rows[t].first) {
      throw InputError(src + ": duplicate date " + format_date(rows[t].first));
    }
  }
  const auto T = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(panel.assets.size());
  panel.returns.resize(T, n);
  panel.dates.reserve(rows.size());
  for (Eigen::Index t = 0; t < T; ++t) {
    panel.dates.push_back(rows[static_cast<std::size_t>(t)].first);
    for (Eigen::Index j = 0; j < n; ++j) {
      panel.returns(t, j) = rows[static_cast<std::size_t>(t)].second[static_cast<std::size_t>(j)];
    }
  }
  try {
    panel.validate();
  } catch (const InputError& e) {
    throw InputError(src + ": " + e.what());
  }
  return panel;
}

ReturnPanel load_panel(const std::filesystem::path& path, const CsvFormat& format) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_panel(in, format, path.string());
}

void write_panel(std::ostream& out, const ReturnPanel& panel, const CsvFormat& format) {
  out << "date";
  for (const auto& a : panel.assets) out << format.delimiter << a;
  out << '\n';
  for (std::size_t t = 0; t < panel.rows(); ++t) {
    out << format_date(panel.dates[t]);
    for (std::size_t j = 0; j < panel.cols(); ++j) {
      out << format.delimiter
          << shortest(panel.returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)));
    }
    out << '\n';
  }
}

void save_panel(const std::filesystem::path& path, const ReturnPanel& panel,
                const CsvFormat& format) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_panel(out, panel, format);
}

SeriesStats series_stats(std::span<const double> x) {
  SeriesStats s;
  const auto n = static_cast<double>(x.size());
  if (x.empty()) return s;
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  s.min = x[0];
  s.max = x[0];
  for (double v : x) {
    const double d = v - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.variance = x.size() > 1 ? m2 / (n - 1.0) : 0.0;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 0.0) {
    s.skew = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
  }
  return s;
}

std::vector<SeriesStats> panel_stats(const ReturnPanel& panel) {
  std::vector<SeriesStats> out;
  out.reserve(panel.cols());
  for (std::size_t j = 0; j < panel.cols(); ++j) {
    out.push_back(series_stats(column(panel.returns, static_cast<Eigen::Index>(j))));
  }
  return out;
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  Eigen::Map<Eigen::VectorXd>(out.data(), m.rows()) = m.col(j);
  return out;
}

}  // namespace cdcv
