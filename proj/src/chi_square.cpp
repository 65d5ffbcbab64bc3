#include "viewsnip/chi_square.hpp"

#include <cmath>
#include <limits>

#include "viewsnip/errors.hpp"

namespace viewsnip {

namespace {

constexpr double kEpsilon = 1e-15;
constexpr int kMaxIterations = 1000;

// Lower incomplete gamma by power series, valid and fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEpsilon) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz's continued fraction, for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEpsilon;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a) || !std::isfinite(x)) {
    throw DataError("regularized gamma requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a) || !std::isfinite(x)) {
    throw DataError("regularized gamma requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi_square_survival(double statistic, int df) {
  if (df < 1) throw DataError("chi-square degrees of freedom must be positive");
  if (!(statistic >= 0.0) || !std::isfinite(statistic)) {
    throw DataError("chi-square statistic must be finite and nonnegative");
  }
  return regularized_gamma_q(0.5 * static_cast<double>(df), 0.5 * statistic);
}

ChiSquareResult chi_square(const std::vector<std::vector<double>>& counts, bool yates) {
  const std::size_t rows = counts.size();
  if (rows == 0) throw DataError("degenerate contingency table");
  const std::size_t cols = counts.front().size();
  for (const auto& row : counts) {
    if (row.size() != cols) throw DataError("ragged contingency table");
    for (double cell : row) {
      if (!std::isfinite(cell) || cell < 0.0) {
        throw DataError("contingency counts must be finite and nonnegative");
      }
    }
  }
  if (rows < 2 || cols < 2) throw DataError("degenerate contingency table");

  std::vector<double> row_total(rows, 0.0);
  std::vector<double> col_total(cols, 0.0);
  double grand = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      row_total[r] += counts[r][c];
      col_total[c] += counts[r][c];
      grand += counts[r][c];
    }
  }
  for (double t : row_total) {
    if (t == 0.0) throw DataError("degenerate contingency table");
  }
  for (double t : col_total) {
    if (t == 0.0) throw DataError("degenerate contingency table");
  }

  ChiSquareResult result;
  result.degrees_of_freedom = static_cast<int>((rows - 1) * (cols - 1));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double expected = row_total[r] * col_total[c] / grand;
      double deviation = std::abs(counts[r][c] - expected);
      if (yates) deviation = std::max(0.0, deviation - 0.5);
      result.statistic += deviation * deviation / expected;
    }
  }
  result.p_value = chi_square_survival(result.statistic, result.degrees_of_freedom);
  return result;
}

}  // namespace viewsnip
