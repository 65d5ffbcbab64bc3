#pragma once

#include <vector>

namespace viewsnip {

// Regularized incomplete gamma functions, evaluated by the series expansion
// for x < a + 1 and by the Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// P(X >= statistic) for a chi-square variable with df degrees of freedom.
double chi_square_survival(double statistic, int df);

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
};

// Pearson's test of independence on an r x c contingency table of counts.
// Expected counts are row_total * col_total / grand_total. A zero row or
// column total makes every expected count in it zero, so such tables are
// rejected with DataError("degenerate contingency table"). The optional Yates
// continuity correction subtracts 0.5 from each |O - E|.
ChiSquareResult chi_square(const std::vector<std::vector<double>>& counts,
                           bool yates = false);

}  // namespace viewsnip
