#pragma once

#include <string>
#include <vector>

#include "decentsim/estimator.hpp"

namespace decentsim {

// Table layout: column titles, optional pretty row labels, row order.
// Coefficients not listed in row_order are appended in first-seen order.
struct TableLayout {
    std::string title;
    std::vector<std::string> column_titles;
    std::vector<std::pair<std::string, std::string>> row_labels; // name -> label
    std::vector<std::string> row_order;
    std::string note;
};

struct RenderedTable {
    std::string text;
    std::string csv; // raw numbers, full precision
};

// "***" p<0.001, "**" p<0.01, "*" p<0.05 (normal approximation).
std::string significance_stars(double t_stat);

// Estimate cell format: 4 significant digits for |x| >= 1, 3 below,
// trailing zeros kept (so 10.2 -> "10.20", 0.56 -> "0.560"). t-statistics
// render in parentheses with 2 decimals.
std::string format_estimate(double value);
std::string format_t(double t_stat);

RenderedTable render_table(const std::vector<FitResult>& fits, const TableLayout& layout);

} // namespace decentsim
