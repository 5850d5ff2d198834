#include "decentsim/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "decentsim/csv.hpp"

namespace decentsim {

std::string significance_stars(double t_stat) {
    double p = p_value_normal(t_stat);
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

namespace {

int decimals_for(double magnitude) {
    if (magnitude == 0.0) return 3;
    int exp = int(std::floor(std::log10(magnitude)));
    // 4 significant digits at or above 1, 3 below
    int d = magnitude >= 1.0 ? 3 - exp : 2 - exp;
    return std::clamp(d, 0, 12);
}

} // namespace

std::string format_estimate(double value) {
    double m = std::fabs(value);
    int d = decimals_for(m);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", d, value);
    // rounding can change the magnitude class (0.9996 -> 1.000); reformat once
    double rounded = std::fabs(std::atof(buf));
    int d2 = decimals_for(rounded);
    if (d2 != d) std::snprintf(buf, sizeof buf, "%.*f", d2, value);
    return buf;
}

std::string format_t(double t_stat) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "(%.2f)", t_stat);
    return buf;
}

RenderedTable render_table(const std::vector<FitResult>& fits, const TableLayout& layout) {
    // row set: layout order first, then any remaining coefficient first-seen
    std::vector<std::string> rows = layout.row_order;
    auto known = [&](const std::string& n) {
        return std::find(rows.begin(), rows.end(), n) != rows.end();
    };
    for (const auto& f : fits)
        for (const auto& n : f.names)
            if (!known(n)) rows.push_back(n);

    auto label_of = [&](const std::string& n) -> std::string {
        for (const auto& [name, label] : layout.row_labels)
            if (name == n) return label;
        return n;
    };

    const std::size_t ncols = fits.size();
    std::vector<std::string> titles = layout.column_titles;
    while (titles.size() < ncols) titles.push_back("(" + std::to_string(titles.size() + 1) + ")");

    // collect cell text
    struct Cell {
        std::string top, bottom;
    };
    std::vector<std::vector<Cell>> grid(rows.size(), std::vector<Cell>(ncols));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < ncols; ++c) {
            int j = fits[c].index_of(rows[r]);
            if (j < 0) continue;
            grid[r][c].top = format_estimate(fits[c].estimates[j]) +
                             significance_stars(fits[c].t_stats[j]);
            grid[r][c].bottom = format_t(fits[c].t_stats[j]);
        }

    std::size_t label_w = 12;
    for (const auto& r : rows) label_w = std::max(label_w, label_of(r).size());
    std::size_t col_w = 10;
    for (const auto& t : titles) col_w = std::max(col_w, t.size());
    for (const auto& row : grid)
        for (const auto& cell : row)
            col_w = std::max({col_w, cell.top.size(), cell.bottom.size()});
    col_w += 2;

    std::ostringstream text;
    auto pad = [&](const std::string& s, std::size_t w) {
        return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
    };
    auto lead = [&](const std::string& s) { return pad(s, label_w + 2); };
    std::size_t total_w = label_w + 2 + ncols * col_w;
    std::string rule(total_w, '-');

    if (!layout.title.empty()) text << layout.title << "\n";
    text << rule << "\n" << lead("");
    for (const auto& t : titles) text << pad(t, col_w);
    text << "\n" << rule << "\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        text << lead(label_of(rows[r]));
        for (std::size_t c = 0; c < ncols; ++c) text << pad(grid[r][c].top, col_w);
        text << "\n" << lead("");
        for (std::size_t c = 0; c < ncols; ++c) text << pad(grid[r][c].bottom, col_w);
        text << "\n";
    }
    text << rule << "\n";
    text << lead("Fixed effects");
    for (const auto& f : fits) text << pad(f.fixed_effects ? "Yes" : "No", col_w);
    text << "\n" << lead("Observations");
    for (const auto& f : fits) text << pad(std::to_string(f.n_obs), col_w);
    text << "\n" << lead("Clusters");
    for (const auto& f : fits) text << pad(std::to_string(f.n_clusters), col_w);
    text << "\n" << lead("R-squared");
    for (const auto& f : fits) text << pad(format_estimate(f.r_squared), col_w);
    text << "\n" << rule << "\n";
    text << "t statistics in parentheses; * p<0.05, ** p<0.01, *** p<0.001\n";
    if (!layout.note.empty()) text << layout.note << "\n";

    std::ostringstream csv;
    csv << "term";
    for (std::size_t c = 0; c < ncols; ++c) {
        std::string t = titles[c];
        std::replace(t.begin(), t.end(), ',', ';');
        csv << ",estimate_" << t << ",se_" << t << ",t_" << t;
    }
    csv << "\n";
    for (const auto& rname : rows) {
        csv << rname;
        for (const auto& f : fits) {
            int j = f.index_of(rname);
            if (j < 0) {
                csv << ",,,";
            } else {
                double v = f.vcov(j, j);
                csv << ',' << format_double(f.estimates[j]) << ','
                    << format_double(v > 0 ? std::sqrt(v) : 0.0) << ','
                    << format_double(f.t_stats[j]);
            }
        }
        csv << "\n";
    }
    csv << "fixed_effects";
    for (const auto& f : fits) csv << ',' << (f.fixed_effects ? 1 : 0) << ",,";
    csv << "\nn_obs";
    for (const auto& f : fits) csv << ',' << f.n_obs << ",,";
    csv << "\nn_clusters";
    for (const auto& f : fits) csv << ',' << f.n_clusters << ",,";
    csv << "\nr_squared";
    for (const auto& f : fits) csv << ',' << format_double(f.r_squared) << ",,";
    csv << "\n";

    RenderedTable out;
    out.text = text.str();
    out.csv = csv.str();
    return out;
}

} // namespace decentsim
