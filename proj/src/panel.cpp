#include "decentsim/panel.hpp"

#include <algorithm>
#include <set>

#include "decentsim/errors.hpp"

namespace decentsim {

std::vector<ColumnInfo> PanelDataset::columns() const {
    std::vector<ColumnInfo> cols = {
        {"pupil_id", ColumnRole::id},
        {"school_id", ColumnRole::cluster},
        {"municipality_id", ColumnRole::id},
        {"period", ColumnRole::period},
        {"post", ColumnRole::period},
        {"public", ColumnRole::treatment},
        {"anglophone", ColumnRole::covariate},
        {"grade_high", ColumnRole::covariate},
        {"age", ColumnRole::covariate},
        {"girl", ColumnRole::covariate},
        {"books", ColumnRole::covariate},
        {"electricity", ColumnRole::covariate},
    };
    for (int k = 0; k < w_dim; ++k)
        cols.push_back({"w" + std::to_string(k + 1), ColumnRole::covariate});
    cols.push_back({"score_math", ColumnRole::outcome});
    cols.push_back({"score_lit", ColumnRole::outcome});
    return cols;
}

bool PanelDataset::has_column(const std::string& name) const {
    for (const auto& c : columns())
        if (c.name == name) return true;
    return false;
}

std::vector<double> PanelDataset::column(const std::string& name) const {
    std::vector<double> out(rows.size());
    auto fill = [&](auto getter) {
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = getter(rows[i]);
    };
    if (name == "pupil_id") fill([](const PanelRow& r) { return double(r.pupil_id); });
    else if (name == "school_id") fill([](const PanelRow& r) { return double(r.school_id); });
    else if (name == "municipality_id") fill([](const PanelRow& r) { return double(r.municipality_id); });
    else if (name == "period") fill([](const PanelRow& r) { return double(r.period); });
    else if (name == "post") fill([](const PanelRow& r) { return r.is_post ? 1.0 : 0.0; });
    else if (name == "public") fill([](const PanelRow& r) { return r.is_public ? 1.0 : 0.0; });
    else if (name == "anglophone") fill([](const PanelRow& r) { return r.is_anglophone ? 1.0 : 0.0; });
    else if (name == "grade_high") fill([](const PanelRow& r) { return r.grade_high ? 1.0 : 0.0; });
    else if (name == "age") fill([](const PanelRow& r) { return double(r.age); });
    else if (name == "girl") fill([](const PanelRow& r) { return r.girl ? 1.0 : 0.0; });
    else if (name == "books") fill([](const PanelRow& r) { return r.books ? 1.0 : 0.0; });
    else if (name == "electricity") fill([](const PanelRow& r) { return r.electricity ? 1.0 : 0.0; });
    else if (name == "score_math") fill([](const PanelRow& r) { return r.score_math; });
    else if (name == "score_lit") fill([](const PanelRow& r) { return r.score_lit; });
    else if (name.size() > 1 && name[0] == 'w') {
        int k = 0;
        try {
            k = std::stoi(name.substr(1));
        } catch (...) {
            throw data_error("unknown column '" + name + "'");
        }
        if (k < 1 || k > w_dim) throw data_error("unknown column '" + name + "'");
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i].w[std::size_t(k - 1)];
    } else {
        throw data_error("unknown column '" + name + "'");
    }
    return out;
}

int PanelDataset::n_periods() const {
    std::set<int> periods;
    for (const auto& r : rows) periods.insert(r.period);
    return static_cast<int>(periods.size());
}

int PanelDataset::max_period() const {
    int m = 0;
    for (const auto& r : rows) m = std::max(m, r.period);
    return m;
}

std::int64_t PanelDataset::n_schools() const {
    std::set<std::int64_t> ids;
    for (const auto& r : rows) ids.insert(r.school_id);
    return static_cast<std::int64_t>(ids.size());
}

void PanelDataset::validate() const {
    if (rows.empty()) throw data_error("panel is empty");
    if (n_periods() < 2) throw data_error("panel needs at least two periods");
    std::set<int> periods;
    for (const auto& r : rows) periods.insert(r.period);
    for (int p : periods) {
        bool has_pub = false, has_priv = false;
        for (const auto& r : rows) {
            if (r.period != p) continue;
            (r.is_public ? has_pub : has_priv) = true;
            if (has_pub && has_priv) break;
        }
        if (!has_pub || !has_priv)
            throw data_error("period " + std::to_string(p) + " is missing " +
                             (has_pub ? "private" : "public") + " rows (empty cell)");
    }
    for (const auto& r : rows)
        if (static_cast<int>(r.w.size()) != w_dim)
            throw data_error("row with pupil_id " + std::to_string(r.pupil_id) +
                             " has inconsistent w dimension");
}

PanelDataset PanelDataset::filter_grade2() const {
    PanelDataset out;
    out.w_dim = w_dim;
    for (const auto& r : rows)
        if (!r.grade_high) out.rows.push_back(r);
    return out;
}

PanelDataset PanelDataset::filter_pre_periods() const {
    PanelDataset out;
    out.w_dim = w_dim;
    for (const auto& r : rows)
        if (!r.is_post) out.rows.push_back(r);
    return out;
}

} // namespace decentsim
