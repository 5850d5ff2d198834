#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace decentsim {

// One pupil-period observation. Pupils are re-sampled each period
// (repeated cross-section), so pupil_id is unique within a period but a
// school contributes rows to every period.
struct PanelRow {
    std::int64_t pupil_id = 0;
    std::int64_t school_id = 0;
    std::int64_t municipality_id = 0;
    int period = 0;
    bool is_post = false; // treatment period indicator (dT)
    bool is_public = false;
    bool is_anglophone = false;
    bool grade_high = false;
    int age = 0;
    bool girl = false;
    bool books = false;
    bool electricity = false;
    std::vector<double> w; // school-level covariates
    double score_math = 0.0;
    double score_lit = 0.0;
};

enum class ColumnRole { id, cluster, period, treatment, outcome, covariate };

struct ColumnInfo {
    std::string name;
    ColumnRole role;
};

class PanelDataset {
public:
    std::vector<PanelRow> rows;
    int w_dim = 0;

    std::vector<ColumnInfo> columns() const;
    bool has_column(const std::string& name) const;

    // Numeric view of a column (booleans as 0/1). Throws data_error on an
    // unknown name, listing it.
    std::vector<double> column(const std::string& name) const;

    std::size_t n_rows() const { return rows.size(); }
    int n_periods() const;
    int max_period() const;
    std::int64_t n_schools() const;

    // Enforced after generation and before estimation: at least two periods,
    // and both public and private rows in every period.
    void validate() const;

    PanelDataset filter_grade2() const;   // keep grade_high == false rows
    PanelDataset filter_pre_periods() const; // drop the post period
};

} // namespace decentsim
