#pragma once

#include <string>
#include <vector>

#include "decentsim/model.hpp"
#include "decentsim/panel.hpp"

namespace decentsim {

// Panel CSV schema, v1. A comment line pins the major version; readers
// reject files whose major version differs. Column order is fixed:
//   pupil_id, school_id, municipality_id, period, post, public, anglophone,
//   grade_high, age, girl, books, electricity, w1..wK, score_math, score_lit
// Booleans are 0/1; doubles are written in shortest round-trip form, so a
// write -> read cycle reproduces the dataset exactly.
inline constexpr int kPanelSchemaMajor = 1;

void write_panel_csv(const PanelDataset& dataset, const std::string& path);
PanelDataset read_panel_csv(const std::string& path);

std::string panel_to_csv(const PanelDataset& dataset);
PanelDataset panel_from_csv(const std::string& text, const std::string& origin = "<string>");

// Schools CSV for the allocation subcommand: required columns
// school_id, s, e, l0; optional public, anglophone, municipality_id.
std::vector<School> read_schools_csv(const std::string& path);
std::vector<School> schools_from_csv(const std::string& text,
                                     const std::string& origin = "<string>");

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

} // namespace decentsim
