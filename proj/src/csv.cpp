#include "decentsim/csv.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "decentsim/errors.hpp"

namespace decentsim {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct CellParser {
    const std::string& origin;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& column, const std::string& value,
                           const std::string& kind) const {
        throw data_error(origin + ":" + std::to_string(line_no) + ": column '" + column +
                         "': cannot parse " + kind + " from '" + value + "'");
    }

    double number(const std::string& column, const std::string& value) const {
        double out = 0.0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc{} || ptr != value.data() + value.size())
            fail(column, value, "number");
        return out;
    }

    std::int64_t integer(const std::string& column, const std::string& value) const {
        std::int64_t out = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc{} || ptr != value.data() + value.size())
            fail(column, value, "integer");
        return out;
    }

    bool boolean(const std::string& column, const std::string& value) const {
        if (value == "0") return false;
        if (value == "1") return true;
        fail(column, value, "boolean (0/1)");
    }
};

} // namespace

std::string panel_to_csv(const PanelDataset& dataset) {
    std::ostringstream out;
    out << "# decentsim-panel-csv " << kPanelSchemaMajor << "\n";
    out << "pupil_id,school_id,municipality_id,period,post,public,anglophone,grade_high,"
           "age,girl,books,electricity";
    for (int k = 1; k <= dataset.w_dim; ++k) out << ",w" << k;
    out << ",score_math,score_lit\n";
    for (const auto& r : dataset.rows) {
        out << r.pupil_id << ',' << r.school_id << ',' << r.municipality_id << ','
            << r.period << ',' << (r.is_post ? 1 : 0) << ',' << (r.is_public ? 1 : 0) << ','
            << (r.is_anglophone ? 1 : 0) << ',' << (r.grade_high ? 1 : 0) << ','
            << r.age << ',' << (r.girl ? 1 : 0) << ',' << (r.books ? 1 : 0) << ','
            << (r.electricity ? 1 : 0);
        for (double w : r.w) out << ',' << format_double(w);
        out << ',' << format_double(r.score_math) << ',' << format_double(r.score_lit) << '\n';
    }
    return out.str();
}

void write_panel_csv(const PanelDataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    out << panel_to_csv(dataset);
    if (!out) throw data_error("failed writing '" + path + "'");
}

PanelDataset panel_from_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    CellParser cell{origin};

    // version comment
    if (!std::getline(in, line))
        throw data_error(origin + ": empty file");
    ++cell.line_no;
    if (line.rfind("# decentsim-panel-csv", 0) != 0)
        throw data_error(origin + ": missing '# decentsim-panel-csv <major>' version line");
    int major = 0;
    {
        std::istringstream v(line.substr(21));
        v >> major;
    }
    if (major != kPanelSchemaMajor)
        throw data_error(origin + ": schema major version " + std::to_string(major) +
                         " not supported (expected " + std::to_string(kPanelSchemaMajor) + ")");

    if (!std::getline(in, line))
        throw data_error(origin + ": missing header row");
    ++cell.line_no;
    auto header = split_line(line);
    const std::vector<std::string> fixed_head = {
        "pupil_id", "school_id", "municipality_id", "period", "post", "public",
        "anglophone", "grade_high", "age", "girl", "books", "electricity"};
    if (header.size() < fixed_head.size() + 2)
        throw data_error(origin + ": header has too few columns");
    for (std::size_t i = 0; i < fixed_head.size(); ++i)
        if (header[i] != fixed_head[i])
            throw data_error(origin + ": missing or misplaced column '" + fixed_head[i] +
                             "' (found '" + header[i] + "')");
    if (header[header.size() - 2] != "score_math" || header.back() != "score_lit")
        throw data_error(origin + ": header must end with score_math,score_lit");
    const int w_dim = static_cast<int>(header.size() - fixed_head.size() - 2);
    for (int k = 0; k < w_dim; ++k) {
        std::string expect = "w" + std::to_string(k + 1);
        if (header[fixed_head.size() + std::size_t(k)] != expect)
            throw data_error(origin + ": expected column '" + expect + "', found '" +
                             header[fixed_head.size() + std::size_t(k)] + "'");
    }

    PanelDataset panel;
    panel.w_dim = w_dim;
    std::set<std::pair<int, std::int64_t>> seen; // (period, pupil_id)
    while (std::getline(in, line)) {
        ++cell.line_no;
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != header.size())
            throw data_error(origin + ":" + std::to_string(cell.line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        PanelRow r;
        std::size_t f = 0;
        r.pupil_id = cell.integer("pupil_id", fields[f++]);
        r.school_id = cell.integer("school_id", fields[f++]);
        r.municipality_id = cell.integer("municipality_id", fields[f++]);
        r.period = int(cell.integer("period", fields[f++]));
        r.is_post = cell.boolean("post", fields[f++]);
        r.is_public = cell.boolean("public", fields[f++]);
        r.is_anglophone = cell.boolean("anglophone", fields[f++]);
        r.grade_high = cell.boolean("grade_high", fields[f++]);
        r.age = int(cell.integer("age", fields[f++]));
        r.girl = cell.boolean("girl", fields[f++]);
        r.books = cell.boolean("books", fields[f++]);
        r.electricity = cell.boolean("electricity", fields[f++]);
        r.w.resize(std::size_t(w_dim));
        for (int k = 0; k < w_dim; ++k)
            r.w[std::size_t(k)] = cell.number("w" + std::to_string(k + 1), fields[f++]);
        r.score_math = cell.number("score_math", fields[f++]);
        r.score_lit = cell.number("score_lit", fields[f++]);

        if (!seen.insert({r.period, r.pupil_id}).second)
            throw data_error(origin + ":" + std::to_string(cell.line_no) +
                             ": duplicate pupil_id " + std::to_string(r.pupil_id) +
                             " within period " + std::to_string(r.period));
        panel.rows.push_back(std::move(r));
    }

    // post must mark exactly the final period
    if (!panel.rows.empty()) {
        int last = panel.max_period();
        for (std::size_t i = 0; i < panel.rows.size(); ++i) {
            const auto& r = panel.rows[i];
            if (r.is_post != (r.period == last))
                throw data_error(origin + ": row with pupil_id " + std::to_string(r.pupil_id) +
                                 ": post flag inconsistent with period " +
                                 std::to_string(r.period) + " (last period is " +
                                 std::to_string(last) + ")");
        }
    }

    // school attributes are time-invariant
    struct SchoolAttrs {
        bool is_public, is_anglophone;
        std::int64_t municipality_id;
    };
    std::map<std::int64_t, SchoolAttrs> attrs;
    for (const auto& r : panel.rows) {
        auto [it, inserted] =
            attrs.try_emplace(r.school_id, SchoolAttrs{r.is_public, r.is_anglophone,
                                                       r.municipality_id});
        if (!inserted && (it->second.is_public != r.is_public ||
                          it->second.is_anglophone != r.is_anglophone ||
                          it->second.municipality_id != r.municipality_id))
            throw data_error(origin + ": school " + std::to_string(r.school_id) +
                             " changes public/anglophone/municipality across rows");
    }
    return panel;
}

PanelDataset read_panel_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return panel_from_csv(buf.str(), path);
}

std::vector<School> schools_from_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    CellParser cell{origin};

    if (!std::getline(in, line)) throw data_error(origin + ": empty file");
    ++cell.line_no;
    if (line.rfind("#", 0) == 0) {
        if (!std::getline(in, line)) throw data_error(origin + ": missing header row");
        ++cell.line_no;
    }
    auto header = split_line(line);
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < header.size(); ++i) idx[header[i]] = i;
    for (const char* req : {"school_id", "s", "e", "l0"})
        if (!idx.count(req))
            throw data_error(origin + ": missing mandatory column '" + std::string(req) + "'");

    std::vector<School> schools;
    while (std::getline(in, line)) {
        ++cell.line_no;
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != header.size())
            throw data_error(origin + ":" + std::to_string(cell.line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        School sc;
        sc.id = cell.integer("school_id", fields[idx["school_id"]]);
        sc.s = cell.number("s", fields[idx["s"]]);
        sc.e = cell.number("e", fields[idx["e"]]);
        sc.l0 = cell.number("l0", fields[idx["l0"]]);
        if (sc.l0 < 0.0)
            throw data_error(origin + ":" + std::to_string(cell.line_no) + ": l0 must be >= 0");
        if (idx.count("public")) sc.is_public = cell.boolean("public", fields[idx["public"]]);
        if (idx.count("anglophone"))
            sc.is_anglophone = cell.boolean("anglophone", fields[idx["anglophone"]]);
        if (idx.count("municipality_id"))
            sc.municipality_id = cell.integer("municipality_id", fields[idx["municipality_id"]]);
        schools.push_back(sc);
    }
    if (schools.empty()) throw data_error(origin + ": no school rows");
    return schools;
}

std::vector<School> read_schools_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return schools_from_csv(buf.str(), path);
}

} // namespace decentsim
