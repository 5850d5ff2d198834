#include "decentsim/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "decentsim/errors.hpp"

namespace decentsim {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw usage_error("config key '" + key + "': cannot parse number '" + value + "'");
    return out;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw usage_error("config key '" + key + "': cannot parse integer '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw usage_error("config key '" + key + "': cannot parse boolean '" + value + "'");
}

std::vector<double> parse_vector(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string cur;
    for (char c : value + ",") {
        if (c == ',') {
            if (!trim(cur).empty()) out.push_back(parse_double(key, cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw usage_error("config key '" + key + "': empty list");
    return out;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // trim to the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char probe[32];
        std::snprintf(probe, sizeof probe, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(probe, "%lf", &back);
        if (back == v) return probe;
    }
    return buf;
}

std::string fmt_vector(const std::vector<double>& v) {
    std::string out;
    for (double x : v) out += (out.empty() ? "" : ", ") + fmt_double(x);
    return out;
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    auto& d = dgp;
    if (key == "n_municipalities") d.n_municipalities = int(parse_int(key, value));
    else if (key == "schools_per_municipality") d.schools_per_municipality = int(parse_int(key, value));
    else if (key == "pupils_per_school") d.pupils_per_school = int(parse_int(key, value));
    else if (key == "n_periods") d.n_periods = int(parse_int(key, value));
    else if (key == "share_public") d.share_public = parse_double(key, value);
    else if (key == "share_anglophone") d.share_anglophone = parse_double(key, value);
    else if (key == "seed") d.seed = std::uint64_t(parse_int(key, value));
    else if (key == "theta0") d.theta0 = parse_double(key, value);
    else if (key == "theta1") d.theta1 = parse_vector(key, value);
    else if (key == "theta2") d.theta2 = parse_vector(key, value);
    else if (key == "theta_grade") d.theta_grade = parse_double(key, value);
    else if (key == "alpha0") d.alpha0 = parse_double(key, value);
    else if (key == "alpha1") d.alpha1 = parse_double(key, value);
    else if (key == "lambda0") d.lambda0 = parse_double(key, value);
    else if (key == "lambda0_grade2") {
        if (trim(value) == "inherit") d.lambda0_grade2.reset();
        else d.lambda0_grade2 = parse_double(key, value);
    }
    else if (key == "lambda_spread") d.lambda_spread = parse_double(key, value);
    else if (key == "lambda_gap_anglophone") d.lambda_gap_anglophone = parse_double(key, value);
    else if (key == "mu0") d.mu0 = parse_double(key, value);
    else if (key == "mu1") d.mu1 = parse_double(key, value);
    else if (key == "mu2") d.mu2 = parse_double(key, value);
    else if (key == "sd_eps0") d.sd_eps0 = parse_double(key, value);
    else if (key == "sd_eps1") d.sd_eps1 = parse_double(key, value);
    else if (key == "sd_eps2") d.sd_eps2 = parse_double(key, value);
    else if (key == "selection_corr") d.selection_corr = parse_double(key, value);
    else if (key == "pretrend_gap") d.pretrend_gap = parse_double(key, value);
    else if (key == "mc_reps") mc.reps = int(parse_int(key, value));
    else if (key == "mc_base_seed") mc.base_seed = std::uint64_t(parse_int(key, value));
    else if (key == "mc_threads") mc.threads = int(parse_int(key, value));
    else if (key == "mc_fe") mc.fe = parse_bool(key, value);
    else if (key == "mc_outcome") mc.outcome = trim(value);
    else if (key == "gains_distribution") gains.distribution = DistributionSpec::parse(trim(value));
    else if (key == "gains_n_schools") gains.n_schools = int(parse_int(key, value));
    else if (key == "gains_budgets") gains.budgets = parse_vector(key, value);
    else if (key == "gains_cap_factors") gains.cap_factors = parse_vector(key, value);
    else if (key == "gains_draws") gains.draws = int(parse_int(key, value));
    else if (key == "gains_seed") gains.seed = std::uint64_t(parse_int(key, value));
    else throw usage_error("unknown config key '" + key + "'");
}

RunConfig RunConfig::from_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == '[') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw usage_error("config line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + t + "'");
        cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

std::string RunConfig::render() const {
    std::ostringstream out;
    out << "# decentsim run configuration\n";
    out << "\n[design]\n";
    out << "n_municipalities = " << dgp.n_municipalities << "\n";
    out << "schools_per_municipality = " << dgp.schools_per_municipality << "\n";
    out << "pupils_per_school = " << dgp.pupils_per_school << "\n";
    out << "n_periods = " << dgp.n_periods << "\n";
    out << "share_public = " << fmt_double(dgp.share_public) << "\n";
    out << "share_anglophone = " << fmt_double(dgp.share_anglophone) << "\n";
    out << "seed = " << dgp.seed << "\n";
    out << "\n[effects]\n";
    out << "theta0 = " << fmt_double(dgp.theta0) << "\n";
    out << "theta1 = " << fmt_vector(dgp.theta1) << "\n";
    out << "theta2 = " << fmt_vector(dgp.theta2) << "\n";
    out << "theta_grade = " << fmt_double(dgp.theta_grade) << "\n";
    out << "alpha0 = " << fmt_double(dgp.alpha0) << "\n";
    out << "alpha1 = " << fmt_double(dgp.alpha1) << "\n";
    out << "lambda0 = " << fmt_double(dgp.lambda0) << "\n";
    out << "lambda0_grade2 = "
        << (dgp.lambda0_grade2 ? fmt_double(*dgp.lambda0_grade2) : std::string("inherit")) << "\n";
    out << "lambda_spread = " << fmt_double(dgp.lambda_spread) << "\n";
    out << "lambda_gap_anglophone = " << fmt_double(dgp.lambda_gap_anglophone) << "\n";
    out << "\n[resources]\n";
    out << "mu0 = " << fmt_double(dgp.mu0) << "\n";
    out << "mu1 = " << fmt_double(dgp.mu1) << "\n";
    out << "mu2 = " << fmt_double(dgp.mu2) << "\n";
    out << "\n[errors]\n";
    out << "sd_eps0 = " << fmt_double(dgp.sd_eps0) << "\n";
    out << "sd_eps1 = " << fmt_double(dgp.sd_eps1) << "\n";
    out << "sd_eps2 = " << fmt_double(dgp.sd_eps2) << "\n";
    out << "selection_corr = " << fmt_double(dgp.selection_corr) << "\n";
    out << "pretrend_gap = " << fmt_double(dgp.pretrend_gap) << "\n";
    out << "\n[mc]\n";
    out << "mc_reps = " << mc.reps << "\n";
    out << "mc_base_seed = " << mc.base_seed << "\n";
    out << "mc_threads = " << mc.threads << "\n";
    out << "mc_fe = " << (mc.fe ? "true" : "false") << "\n";
    out << "mc_outcome = " << mc.outcome << "\n";
    out << "\n[gains]\n";
    out << "gains_distribution = " << gains.distribution.label() << "\n";
    out << "gains_n_schools = " << gains.n_schools << "\n";
    out << "gains_budgets = " << fmt_vector(gains.budgets) << "\n";
    out << "gains_cap_factors = " << fmt_vector(gains.cap_factors) << "\n";
    out << "gains_draws = " << gains.draws << "\n";
    out << "gains_seed = " << gains.seed << "\n";
    return out.str();
}

} // namespace decentsim
