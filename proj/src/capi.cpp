#include "decentsim.h"

#include <cstring>
#include <exception>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "decentsim/config.hpp"
#include "decentsim/csv.hpp"
#include "decentsim/did.hpp"
#include "decentsim/errors.hpp"
#include "decentsim/montecarlo.hpp"
#include "decentsim/table.hpp"

using json = nlohmann::ordered_json;

struct ds_config {
    decentsim::RunConfig cfg;
};
struct ds_panel {
    decentsim::PanelDataset panel;
};
struct ds_fit {
    decentsim::FitResult fit;
};

namespace {

thread_local std::string g_last_error;

ds_status fail(ds_status code, const char* what) {
    g_last_error = what;
    return code;
}

// Run `fn`, translating exceptions into status codes.
template <typename Fn>
ds_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return DS_OK;
    } catch (const decentsim::usage_error& e) {
        return fail(DS_ERR_USAGE, e.what());
    } catch (const decentsim::data_error& e) {
        return fail(DS_ERR_DATA, e.what());
    } catch (const std::domain_error& e) {
        return fail(DS_ERR_DATA, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(DS_ERR_USAGE, e.what());
    } catch (const std::exception& e) {
        return fail(DS_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

bool require_args(std::initializer_list<const void*> args) {
    for (const void* a : args)
        if (a == nullptr) return false;
    return true;
}

#define DS_REQUIRE(...)                                                        \
    do {                                                                       \
        if (!require_args({__VA_ARGS__}))                                      \
            return fail(DS_ERR_USAGE, "null argument");                        \
    } while (0)

json did_json(const decentsim::DiDSummary& s) {
    json j;
    j["specification"] = s.specification;
    j["att_estimate"] = s.att_estimate;
    j["se"] = s.se;
    j["t_stat"] = s.t_stat;
    j["p_value"] = decentsim::p_value_normal(s.t_stat);
    j["cell_means"] = {{"pre_private", s.cell_means[0][0]},
                       {"pre_public", s.cell_means[0][1]},
                       {"post_private", s.cell_means[1][0]},
                       {"post_public", s.cell_means[1][1]}};
    j["n_obs"] = s.fit.n_obs;
    j["n_clusters"] = s.fit.n_clusters;
    if (!s.heterogeneity.empty()) {
        json h;
        for (const auto& [name, term] : s.heterogeneity)
            h[name] = {{"estimate", term.estimate}, {"se", term.se}, {"t", term.t}};
        j["heterogeneity"] = h;
    }
    return j;
}

std::string did_text(const decentsim::DiDSummary& s) {
    std::ostringstream out;
    out << "DiD summary (" << s.specification << ")\n";
    out << "  cell means   pre        post\n";
    out << "    private    " << decentsim::format_estimate(s.cell_means[0][0]) << "   "
        << decentsim::format_estimate(s.cell_means[1][0]) << "\n";
    out << "    public     " << decentsim::format_estimate(s.cell_means[0][1]) << "   "
        << decentsim::format_estimate(s.cell_means[1][1]) << "\n";
    out << "  ATT " << decentsim::format_estimate(s.att_estimate)
        << decentsim::significance_stars(s.t_stat) << "  " << decentsim::format_t(s.t_stat)
        << "  se " << decentsim::format_estimate(s.se) << "\n";
    out << "  n_obs " << s.fit.n_obs << ", clusters " << s.fit.n_clusters << "\n";
    return out.str();
}

} // namespace

extern "C" {

const char* ds_last_error(void) { return g_last_error.c_str(); }

void ds_string_free(char* s) { delete[] s; }

ds_config* ds_config_default(void) { return new ds_config{}; }

ds_status ds_config_load(const char* path, ds_config** out) {
    DS_REQUIRE(path, out);
    return guarded([&] { *out = new ds_config{decentsim::RunConfig::from_file(path)}; });
}

ds_status ds_config_set(ds_config* cfg, const char* key, const char* value) {
    DS_REQUIRE(cfg, key, value);
    return guarded([&] { cfg->cfg.set(key, value); });
}

ds_status ds_config_render(const ds_config* cfg, char** out_text) {
    DS_REQUIRE(cfg, out_text);
    return guarded([&] { *out_text = dup_string(cfg->cfg.render()); });
}

void ds_config_free(ds_config* cfg) { delete cfg; }

ds_status ds_panel_simulate(const ds_config* cfg, ds_panel** out) {
    DS_REQUIRE(cfg, out);
    return guarded([&] { *out = new ds_panel{decentsim::generate_panel(cfg->cfg.dgp)}; });
}

ds_status ds_panel_read_csv(const char* path, ds_panel** out) {
    DS_REQUIRE(path, out);
    return guarded([&] { *out = new ds_panel{decentsim::read_panel_csv(path)}; });
}

ds_status ds_panel_write_csv(const ds_panel* panel, const char* path) {
    DS_REQUIRE(panel, path);
    return guarded([&] { decentsim::write_panel_csv(panel->panel, path); });
}

int64_t ds_panel_rows(const ds_panel* panel) {
    return panel ? int64_t(panel->panel.n_rows()) : 0;
}

int64_t ds_panel_schools(const ds_panel* panel) {
    return panel ? panel->panel.n_schools() : 0;
}

int ds_panel_periods(const ds_panel* panel) {
    return panel ? panel->panel.n_periods() : 0;
}

void ds_panel_free(ds_panel* panel) { delete panel; }

ds_status ds_fit_saturated(const ds_panel* panel, const char* outcome, ds_fit** out) {
    DS_REQUIRE(panel, outcome, out);
    return guarded([&] {
        decentsim::DiDSummary s = decentsim::two_by_two(panel->panel, outcome);
        *out = new ds_fit{std::move(s.fit)};
    });
}

ds_status ds_fit_paper_spec(const ds_panel* panel, const char* outcome, int with_fe,
                            int grade2_only, ds_fit** out) {
    DS_REQUIRE(panel, outcome, out);
    return guarded([&] {
        decentsim::DiDSummary s =
            decentsim::fit_paper_spec(panel->panel, outcome, with_fe != 0, grade2_only != 0);
        *out = new ds_fit{std::move(s.fit)};
    });
}

ds_status ds_fit_heterogeneity(const ds_panel* panel, const char* outcome,
                               const char* moderator, ds_fit** out) {
    DS_REQUIRE(panel, outcome, moderator, out);
    return guarded([&] {
        decentsim::DiDSummary s =
            decentsim::fit_heterogeneity(panel->panel, outcome, moderator);
        *out = new ds_fit{std::move(s.fit)};
    });
}

ds_status ds_fit_coef(const ds_fit* fit, const char* term, double* estimate, double* se,
                      double* t_stat) {
    DS_REQUIRE(fit, term);
    return guarded([&] {
        if (estimate) *estimate = fit->fit.estimate(term);
        if (se) *se = fit->fit.se(term);
        if (t_stat) *t_stat = fit->fit.t(term);
    });
}

double ds_fit_r_squared(const ds_fit* fit) { return fit ? fit->fit.r_squared : 0.0; }

int64_t ds_fit_n_obs(const ds_fit* fit) { return fit ? fit->fit.n_obs : 0; }

int64_t ds_fit_n_clusters(const ds_fit* fit) { return fit ? fit->fit.n_clusters : 0; }

void ds_fit_free(ds_fit* fit) { delete fit; }

ds_status ds_render_table(const ds_fit* const* fits, size_t n_fits,
                          const char* const* titles, char** out_text, char** out_csv) {
    DS_REQUIRE(fits, out_text, out_csv);
    return guarded([&] {
        std::vector<decentsim::FitResult> results;
        for (size_t i = 0; i < n_fits; ++i) {
            if (!fits[i]) throw decentsim::usage_error("null fit handle");
            results.push_back(fits[i]->fit);
        }
        decentsim::TableLayout layout;
        if (titles)
            for (size_t i = 0; i < n_fits; ++i)
                layout.column_titles.push_back(titles[i] ? titles[i] : "");
        layout.row_labels = {{"post", "Post period"},
                             {"public", "Public school"},
                             {"post:public", "Decentralization"},
                             {"age", "Age"},
                             {"girl", "Girl"},
                             {"books", "Books at home"},
                             {"electricity", "Electricity at home"},
                             {"anglophone", "Anglophone"},
                             {"grade_high", "Higher grade"},
                             {"post:anglophone", "Post x Anglophone"},
                             {"public:anglophone", "Public x Anglophone"},
                             {"post:public:anglophone", "Decentralization x Anglophone"},
                             {"const", "Constant"}};
        layout.row_order = {"post", "public", "post:public"};
        decentsim::RenderedTable table = decentsim::render_table(results, layout);
        *out_text = dup_string(table.text);
        *out_csv = dup_string(table.csv);
    });
}

ds_status ds_did_two_by_two(const ds_panel* panel, const char* outcome, char** out_json,
                            char** out_text) {
    DS_REQUIRE(panel, outcome);
    return guarded([&] {
        decentsim::DiDSummary s = decentsim::two_by_two(panel->panel, outcome);
        if (out_json) *out_json = dup_string(did_json(s).dump(2) + "\n");
        if (out_text) *out_text = dup_string(did_text(s));
    });
}

ds_status ds_did_placebo(const ds_panel* panel, const char* outcome, char** out_json,
                         char** out_text) {
    DS_REQUIRE(panel, outcome);
    return guarded([&] {
        decentsim::PlaceboResult r = decentsim::placebo_pretrend(panel->panel, outcome);
        json j;
        j["placebo_estimate"] = r.estimate;
        j["se"] = r.se;
        j["t_stat"] = r.t_stat;
        j["p_value"] = r.p_value;
        if (out_json) *out_json = dup_string(j.dump(2) + "\n");
        if (out_text) {
            std::ostringstream out;
            out << "Placebo pre-trend test\n  estimate "
                << decentsim::format_estimate(r.estimate) << "  "
                << decentsim::format_t(r.t_stat) << "  p "
                << decentsim::format_estimate(r.p_value) << "\n";
            *out_text = dup_string(out.str());
        }
    });
}

ds_status ds_mc_run(const ds_config* cfg, char** out_json, char** out_csv, char** out_text) {
    DS_REQUIRE(cfg);
    return guarded([&] {
        const auto& rc = cfg->cfg;
        decentsim::RegressionSpec spec;
        spec.outcome = rc.mc.outcome;
        spec.covariates = {"age",        "girl", "books", "electricity",
                           "grade_high", "anglophone", "post", "public"};
        spec.interactions = {{"post", "public"}};
        if (rc.mc.fe) {
            spec.fixed_effect = "school_id";
            spec.include_intercept = false;
        }
        decentsim::MCResult mc =
            decentsim::run_mc(rc.dgp, spec, rc.mc.reps, rc.mc.base_seed, rc.mc.threads);

        if (out_json) {
            json j;
            j["n_reps"] = mc.n_reps;
            j["true_att"] = mc.true_att;
            j["mean_estimate"] = mc.mean_estimate;
            j["bias"] = mc.bias;
            j["rmse"] = mc.rmse;
            j["ci_coverage_95"] = mc.ci_coverage_95;
            j["rejection_rate_5pct"] = mc.rejection_rate_5pct;
            j["mean_se"] = mc.mean_se;
            j["sd_estimates"] = mc.sd_estimates;
            *out_json = dup_string(j.dump(2) + "\n");
        }
        if (out_csv) {
            std::ostringstream csv;
            csv << "rep,seed,estimate,se,ci_covers,rejects_true\n";
            for (const auto& rep : mc.reps)
                csv << rep.rep << ',' << rep.seed << ',' << decentsim::format_double(rep.estimate)
                    << ',' << decentsim::format_double(rep.se) << ',' << (rep.ci_covers ? 1 : 0)
                    << ',' << (rep.rejects_true ? 1 : 0) << "\n";
            *out_csv = dup_string(csv.str());
        }
        if (out_text) {
            std::ostringstream out;
            out << "Monte Carlo (" << mc.n_reps << " reps, outcome " << rc.mc.outcome << ", "
                << (rc.mc.fe ? "FE" : "no FE") << ")\n";
            out << "  true effect    " << decentsim::format_double(mc.true_att) << "\n";
            out << "  mean estimate  " << decentsim::format_double(mc.mean_estimate) << "\n";
            out << "  bias           " << decentsim::format_double(mc.bias) << "\n";
            out << "  rmse           " << decentsim::format_double(mc.rmse) << "\n";
            out << "  sd(estimates)  " << decentsim::format_double(mc.sd_estimates) << "\n";
            out << "  mean se        " << decentsim::format_double(mc.mean_se) << "\n";
            out << "  95% coverage   " << decentsim::format_double(mc.ci_coverage_95) << "\n";
            out << "  5% rejection   " << decentsim::format_double(mc.rejection_rate_5pct)
                << "\n";
            *out_text = dup_string(out.str());
        }
    });
}

ds_status ds_allocate_file(const char* schools_csv_path, double budget, double cap,
                           char** out_plan_csv, char** out_text) {
    DS_REQUIRE(schools_csv_path);
    return guarded([&] {
        std::vector<decentsim::School> schools = decentsim::read_schools_csv(schools_csv_path);
        decentsim::AllocationPlan plan =
            decentsim::informed_allocation(schools, budget, cap);
        decentsim::AllocationPlan uniform =
            decentsim::uniform_allocation(int(schools.size()), budget);
        auto feas = decentsim::check_feasibility(plan, schools);
        if (!feas.feasible)
            throw std::logic_error("informed allocation produced an infeasible plan: " +
                                   feas.violations.front());
        double delta = decentsim::realized_gain(schools, uniform);
        double rho = decentsim::realized_gain(schools, plan);

        if (out_plan_csv) {
            std::ostringstream csv;
            csv << "school_id,s,increment,h_uniform,h_informed\n";
            for (std::size_t i = 0; i < schools.size(); ++i)
                csv << schools[i].id << ',' << decentsim::format_double(schools[i].s) << ','
                    << decentsim::format_double(plan.increments[i]) << ','
                    << decentsim::format_double(
                           decentsim::produce_human_capital(schools[i], budget))
                    << ','
                    << decentsim::format_double(
                           decentsim::produce_human_capital(schools[i], plan.increments[i]))
                    << "\n";
            *out_plan_csv = dup_string(csv.str());
        }
        if (out_text) {
            std::ostringstream out;
            out << "Allocation over " << schools.size() << " schools, budget "
                << decentsim::format_double(budget) << " per school, cap "
                << decentsim::format_double(cap) << "\n";
            out << "  uniform gain   " << decentsim::format_double(delta) << "\n";
            out << "  informed gain  " << decentsim::format_double(rho) << "\n";
            out << "  gain delta     " << decentsim::format_double(rho - delta) << "\n";
            *out_text = dup_string(out.str());
        }
    });
}

ds_status ds_gains_grid(const ds_config* cfg, char** out_csv, char** out_text) {
    DS_REQUIRE(cfg);
    return guarded([&] {
        const auto& gs = cfg->cfg.gains;
        std::vector<decentsim::GainCell> cells = decentsim::run_model_mc(
            {gs.distribution}, gs.n_schools, gs.budgets, gs.cap_factors, gs.draws, gs.seed);

        std::ostringstream csv;
        csv << "distribution,n_schools,budget,cap,delta_centralized,rho_decentralized,"
               "lambda_gain,standard_error,n_draws\n";
        for (const auto& c : cells)
            csv << c.distribution.label() << ',' << c.n_schools << ','
                << decentsim::format_double(c.budget) << ',' << decentsim::format_double(c.cap)
                << ',' << decentsim::format_double(c.report.delta_centralized) << ','
                << decentsim::format_double(c.report.rho_decentralized) << ','
                << decentsim::format_double(c.report.lambda_gain) << ','
                << decentsim::format_double(c.report.standard_error) << ','
                << c.report.n_draws << "\n";
        if (out_csv) *out_csv = dup_string(csv.str());
        if (out_text) {
            std::ostringstream out;
            out << "Expected allocation gains, " << cells.front().report.n_draws
                << " draws per cell\n";
            out << "  distribution      budget    cap     delta      rho        gain\n";
            char line[160];
            for (const auto& c : cells) {
                std::snprintf(line, sizeof line, "  %-16s  %-8g  %-6g  %-9.5f  %-9.5f  %-9.5f\n",
                              c.distribution.label().c_str(), c.budget, c.cap,
                              c.report.delta_centralized, c.report.rho_decentralized,
                              c.report.lambda_gain);
                out << line;
            }
            *out_text = dup_string(out.str());
        }
    });
}

} // extern "C"
