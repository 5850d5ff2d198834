// decentsim command line. All functionality comes through the C API in
// decentsim.h; this file only parses flags, moves strings to files or stdout
// and maps ds_status to exit codes (0 ok, 1 usage, 2 data).
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "decentsim.h"

namespace {

struct ConfigHandle {
    ds_config* ptr = nullptr;
    ~ConfigHandle() { ds_config_free(ptr); }
};
struct PanelHandle {
    ds_panel* ptr = nullptr;
    ~PanelHandle() { ds_panel_free(ptr); }
};
struct FitHandle {
    ds_fit* ptr = nullptr;
    ~FitHandle() { ds_fit_free(ptr); }
};
struct ApiString {
    char* ptr = nullptr;
    ~ApiString() { ds_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

int exit_code(ds_status st) {
    switch (st) {
    case DS_OK: return 0;
    case DS_ERR_USAGE: return 1;
    default: return 2;
    }
}

// Returns the mapped exit code on failure, 0 on success.
int check(ds_status st, const char* context) {
    if (st == DS_OK) return 0;
    std::cerr << "decentsim: " << context << ": " << ds_last_error() << "\n";
    return exit_code(st);
}

int write_file(const std::string& path, const std::string& content, const char* what) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "decentsim: cannot open '" << path << "' for writing\n";
        return 2;
    }
    out << content;
    if (!out) {
        std::cerr << "decentsim: failed writing " << what << " to '" << path << "'\n";
        return 2;
    }
    return 0;
}

int load_config(const std::string& config_arg, bool have_seed, std::int64_t seed,
                ConfigHandle& cfg) {
    if (config_arg.empty() || config_arg == "default") {
        cfg.ptr = ds_config_default();
    } else if (int rc = check(ds_config_load(config_arg.c_str(), &cfg.ptr), "loading config")) {
        return rc;
    }
    if (have_seed) {
        std::string v = std::to_string(seed);
        if (int rc = check(ds_config_set(cfg.ptr, "seed", v.c_str()), "setting seed")) return rc;
        if (int rc = check(ds_config_set(cfg.ptr, "mc_base_seed", v.c_str()), "setting seed"))
            return rc;
        if (int rc = check(ds_config_set(cfg.ptr, "gains_seed", v.c_str()), "setting seed"))
            return rc;
    }
    return 0;
}

int print_config(const ConfigHandle& cfg) {
    ApiString text;
    if (int rc = check(ds_config_render(cfg.ptr, &text.ptr), "rendering config")) return rc;
    std::cout << text.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentsim: school-resource decentralization simulator and"
                 " difference-in-differences estimator"};
    app.require_subcommand(1);

    std::string config_arg, out_path, csv_path, json_path;
    std::int64_t seed = 0;
    bool have_seed = false;
    auto add_common = [&](CLI::App* cmd, bool with_out = true) {
        cmd->add_option("--config", config_arg, "config file path, or 'default'");
        cmd->add_option("--seed", seed, "override all seeds in the config")
            ->each([&](const std::string&) { have_seed = true; });
        if (with_out) cmd->add_option("--out", out_path, "output file (default: stdout)");
        cmd->add_flag("--print-config", "print the effective config and exit");
    };

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic pupil panel CSV");
    add_common(sim);

    // estimate
    auto* est = app.add_subcommand("estimate", "fit regressions on a panel CSV and render a table");
    std::string est_input, moderator, cluster = "school_id";
    std::vector<std::string> outcomes;
    bool with_fe = true, grade2_only = false, saturated = false;
    est->add_option("input", est_input, "panel CSV file")->required();
    est->add_option("--outcome", outcomes, "outcome column(s), default score_math score_lit");
    est->add_flag("--fe,!--no-fe", with_fe, "school fixed effects (default on)");
    est->add_option("--cluster", cluster, "cluster column (school_id only)");
    est->add_flag("--grade2-only", grade2_only, "restrict to the grade-2 subsample");
    est->add_flag("--saturated", saturated, "post, public and their product only");
    est->add_option("--moderator", moderator, "binary moderator column for effect heterogeneity");
    est->add_option("--out", out_path, "write the text table here (default: stdout)");
    est->add_option("--csv", csv_path, "also write the raw-number CSV twin here");

    // did
    auto* did = app.add_subcommand("did", "two-by-two difference-in-differences summary");
    std::string did_input, did_outcome = "score_math";
    bool placebo = false, no_covariates = false;
    did->add_option("input", did_input, "panel CSV file")->required();
    did->add_option("--outcome", did_outcome, "outcome column");
    did->add_flag("--no-covariates", no_covariates, "plain 2x2 cell means (the default)");
    did->add_flag("--placebo", placebo, "pre-trend placebo test (needs >= 3 periods)");
    did->add_option("--out", out_path, "output file (default: stdout)");
    did->add_option("--json", json_path, "write the JSON summary here");

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo study of the estimator on the configured DGP");
    std::int64_t reps = -1, threads = -1;
    add_common(mc);
    mc->add_option("--reps", reps, "number of replications");
    mc->add_option("--threads", threads, "worker threads");
    mc->add_option("--json", json_path, "write the JSON summary here");

    // allocate
    auto* alloc = app.add_subcommand("allocate", "informed allocation for a schools CSV");
    std::string alloc_input;
    double budget = 1.0, cap = -1.0;
    alloc->add_option("input", alloc_input, "schools CSV (school_id,s,e,l0)")->required();
    alloc->add_option("--budget", budget, "per-school budget")->required();
    alloc->add_option("--cap", cap, "max increment per school (default 3x budget)");
    alloc->add_option("--out", out_path, "write the plan CSV here (default: stdout)");

    // gains
    auto* gains = app.add_subcommand("gains", "expected decentralization gains over a grid");
    add_common(gains);
    gains->add_option("--csv", csv_path, "write the grid CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "decentsim: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 1;
    }

    auto emit = [&](const std::string& content, const char* what) -> int {
        if (out_path.empty()) {
            std::cout << content;
            return 0;
        }
        return write_file(out_path, content, what);
    };

    if (sim->parsed()) {
        ConfigHandle cfg;
        if (int rc = load_config(config_arg, have_seed, seed, cfg)) return rc;
        if (sim->count("--print-config")) return print_config(cfg);
        PanelHandle panel;
        if (int rc = check(ds_panel_simulate(cfg.ptr, &panel.ptr), "simulating panel")) return rc;
        if (out_path.empty()) {
            std::cerr << "decentsim: simulate needs --out <panel.csv>\n";
            return 1;
        }
        if (int rc = check(ds_panel_write_csv(panel.ptr, out_path.c_str()), "writing panel"))
            return rc;
        std::cerr << "wrote " << ds_panel_rows(panel.ptr) << " rows ("
                  << ds_panel_schools(panel.ptr) << " schools, " << ds_panel_periods(panel.ptr)
                  << " periods) to " << out_path << "\n";
        return 0;
    }

    if (est->parsed()) {
        if (cluster != "school_id") {
            std::cerr << "decentsim: --cluster only supports school_id\n";
            return 1;
        }
        if (outcomes.empty()) outcomes = {"score_math", "score_lit"};
        PanelHandle panel;
        if (int rc = check(ds_panel_read_csv(est_input.c_str(), &panel.ptr), "reading panel"))
            return rc;

        std::vector<std::unique_ptr<FitHandle>> fits;
        std::vector<std::string> titles;
        for (const auto& outcome : outcomes) {
            auto fh = std::make_unique<FitHandle>();
            ds_status st;
            if (!moderator.empty())
                st = ds_fit_heterogeneity(panel.ptr, outcome.c_str(), moderator.c_str(), &fh->ptr);
            else if (saturated)
                st = ds_fit_saturated(panel.ptr, outcome.c_str(), &fh->ptr);
            else
                st = ds_fit_paper_spec(panel.ptr, outcome.c_str(), with_fe ? 1 : 0,
                                       grade2_only ? 1 : 0, &fh->ptr);
            if (int rc = check(st, ("fitting " + outcome).c_str())) return rc;
            titles.push_back(outcome);
            fits.push_back(std::move(fh));
        }

        std::vector<const ds_fit*> raw;
        std::vector<const char*> title_ptrs;
        for (std::size_t i = 0; i < fits.size(); ++i) {
            raw.push_back(fits[i]->ptr);
            title_ptrs.push_back(titles[i].c_str());
        }
        ApiString text, csv;
        if (int rc = check(ds_render_table(raw.data(), raw.size(), title_ptrs.data(),
                                           &text.ptr, &csv.ptr),
                           "rendering table"))
            return rc;
        if (!csv_path.empty())
            if (int rc = write_file(csv_path, csv.str(), "table CSV")) return rc;
        return emit(text.str(), "table");
    }

    if (did->parsed()) {
        PanelHandle panel;
        if (int rc = check(ds_panel_read_csv(did_input.c_str(), &panel.ptr), "reading panel"))
            return rc;
        ApiString json, text;
        ds_status st = placebo
                           ? ds_did_placebo(panel.ptr, did_outcome.c_str(), &json.ptr, &text.ptr)
                           : ds_did_two_by_two(panel.ptr, did_outcome.c_str(), &json.ptr, &text.ptr);
        if (int rc = check(st, placebo ? "placebo test" : "did summary")) return rc;
        if (!json_path.empty())
            if (int rc = write_file(json_path, json.str(), "JSON summary")) return rc;
        return emit(text.str(), "did summary");
    }

    if (mc->parsed()) {
        ConfigHandle cfg;
        if (int rc = load_config(config_arg, have_seed, seed, cfg)) return rc;
        if (mc->count("--reps")) {
            if (reps < 1) {
                std::cerr << "decentsim: --reps must be >= 1\n";
                return 1;
            }
            if (int rc = check(ds_config_set(cfg.ptr, "mc_reps", std::to_string(reps).c_str()),
                               "setting reps"))
                return rc;
        }
        if (mc->count("--threads")) {
            if (threads < 1) {
                std::cerr << "decentsim: --threads must be >= 1\n";
                return 1;
            }
            if (int rc = check(ds_config_set(cfg.ptr, "mc_threads",
                                             std::to_string(threads).c_str()),
                               "setting threads"))
                return rc;
        }
        if (mc->count("--print-config")) return print_config(cfg);
        ApiString json, csv, text;
        if (int rc = check(ds_mc_run(cfg.ptr, &json.ptr, &csv.ptr, &text.ptr), "monte carlo"))
            return rc;
        if (!json_path.empty())
            if (int rc = write_file(json_path, json.str(), "JSON summary")) return rc;
        std::cerr << text.str();
        return emit(csv.str(), "per-replication CSV");
    }

    if (alloc->parsed()) {
        if (!(budget > 0)) {
            std::cerr << "decentsim: --budget must be > 0\n";
            return 1;
        }
        if (alloc->count("--cap") == 0) cap = 3.0 * budget;
        if (cap < budget) {
            std::cerr << "decentsim: --cap must be >= the per-school budget\n";
            return 1;
        }
        ApiString plan_csv, text;
        if (int rc = check(ds_allocate_file(alloc_input.c_str(), budget, cap, &plan_csv.ptr,
                                            &text.ptr),
                           "allocation"))
            return rc;
        std::cerr << text.str();
        return emit(plan_csv.str(), "plan CSV");
    }

    if (gains->parsed()) {
        ConfigHandle cfg;
        if (int rc = load_config(config_arg, have_seed, seed, cfg)) return rc;
        if (gains->count("--print-config")) return print_config(cfg);
        ApiString csv, text;
        if (int rc = check(ds_gains_grid(cfg.ptr, &csv.ptr, &text.ptr), "gains grid")) return rc;
        if (!csv_path.empty())
            if (int rc = write_file(csv_path, csv.str(), "grid CSV")) return rc;
        return emit(text.str(), "gains table");
    }

    return 1;
}
