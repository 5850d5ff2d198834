/* decentsim C API: simulation, estimation and reporting behind opaque
 * handles. Every function that can fail returns ds_status; on failure the
 * message is retrievable with ds_last_error() (thread-local). Strings
 * returned through char** are heap-allocated by the library and must be
 * released with ds_string_free(); handles with their matching *_free().
 */
#ifndef DECENTSIM_H
#define DECENTSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ds_status {
    DS_OK = 0,
    DS_ERR_USAGE = 1,   /* bad arguments, flags, config keys */
    DS_ERR_DATA = 2,    /* malformed or degenerate input data */
    DS_ERR_INTERNAL = 3 /* unexpected failure */
} ds_status;

typedef struct ds_config ds_config; /* run configuration */
typedef struct ds_panel ds_panel;   /* pupil-period panel */
typedef struct ds_fit ds_fit;       /* regression fit result */

const char* ds_last_error(void);
void ds_string_free(char* s);

/* ---- configuration ---- */
ds_config* ds_config_default(void);
ds_status ds_config_load(const char* path, ds_config** out);
ds_status ds_config_set(ds_config* cfg, const char* key, const char* value);
ds_status ds_config_render(const ds_config* cfg, char** out_text);
void ds_config_free(ds_config* cfg);

/* ---- panel data ---- */
ds_status ds_panel_simulate(const ds_config* cfg, ds_panel** out);
ds_status ds_panel_read_csv(const char* path, ds_panel** out);
ds_status ds_panel_write_csv(const ds_panel* panel, const char* path);
int64_t ds_panel_rows(const ds_panel* panel);
int64_t ds_panel_schools(const ds_panel* panel);
int ds_panel_periods(const ds_panel* panel);
void ds_panel_free(ds_panel* panel);

/* ---- regression fits ----
 * outcome: "score_math" or "score_lit". Saturated = post, public and their
 * product only (no covariates, no fixed effects). The moderator variant adds
 * post:moderator and post:public:moderator to the fixed-effects model.
 */
ds_status ds_fit_saturated(const ds_panel* panel, const char* outcome, ds_fit** out);
ds_status ds_fit_paper_spec(const ds_panel* panel, const char* outcome, int with_fe,
                            int grade2_only, ds_fit** out);
ds_status ds_fit_heterogeneity(const ds_panel* panel, const char* outcome,
                               const char* moderator, ds_fit** out);
ds_status ds_fit_coef(const ds_fit* fit, const char* term, double* estimate, double* se,
                      double* t_stat);
double ds_fit_r_squared(const ds_fit* fit);
int64_t ds_fit_n_obs(const ds_fit* fit);
int64_t ds_fit_n_clusters(const ds_fit* fit);
void ds_fit_free(ds_fit* fit);

/* Paper-style regression table; one column per fit. titles may be NULL. */
ds_status ds_render_table(const ds_fit* const* fits, size_t n_fits,
                          const char* const* titles, char** out_text, char** out_csv);

/* ---- difference-in-differences summaries ---- */
ds_status ds_did_two_by_two(const ds_panel* panel, const char* outcome, char** out_json,
                            char** out_text);
ds_status ds_did_placebo(const ds_panel* panel, const char* outcome, char** out_json,
                         char** out_text);

/* ---- monte carlo over the configured DGP ---- */
ds_status ds_mc_run(const ds_config* cfg, char** out_json, char** out_csv, char** out_text);

/* ---- allocation model ---- */
ds_status ds_allocate_file(const char* schools_csv_path, double budget, double cap,
                           char** out_plan_csv, char** out_text);
ds_status ds_gains_grid(const ds_config* cfg, char** out_csv, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* DECENTSIM_H */
