#ifndef CONTINET_H
#define CONTINET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a fallible call. The first codes match the CLI exit codes.
typedef enum ContinetStatus {
  CONTINET_STATUS_OK = 0,
  // Bad input data, configuration or parameter.
  CONTINET_STATUS_VALIDATION = 1,
  // A route could not be found.
  CONTINET_STATUS_ROUTING = 2,
  CONTINET_STATUS_IO = 3,
  CONTINET_STATUS_NULL_POINTER = 4,
  CONTINET_STATUS_INVALID_UTF8 = 5,
  CONTINET_STATUS_OUT_OF_RANGE = 6,
  // A Rust panic was caught at the boundary.
  CONTINET_STATUS_PANIC = 7,
} ContinetStatus;

// CSV tables a plan can render.
typedef enum ContinetTable {
  CONTINET_TABLE_ASSIGNMENTS = 0,
  CONTINET_TABLE_ROUTES = 1,
  CONTINET_TABLE_TRAVERSALS = 2,
  CONTINET_TABLE_COSTS = 3,
} ContinetTable;

// A run configuration.
typedef struct ContinetConfig ContinetConfig;

// Loaded country, cable and adjacency tables.
typedef struct ContinetInputs ContinetInputs;

// The result of a full pipeline run.
typedef struct ContinetPlan ContinetPlan;

// One computed route; node names are owned by the handle.
typedef struct ContinetRoute ContinetRoute;

// Headline costs of a plan.
typedef struct ContinetTotals {
  double intra_total;
  double inter_total;
  double continental_total;
  // Only meaningful when `has_unclustered` is set.
  double unclustered_total;
  bool has_unclustered;
  uintptr_t clusters;
  uintptr_t jobs;
  uintptr_t hops;
} ContinetTotals;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next failing call on the same thread.
const char *continet_last_error(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void continet_string_free(char *s);

// Great-circle distance in km; NaN when a coordinate is out of range.
double continet_haversine_km(double lat1, double lon1, double lat2, double lon2);

// The default configuration: AU regions over the bundled tables.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum ContinetStatus continet_config_default(struct ContinetConfig **out);

// Parses configuration text (`key = value` lines). Relative paths in it are
// taken relative to the working directory.
//
// # Safety
// `config_text` must be a NUL-terminated string; `out` a valid handle slot.
enum ContinetStatus continet_config_parse(const char *config_text, struct ContinetConfig **out);

// Reads a configuration file; relative paths resolve against its directory.
//
// # Safety
// `path` must be a NUL-terminated string; `out` a valid handle slot.
enum ContinetStatus continet_config_load(const char *path, struct ContinetConfig **out);

// # Safety
// `config` must be a live handle.
enum ContinetStatus continet_config_set_seed(struct ContinetConfig *config, uint64_t seed);

// Evaluates the ants of an iteration concurrently.
//
// # Safety
// `config` must be a live handle.
enum ContinetStatus continet_config_set_parallel(struct ContinetConfig *config, bool parallel);

// Canonical text form of the configuration.
//
// # Safety
// `config` must be a live handle; `out` a valid string slot.
enum ContinetStatus continet_config_to_text(const struct ContinetConfig *config, char **out);

// # Safety
// `config` must be NULL or a handle that has not been freed.
void continet_config_free(struct ContinetConfig *config);

// The bundled reference tables.
//
// # Safety
// `out` must be a valid handle slot.
enum ContinetStatus continet_inputs_reference(struct ContinetInputs **out);

// Loads the tables named by `config` (bundled ones where it names none).
//
// # Safety
// `config` must be a live handle; `out` a valid handle slot.
enum ContinetStatus continet_inputs_load(const struct ContinetConfig *config,
                                         struct ContinetInputs **out);

// Number of countries, or 0 for NULL.
//
// # Safety
// `inputs` must be NULL or a live handle.
uintptr_t continet_inputs_country_count(const struct ContinetInputs *inputs);

// Countries with at least `threshold` cable landings, as
// `country_id,landings` CSV.
//
// # Safety
// `inputs` must be a live handle; `out` a valid string slot.
enum ContinetStatus continet_inputs_pcgs(const struct ContinetInputs *inputs,
                                         uint32_t threshold,
                                         char **out);

// # Safety
// `inputs` must be NULL or a handle that has not been freed.
void continet_inputs_free(struct ContinetInputs *inputs);

// Runs the whole pipeline.
//
// # Safety
// `config` and `inputs` must be live handles; `out` a valid handle slot.
enum ContinetStatus continet_plan_run(const struct ContinetConfig *config,
                                      const struct ContinetInputs *inputs,
                                      struct ContinetPlan **out);

// # Safety
// `plan` must be a live handle; `out` a valid pointer.
enum ContinetStatus continet_plan_totals(const struct ContinetPlan *plan,
                                         struct ContinetTotals *out);

// Label, member count and traversal cost of cluster `index`. Any of the
// out-parameters may be NULL.
//
// # Safety
// `plan` must be a live handle; non-NULL out-parameters must be valid.
enum ContinetStatus continet_plan_cluster(const struct ContinetPlan *plan,
                                          uintptr_t index,
                                          char **label,
                                          uintptr_t *members,
                                          double *cost);

// Renders one of the plan's CSV tables.
//
// # Safety
// `plan` must be a live handle; `out` a valid string slot.
enum ContinetStatus continet_plan_csv(const struct ContinetPlan *plan,
                                      enum ContinetTable table,
                                      char **out);

// GeoJSON FeatureCollection of the plan.
//
// # Safety
// `plan` and `inputs` must be live handles; `out` a valid string slot.
enum ContinetStatus continet_plan_geojson(const struct ContinetPlan *plan,
                                          const struct ContinetInputs *inputs,
                                          char **out);

// Writes every export plus `manifest.json` into `dir`.
//
// # Safety
// Handles must be live; `dir` a NUL-terminated string.
enum ContinetStatus continet_plan_write(const struct ContinetPlan *plan,
                                        const struct ContinetConfig *config,
                                        const struct ContinetInputs *inputs,
                                        const char *dir);

// # Safety
// `plan` must be NULL or a handle that has not been freed.
void continet_plan_free(struct ContinetPlan *plan);

// Routes `source` to a gateway of its own cluster, exactly as the plan
// would, without running the other jobs.
//
// # Safety
// Handles must be live; `source` a NUL-terminated string; `out` a valid slot.
enum ContinetStatus continet_route_find(const struct ContinetConfig *config,
                                        const struct ContinetInputs *inputs,
                                        const char *source,
                                        struct ContinetRoute **out);

// Total route cost, or NaN for NULL.
//
// # Safety
// `route` must be NULL or a live handle.
double continet_route_trc(const struct ContinetRoute *route);

// Number of nodes on the path, or 0 for NULL.
//
// # Safety
// `route` must be NULL or a live handle.
uintptr_t continet_route_len(const struct ContinetRoute *route);

// Node `index` of the path, or NULL when out of range. The string is owned
// by the route and lives until the route is freed.
//
// # Safety
// `route` must be NULL or a live handle.
const char *continet_route_node(const struct ContinetRoute *route, uintptr_t index);

// # Safety
// `route` must be NULL or a handle that has not been freed.
void continet_route_free(struct ContinetRoute *route);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CONTINET_H */
