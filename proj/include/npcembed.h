/* npcembed.h - C interface to the npcembed library.
 *
 * All functions returning npce_status put a JSON report into *out on
 * success. Returned strings are heap-allocated; release them with
 * npce_string_free. On failure *out is left untouched and
 * npce_last_error() describes what went wrong (thread-local).
 */
#ifndef NPCEMBED_H
#define NPCEMBED_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum npce_status {
  NPCE_OK = 0,     /* command ran */
  NPCE_CHECK = 1,  /* input failed validation or an internal check */
  NPCE_USAGE = 2,  /* malformed arguments or config */
  NPCE_BUDGET = 3  /* enumeration or size budget exceeded */
} npce_status;

/* A parsed instance: pyramid, funnel, point set, graph, metric, or flow. */
typedef struct npce_instance npce_instance;

/* kind: one of "pyramid", "funnel", "points", "graph", "metric", "flow",
 * or "auto" to detect from the content. */
npce_status npce_instance_parse(const char* kind, const char* text,
                                npce_instance** out);
void npce_instance_free(npce_instance* inst);

/* The detected kind; the string lives as long as the instance. */
const char* npce_instance_kind(const npce_instance* inst);

/* Commands. Configs are JSON objects (NULL means "{}"). */
npce_status npce_gen(const char* config_json, char** out);
npce_status npce_embed(const npce_instance* inst, const char* config_json, char** out);
npce_status npce_verify(const npce_instance* inst, const char* config_json, char** out);
npce_status npce_oracle_c1(const char* metric_json, char** out);
npce_status npce_flow_gap(const char* flow_json, char** out);
npce_status npce_partition_beta(const char* graph_json, const char* config_json, char** out);

/* 1 when every check recorded in the report passed, else 0. */
int npce_report_passed(const char* report_json);

void npce_string_free(char* s);

/* Message from the most recent failing call on this thread. */
const char* npce_last_error(void);

const char* npce_version(void);

#ifdef __cplusplus
}
#endif

#endif /* NPCEMBED_H */
