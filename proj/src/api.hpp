// api.hpp - string-level command surface: parse instances, run commands on
// JSON configs, return JSON reports. Shared by the C library and the CLI.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core.hpp"
#include "oracle.hpp"
#include "pyramid.hpp"
#include "surface.hpp"

namespace npce {

// One parsed input of any supported kind. Only the member named by `kind`
// is meaningful.
struct Instance {
  std::string kind;  // pyramid | funnel | points | graph | metric | flow
  Pyramid pyramid;
  Funnel funnel;
  std::vector<HPoint> points;
  Graph graph;
  FiniteMetric metric;
  FlowInstance flow;
};

// kind may name a concrete kind or be "auto" to detect from the content
// (JSON field shapes, else point CSV). Instances are validated.
Instance parse_instance(const std::string& kind, const std::string& text);

// Commands. Configs are JSON objects; every randomized report embeds the
// seed and a hash of the config it ran under. Failures throw Error.
std::string run_gen(const std::string& config_json);
std::string run_embed(const Instance& inst, const std::string& config_json);
std::string run_verify(const Instance& inst, const std::string& config_json);
std::string run_oracle_c1(const std::string& metric_json);
std::string run_flow_gap(const std::string& flow_json);
std::string run_partition_beta(const std::string& graph_json, const std::string& config_json);

// Enumeration cap for exact modes: NPCEMBED_BUDGET env var, default 4000000.
uint64_t enumeration_budget();

// True when the verify report says every check passed.
bool report_passed(const std::string& report_json);

}  // namespace npce
