#include "npcembed.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "api.hpp"
#include "util.hpp"

using npce::Err;
using npce::Error;

struct npce_instance {
  npce::Instance inst;
};

namespace {

thread_local std::string g_last_error;

npce_status status_of(Err kind) {
  switch (kind) {
    case Err::Usage:
      return NPCE_USAGE;
    case Err::Budget:
      return NPCE_BUDGET;
    default:
      return NPCE_CHECK;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs fn, routes its string result into *out, and folds every failure into
// a status plus the thread-local message.
template <typename Fn>
npce_status guarded(char** out, Fn&& fn) {
  if (out == nullptr) {
    g_last_error = "output pointer is null";
    return NPCE_USAGE;
  }
  try {
    std::string result = fn();
    char* dup = dup_string(result);
    if (dup == nullptr) {
      g_last_error = "out of memory";
      return NPCE_CHECK;
    }
    *out = dup;
    return NPCE_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NPCE_CHECK;
  }
}

}  // namespace

extern "C" {

npce_status npce_instance_parse(const char* kind, const char* text, npce_instance** out) {
  if (kind == nullptr || text == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return NPCE_USAGE;
  }
  try {
    auto* handle = new npce_instance{npce::parse_instance(kind, text)};
    *out = handle;
    return NPCE_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NPCE_CHECK;
  }
}

void npce_instance_free(npce_instance* inst) { delete inst; }

const char* npce_instance_kind(const npce_instance* inst) {
  return inst == nullptr ? "" : inst->inst.kind.c_str();
}

npce_status npce_gen(const char* config_json, char** out) {
  std::string cfg = config_json == nullptr ? "{}" : config_json;
  return guarded(out, [&] { return npce::run_gen(cfg); });
}

npce_status npce_embed(const npce_instance* inst, const char* config_json, char** out) {
  if (inst == nullptr) {
    g_last_error = "null instance";
    return NPCE_USAGE;
  }
  std::string cfg = config_json == nullptr ? "{}" : config_json;
  return guarded(out, [&] { return npce::run_embed(inst->inst, cfg); });
}

npce_status npce_verify(const npce_instance* inst, const char* config_json, char** out) {
  if (inst == nullptr) {
    g_last_error = "null instance";
    return NPCE_USAGE;
  }
  std::string cfg = config_json == nullptr ? "{}" : config_json;
  return guarded(out, [&] { return npce::run_verify(inst->inst, cfg); });
}

npce_status npce_oracle_c1(const char* metric_json, char** out) {
  if (metric_json == nullptr) {
    g_last_error = "null metric";
    return NPCE_USAGE;
  }
  return guarded(out, [&] { return npce::run_oracle_c1(metric_json); });
}

npce_status npce_flow_gap(const char* flow_json, char** out) {
  if (flow_json == nullptr) {
    g_last_error = "null flow instance";
    return NPCE_USAGE;
  }
  return guarded(out, [&] { return npce::run_flow_gap(flow_json); });
}

npce_status npce_partition_beta(const char* graph_json, const char* config_json, char** out) {
  if (graph_json == nullptr) {
    g_last_error = "null graph";
    return NPCE_USAGE;
  }
  std::string cfg = config_json == nullptr ? "{}" : config_json;
  return guarded(out, [&] { return npce::run_partition_beta(graph_json, cfg); });
}

int npce_report_passed(const char* report_json) {
  if (report_json == nullptr) return 0;
  try {
    return npce::report_passed(report_json) ? 1 : 0;
  } catch (...) {
    return 0;
  }
}

void npce_string_free(char* s) { std::free(s); }

const char* npce_last_error(void) { return g_last_error.c_str(); }

const char* npce_version(void) { return "0.1.0"; }

}  // extern "C"
