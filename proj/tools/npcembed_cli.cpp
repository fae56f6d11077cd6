// npcembed command-line front end. Thin shell over the C API: builds a JSON
// config from flags, feeds instance files through, writes reports.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "npcembed.h"

namespace {

using ojson = nlohmann::ordered_json;

struct Common {
  std::string out;
  bool force = false;
  uint64_t seed = 0;
  uint64_t samples = 0;
  uint64_t threads = 0;
  double tolerance = 0;
  CLI::Option* oseed = nullptr;
  CLI::Option* osamples = nullptr;
  CLI::Option* othreads = nullptr;
  CLI::Option* otolerance = nullptr;

  bool seed_given() const { return oseed != nullptr && oseed->count() > 0; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Write the report to this file (default stdout)");
  cmd->add_flag("--force", c.force, "Allow overwriting existing output files");
  c.oseed = cmd->add_option("--seed", c.seed, "Seed for randomized runs");
  c.osamples = cmd->add_option("--samples", c.samples, "Monte Carlo sample count");
  c.othreads = cmd->add_option("--threads", c.threads, "Worker threads (default: available cores)");
  c.otolerance = cmd->add_option("--tolerance", c.tolerance, "Numeric tolerance override");
}

void fill_common(ojson& cfg, const Common& c) {
  if (c.seed_given()) cfg["seed"] = c.seed;
  if (c.osamples->count() > 0) cfg["samples"] = c.samples;
  if (c.othreads->count() > 0) cfg["threads"] = c.threads;
  if (c.otolerance->count() > 0) cfg["tolerance"] = c.tolerance;
}

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 2;
}

int write_file(const std::string& path, const std::string& content, bool force) {
  if (!force && std::filesystem::exists(path)) {
    std::cerr << "error: " << path << " exists; pass --force to overwrite\n";
    return 2;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return 2;
  }
  f << content;
  return 0;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

int fail_status(npce_status st) {
  std::cerr << "error: " << npce_last_error() << "\n";
  return static_cast<int>(st);
}

// Reports carry their per-pair rows as JSON; the CSV sibling file is the
// plot-ready form.
std::string pairs_to_csv(const ojson& pairs) {
  std::ostringstream csv;
  bool has_est = !pairs.empty() && pairs.front().contains("f_hat");
  csv << (has_est ? "x,y,d_graph,d_embed,f_hat,f0,g_hat,stderr\n"
                  : "x,y,d_graph,d_embed\n");
  char buf[64];
  auto num = [&](const ojson& v) {
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return std::string(buf);
  };
  for (const ojson& row : pairs) {
    csv << row["x"].get<uint64_t>() << "," << row["y"].get<uint64_t>() << ","
        << num(row["d_graph"]) << "," << num(row["d_embed"]);
    if (has_est)
      csv << "," << num(row["f_hat"]) << "," << num(row["f0"]) << ","
          << num(row["g_hat"]) << "," << num(row["stderr"]);
    csv << "\n";
  }
  return csv.str();
}

int emit_report(const std::string& report, const Common& c) {
  if (c.out.empty()) {
    std::cout << report << "\n";
  } else {
    int rc = write_file(c.out, report + "\n", c.force);
    if (rc != 0) return rc;
    ojson j = ojson::parse(report, nullptr, false);
    if (!j.is_discarded() && j.contains("pairs") && j["pairs"].is_array()) {
      int rc2 = write_file(c.out + ".pairs.csv", pairs_to_csv(j["pairs"]), c.force);
      if (rc2 != 0) return rc2;
    }
  }
  return npce_report_passed(report.c_str()) ? 0 : 1;
}

int run_gen(const Common& c, const std::string& kind, uint64_t delta, bool delta_given,
            uint64_t width, bool width_given, bool grid, double radius, bool radius_given,
            uint64_t count, bool count_given, double min_dist, bool min_dist_given) {
  ojson cfg;
  cfg["kind"] = kind;
  if (c.seed_given()) cfg["seed"] = c.seed;
  if (delta_given) cfg["delta"] = delta;
  if (width_given) cfg["width"] = width;
  if (grid) cfg["grid"] = true;
  if (radius_given) cfg["radius"] = radius;
  if (count_given) cfg["count"] = count;
  if (min_dist_given) cfg["min_dist"] = min_dist;
  if (c.osamples->count() > 0) cfg["samples"] = c.samples;

  char* report = nullptr;
  npce_status st = npce_gen(cfg.dump().c_str(), &report);
  if (st != NPCE_OK) return fail_status(st);
  std::string text(report);
  npce_string_free(report);

  if (c.out.empty()) {
    std::cout << text << "\n";
    return 0;
  }
  ojson j = ojson::parse(text);
  std::string instance = j["instance"].is_string() ? j["instance"].get<std::string>()
                                                   : j["instance"].dump(2) + "\n";
  int rc = write_file(c.out, instance, c.force);
  if (rc != 0) return rc;
  j.erase("instance");
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_on_instance(const Common& c, const std::string& path, const std::string& level,
                    uint64_t peel_samples, bool peel_given, bool verify) {
  std::string text;
  if (!read_file(path, text)) return usage_error("cannot read " + path);

  npce_instance* inst = nullptr;
  npce_status st = npce_instance_parse("auto", text.c_str(), &inst);
  if (st != NPCE_OK) return fail_status(st);

  ojson cfg;
  fill_common(cfg, c);
  if (!level.empty()) cfg["level"] = level;
  if (peel_given) cfg["peel_samples"] = peel_samples;

  char* report = nullptr;
  st = verify ? npce_verify(inst, cfg.dump().c_str(), &report)
              : npce_embed(inst, cfg.dump().c_str(), &report);
  npce_instance_free(inst);
  if (st != NPCE_OK) return fail_status(st);
  std::string out(report);
  npce_string_free(report);
  return emit_report(out, c);
}

int run_json_command(const Common& c, const std::string& path,
                     npce_status (*fn)(const char*, char**)) {
  std::string text;
  if (!read_file(path, text)) return usage_error("cannot read " + path);
  char* report = nullptr;
  npce_status st = fn(text.c_str(), &report);
  if (st != NPCE_OK) return fail_status(st);
  std::string out(report);
  npce_string_free(report);
  return emit_report(out, c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"npcembed: L1 embeddings of layered planar metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(npce_version()));

  // gen
  Common gen_c;
  std::string gen_kind;
  uint64_t gen_delta = 0, gen_width = 0, gen_count = 0;
  bool gen_grid = false;
  double gen_radius = 0, gen_min_dist = 1.0;
  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("kind", gen_kind, "pyramid | funnel | hyperbolic-points")->required();
  auto* od = gen->add_option("--delta", gen_delta, "Layer count");
  auto* ow = gen->add_option("--width", gen_width, "Maximum layer width (random shapes)");
  gen->add_flag("--grid", gen_grid, "Two-wide grid pyramid");
  auto* oradius = gen->add_option("--radius", gen_radius, "Disk radius");
  auto* ocount = gen->add_option("--count", gen_count, "Point count");
  auto* omin = gen->add_option("--min-dist", gen_min_dist, "Minimum pairwise distance");
  add_common(gen, gen_c);

  // embed
  Common embed_c;
  std::string embed_path;
  uint64_t embed_peel = 0;
  auto* embed = app.add_subcommand("embed", "Embed an instance into L1 cuts");
  embed->add_option("input", embed_path, "Instance file")->required();
  auto* opeel = embed->add_option("--peel-samples", embed_peel, "Peeling rounds for funnels");
  add_common(embed, embed_c);

  // verify
  Common verify_c;
  std::string verify_path, verify_level = "quick";
  uint64_t verify_peel = 0;
  auto* verify = app.add_subcommand("verify", "Run the checks that apply to an instance");
  verify->add_option("input", verify_path, "Instance file")->required();
  verify->add_option("--level", verify_level, "quick | exact")
      ->check(CLI::IsMember({"quick", "exact"}));
  auto* vpeel = verify->add_option("--peel-samples", verify_peel, "Peeling rounds for funnels");
  add_common(verify, verify_c);

  // oracle
  Common oracle_c;
  std::string oracle_path;
  auto* oracle = app.add_subcommand("oracle", "Exact L1 distortion of a small metric");
  oracle->add_option("input", oracle_path, "Metric JSON file")->required();
  add_common(oracle, oracle_c);

  // flow-gap
  Common flow_c;
  std::string flow_path;
  auto* flow = app.add_subcommand("flow-gap", "Sparsest cut vs concurrent flow");
  flow->add_option("input", flow_path, "Flow instance JSON file")->required();
  add_common(flow, flow_c);

  // partition-beta
  Common beta_c;
  std::string beta_path;
  double beta_scale = 0;
  uint64_t beta_partitions = 0;
  auto* beta = app.add_subcommand("partition-beta", "Estimate the partition modulus");
  beta->add_option("input", beta_path, "Graph JSON file")->required();
  auto* oscale = beta->add_option("--scale", beta_scale, "Partition diameter bound");
  auto* oparts = beta->add_option("--partitions", beta_partitions, "Partitions to sample");
  add_common(beta, beta_c);

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed())
    return run_gen(gen_c, gen_kind, gen_delta, od->count() > 0, gen_width, ow->count() > 0,
                   gen_grid, gen_radius, oradius->count() > 0, gen_count, ocount->count() > 0,
                   gen_min_dist, omin->count() > 0);
  if (embed->parsed()) {
    if (!embed_c.seed_given()) return usage_error("embed requires --seed");
    return run_on_instance(embed_c, embed_path, "", embed_peel, opeel->count() > 0, false);
  }
  if (verify->parsed())
    return run_on_instance(verify_c, verify_path, verify_level, verify_peel,
                           vpeel->count() > 0, true);
  if (oracle->parsed()) return run_json_command(oracle_c, oracle_path, npce_oracle_c1);
  if (flow->parsed()) return run_json_command(flow_c, flow_path, npce_flow_gap);
  if (beta->parsed()) {
    std::string text;
    if (!read_file(beta_path, text)) return usage_error("cannot read " + beta_path);
    if (!beta_c.seed_given()) return usage_error("partition-beta requires --seed");
    ojson cfg;
    fill_common(cfg, beta_c);
    if (oscale->count() > 0) cfg["scale"] = beta_scale;
    if (oparts->count() > 0) cfg["partitions"] = beta_partitions;
    char* report = nullptr;
    npce_status st = npce_partition_beta(text.c_str(), cfg.dump().c_str(), &report);
    if (st != NPCE_OK) return fail_status(st);
    std::string out(report);
    npce_string_free(report);
    return emit_report(out, beta_c);
  }
  return 2;
}
