#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "npcembed.h"

namespace {

const char* kGrid3 =
    "{\"layers\": [[0], [1, 2], [3, 4]],"
    " \"parent\": {\"1\": 0, \"2\": 0, \"3\": 1, \"4\": 2}}";

const char* kFlatFunnel =
    "{\"layers\": [[0], [1, 2, 3]],"
    " \"parent\": {\"1\": 0, \"2\": 0, \"3\": 0}, \"cyclic\": true}";

const char* kPathMetric =
    "{\"n\": 3, \"d\": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}";

std::string take(char* out) {
  REQUIRE(out != nullptr);
  std::string s(out);
  npce_string_free(out);
  return s;
}

struct Parsed {
  npce_instance* inst = nullptr;
  ~Parsed() { npce_instance_free(inst); }
};

}  // namespace

TEST_CASE("version string") {
  REQUIRE(npce_version() != nullptr);
  CHECK(std::strlen(npce_version()) > 0);
}

TEST_CASE("auto detection recognizes every instance kind") {
  struct Case {
    const char* text;
    const char* kind;
  };
  const Case cases[] = {
      {kGrid3, "pyramid"},
      {kFlatFunnel, "funnel"},
      {"{\"n\": 2, \"edges\": [[0, 1]]}", "graph"},
      {kPathMetric, "metric"},
      {"{\"graph\": {\"n\": 2, \"edges\": [[0, 1]]},"
       " \"cap\": [[0, 1, 1.0]], \"dem\": [[0, 1, 1.0]]}",
       "flow"},
      {"rho,theta\n0.5,0.1\n2.5,3.0\n", "points"},
  };
  for (const Case& c : cases) {
    Parsed p;
    CAPTURE(c.kind);
    REQUIRE(npce_instance_parse("auto", c.text, &p.inst) == NPCE_OK);
    CHECK(std::string(npce_instance_kind(p.inst)) == c.kind);
  }
}

TEST_CASE("parse failures set the thread-local error") {
  Parsed p;
  CHECK(npce_instance_parse("auto", "{\"layers\": [[0], [7]]}", &p.inst) == NPCE_USAGE);
  CHECK(std::strlen(npce_last_error()) > 0);
  CHECK(npce_instance_parse("pyramid", "not json", &p.inst) == NPCE_USAGE);
  CHECK(npce_instance_parse(nullptr, kGrid3, &p.inst) == NPCE_USAGE);
  CHECK(npce_instance_parse("auto", kGrid3, nullptr) == NPCE_USAGE);
}

TEST_CASE("gen produces instances and hashes its config") {
  char* out = nullptr;
  REQUIRE(npce_gen("{\"kind\": \"pyramid\", \"delta\": 3}", &out) == NPCE_OK);
  std::string report = take(out);
  CHECK(report.find("\"instance\"") != std::string::npos);
  CHECK(report.find("\"config_hash\"") != std::string::npos);

  // Randomized generation without a seed is refused.
  CHECK(npce_gen("{\"kind\": \"pyramid\", \"delta\": 3, \"width\": 2}", &out) == NPCE_USAGE);
  char* out2 = nullptr;
  REQUIRE(npce_gen("{\"kind\": \"pyramid\", \"delta\": 3, \"width\": 2, \"seed\": 4}", &out2) ==
          NPCE_OK);
  take(out2);
}

TEST_CASE("embed runs end to end and reports pass") {
  Parsed p;
  REQUIRE(npce_instance_parse("auto", kGrid3, &p.inst) == NPCE_OK);
  char* out = nullptr;
  REQUIRE(npce_embed(p.inst, "{\"seed\": 5, \"samples\": 2000}", &out) == NPCE_OK);
  std::string report(out);
  CHECK(npce_report_passed(report.c_str()) == 1);
  npce_string_free(out);
  CHECK(report.find("\"distortion\"") != std::string::npos);
  CHECK(report.find("\"vertical_check\"") != std::string::npos);

  // Same seed, same bytes.
  char* again = nullptr;
  REQUIRE(npce_embed(p.inst, "{\"seed\": 5, \"samples\": 2000}", &again) == NPCE_OK);
  CHECK(take(again) == report);

  // Seeds are mandatory for randomized commands.
  CHECK(npce_embed(p.inst, "{\"samples\": 2000}", &out) == NPCE_USAGE);
  CHECK(npce_embed(nullptr, "{\"seed\": 1}", &out) == NPCE_USAGE);
}

TEST_CASE("verify exact on a small metric") {
  Parsed p;
  REQUIRE(npce_instance_parse("auto", kPathMetric, &p.inst) == NPCE_OK);
  char* out = nullptr;
  REQUIRE(npce_verify(p.inst, "{\"level\": \"exact\"}", &out) == NPCE_OK);
  std::string report = take(out);
  CHECK(npce_report_passed(report.c_str()) == 1);
  CHECK(report.find("witness_reproduces_cstar") != std::string::npos);
}

TEST_CASE("verify quick needs a seed on randomized instances") {
  Parsed p;
  REQUIRE(npce_instance_parse("auto", kGrid3, &p.inst) == NPCE_OK);
  char* out = nullptr;
  CHECK(npce_verify(p.inst, "{\"level\": \"quick\"}", &out) == NPCE_USAGE);
  REQUIRE(npce_verify(p.inst, "{\"level\": \"quick\", \"seed\": 3}", &out) == NPCE_OK);
  std::string report = take(out);
  CHECK(npce_report_passed(report.c_str()) == 1);
}

TEST_CASE("oracle and flow gap and partition beta") {
  char* out = nullptr;
  REQUIRE(npce_oracle_c1(kPathMetric, &out) == NPCE_OK);
  std::string c1 = take(out);
  CHECK(c1.find("\"c_star\"") != std::string::npos);
  CHECK(npce_report_passed(c1.c_str()) == 1);

  const char* flow_text =
      "{\"graph\": {\"n\": 2, \"edges\": [[0, 1]]},"
      " \"cap\": [[0, 1, 1.0]], \"dem\": [[0, 1, 1.0]]}";
  REQUIRE(npce_flow_gap(flow_text, &out) == NPCE_OK);
  std::string gap = take(out);
  CHECK(gap.find("\"weak_duality_ok\": true") != std::string::npos);

  REQUIRE(npce_partition_beta("{\"n\": 3, \"edges\": [[0, 1], [1, 2]]}",
                              "{\"seed\": 2}", &out) == NPCE_OK);
  std::string beta = take(out);
  CHECK(beta.find("\"beta\"") != std::string::npos);
  CHECK(npce_report_passed(beta.c_str()) == 1);

  CHECK(npce_oracle_c1("not json", &out) == NPCE_USAGE);
  CHECK(npce_partition_beta("{\"n\": 2, \"edges\": [[0, 1]]}", "{}", &out) == NPCE_USAGE);
}

TEST_CASE("enumeration budget env var flows through as a budget error") {
  Parsed p;
  REQUIRE(npce_instance_parse("auto", kGrid3, &p.inst) == NPCE_OK);
  setenv("NPCEMBED_BUDGET", "1", 1);
  char* out = nullptr;
  npce_status st = npce_verify(p.inst, "{\"level\": \"exact\"}", &out);
  unsetenv("NPCEMBED_BUDGET");
  CHECK(st == NPCE_BUDGET);
  CHECK(std::strlen(npce_last_error()) > 0);

  // With the default budget the same call succeeds.
  REQUIRE(npce_verify(p.inst, "{\"level\": \"exact\"}", &out) == NPCE_OK);
  std::string report = take(out);
  CHECK(npce_report_passed(report.c_str()) == 1);
  CHECK(report.find("uniform_boundary_exact") != std::string::npos);
  CHECK(report.find("vertical_pairs_exact") != std::string::npos);
}

TEST_CASE("report_passed reads the pass flag") {
  CHECK(npce_report_passed("{\"pass\": true}") == 1);
  CHECK(npce_report_passed("{\"pass\": false}") == 0);
  CHECK(npce_report_passed("not json") == 0);
  CHECK(npce_report_passed(nullptr) == 0);
}
