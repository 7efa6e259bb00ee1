#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "checkin/attacker.hpp"
#include "checkin/cli.hpp"
#include "checkin/world.hpp"
#include "support.hpp"

using namespace checkin;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = CHECKIN_SOURCE_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::pair<std::string, std::string>> tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out.emplace_back(fs::relative(e.path(), root).string(), testing::slurp(e.path()));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string config(const char* name) { return (kSource / "configs" / name).string(); }

}  // namespace

TEST_CASE("usage errors exit 1 with a message") {
  auto r = invoke({});
  CHECK(r.code == cli::kExitUsage);
  CHECK_FALSE(r.err.empty());
  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({"run"}).code == cli::kExitUsage);
  CHECK(invoke({"run", "--config", config("tour.json"), "--seed", "abc"}).code == cli::kExitUsage);
  r = invoke({"run", "--config", "/nonexistent/missing.json"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("missing.json") != std::string::npos);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("run twice with the same seed gives identical outputs") {
  const auto a = testing::scratch("cli_run_a");
  const auto b = testing::scratch("cli_run_b");
  auto r = invoke({"run", "--config", config("tour.json"), "--seed", "7", "--out", a.string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("valid 25/25") != std::string::npos);
  REQUIRE(invoke({"run", "--config", config("tour.json"), "--seed", "7", "--out", b.string()}).code ==
          cli::kExitOk);
  CHECK(tree(a) == tree(b));
  CHECK(fs::exists(a / "metrics.json"));
}

TEST_CASE("generate skips attacks and analytics") {
  const auto dir = testing::scratch("cli_generate");
  REQUIRE(invoke({"generate", "--config", config("tour.json"), "--out", dir.string()}).code ==
          cli::kExitOk);
  CHECK(fs::exists(dir / "exports" / "UserInfo.csv"));
  CHECK_FALSE(fs::exists(dir / "report.csv"));
  CHECK_FALSE(fs::exists(dir / "attacks"));
}

TEST_CASE("detect matches the golden report") {
  const auto dir = testing::scratch("cli_detect");
  const auto r = invoke({"detect", "--in", (kSource / "tests" / "fixtures" / "detect").string(),
                      "--out", (dir / "report.csv").string(), "--curves", dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out == "flagged 2 of 4 users\n");
  CHECK(testing::slurp(dir / "report.csv") ==
        testing::slurp(kSource / "tests" / "fixtures" / "detect_report.golden.csv"));
  CHECK(fs::exists(dir / "curve_recent_ratio.csv"));
  CHECK(fs::exists(dir / "curve_badges.csv"));
  CHECK(invoke({"detect", "--in", dir.string(), "--out", (dir / "x.csv").string()}).code ==
        cli::kExitRuntime);
}

TEST_CASE("plan, execute, export and replay from the command line") {
  const auto dir = testing::scratch("cli_pipeline");
  REQUIRE(invoke({"run", "--config", config("sweep.json"), "--out", (dir / "base").string()}).code ==
          cli::kExitOk);
  const fs::path exports = dir / "base" / "exports";

  auto r = invoke({"attack-plan", "--in", exports.string(), "--out", (dir / "tour.jsonl").string(),
                "--tour-from", "56", "--steps", "8", "--step-deg", "0.004", "--start-time", "1262600000"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("planned 9 check-ins") != std::string::npos);
  CHECK(r.out.find("warning") == std::string::npos);

  r = invoke({"attack-plan", "--in", exports.string(), "--out", (dir / "steps.jsonl").string(),
           "--from-venue", "1", "--step", "N:445", "--step", "E:352", "--start-time", "1262600000"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("-> venue 11") != std::string::npos);
  CHECK(r.out.find("-> venue 12") != std::string::npos);

  r = invoke({"attack-plan", "--in", exports.string(), "--out", (dir / "sweep.jsonl").string(),
           "--sweep", "--name", "plain", "--repeat-days", "2", "--targets-out",
           (dir / "targets.csv").string(), "--start-time", "1262600000"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("planned 32 check-ins at 16 venues") != std::string::npos);
  CHECK(attacker::load_target_list(dir / "targets.csv").size() == 16);

  CHECK(invoke({"attack-plan", "--in", exports.string(), "--out", (dir / "x.jsonl").string()}).code ==
        cli::kExitUsage);
  CHECK(invoke({"attack-plan", "--in", exports.string(), "--out", (dir / "x.jsonl").string(),
             "--sweep", "--victim", "1"})
            .code == cli::kExitUsage);
  CHECK(invoke({"attack-plan", "--in", exports.string(), "--out", (dir / "x.jsonl").string(),
             "--victim", "999"})
            .code == cli::kExitRuntime);

  r = invoke({"attack-exec", "--state", (dir / "base" / "state.bin").string(), "--schedule",
           (dir / "sweep.jsonl").string(), "--true-location", "29.7604,-95.3698", "--out",
           (dir / "after").string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("valid 32/32") != std::string::npos);
  CHECK(r.out.find("mayorships 16") != std::string::npos);
  CHECK(fs::exists(dir / "after" / "exports" / "events.jsonl"));

  r = invoke({"verify-replay", "--state", (dir / "after" / "state.bin").string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("replay matches") != std::string::npos);

  REQUIRE(invoke({"export", "--state", (dir / "after" / "state.bin").string(), "--out",
               (dir / "reexport").string()})
              .code == cli::kExitOk);
  CHECK(tree(dir / "reexport") == tree(dir / "after" / "exports"));

  std::string bytes = testing::slurp(dir / "after" / "state.bin");
  bytes[bytes.size() / 2] ^= 0x5a;
  testing::spit(dir / "broken.bin", bytes);
  CHECK(invoke({"verify-replay", "--state", (dir / "broken.bin").string()}).code == cli::kExitRuntime);
  CHECK(invoke({"export", "--state", (dir / "absent.bin").string(), "--out", dir.string()}).code ==
        cli::kExitRuntime);
  CHECK(invoke({"attack-exec", "--state", (dir / "base" / "state.bin").string(), "--schedule",
             (dir / "sweep.jsonl").string(), "--out", (dir / "x").string()})
            .code == cli::kExitUsage);
}
