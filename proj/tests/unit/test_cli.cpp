#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(QPAT_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage and configuration errors exit with 2") {
    const fs::path dir = qpat::test::scratch_dir("cli_config");
    CHECK(run("") == 2);
    CHECK(run("forward") == 2);
    CHECK(run("forward --config " + (dir / "missing.json").string()) == 2);
    const fs::path empty = write_config(dir, "empty.json", R"({"grid": {"sizes": []}})");
    CHECK(run("forward --config " + empty.string()) == 2);
    const fs::path two = write_config(dir, "two.json", R"({"grid": {"sizes": [33, 65]}, "study": "refinement"})");
    CHECK(run("study --config " + two.string()) == 2);
    const fs::path ok = write_config(dir, "ok.json", R"({"grid": {"sizes": [33]}})");
    CHECK(run("forward --config " + ok.string() + " --mode loose") == 2);
    CHECK(run("reconstruct --config " + ok.string()) == 2);
  }

  TEST_CASE("missing dataset exits with 7") {
    const fs::path dir = qpat::test::scratch_dir("cli_io");
    const fs::path cfg = write_config(dir, "c.json", R"({"grid": {"sizes": [33]}, "data": "nowhere"})");
    CHECK(run("reconstruct --config " + cfg.string()) == 7);
  }

  TEST_CASE("forward then reconstruct") {
    const fs::path dir = qpat::test::scratch_dir("cli_run");
    const fs::path fwd = write_config(dir, "f.json", R"({"grid": {"sizes": [65]}, "noise": {"levels": [0.001]}})");
    REQUIRE(run("forward --config " + fwd.string() + " --out " + (dir / "data").string() + " --seed 9") == 0);
    CHECK(fs::exists(dir / "data" / "manifest.json"));
    CHECK(fs::exists(dir / "data" / "s0_d0.qpf"));

    const fs::path rec = write_config(dir, "r.json", R"({"data": "data"})");
    REQUIRE(run("reconstruct --config " + rec.string() + " --out " + (dir / "rec").string()) == 0);
    std::ifstream in(dir / "rec" / "metrics.json");
    const nlohmann::json m = nlohmann::json::parse(in);
    CHECK(m["errors"]["mu"]["sup"].get<double>() < 0.05);

    // Without the interior cut strict mode cannot close the sqrt(D) solve.
    fs::remove(dir / "data" / "sqrtD_cut.qpf");
    auto manifest = nlohmann::json::parse(std::ifstream(dir / "data" / "manifest.json"));
    manifest.erase("sqrtD_cut");
    std::ofstream(dir / "data" / "manifest.json") << manifest.dump(1);
    CHECK(run("reconstruct --config " + rec.string() + " --out " + (dir / "rec2").string()) == 2);
    CHECK(run("reconstruct --config " + rec.string() + " --out " + (dir / "rec3").string() + " --mode exact") == 0);
  }

  TEST_CASE("study writes csv and summary") {
    const fs::path dir = qpat::test::scratch_dir("cli_study");
    const fs::path cfg = write_config(
        dir, "s.json", R"({"grid": {"sizes": [65]}, "noise": {"levels": [0.001, 0.003, 0.01]}, "study": "exit_stability"})");
    REQUIRE(run("study --config " + cfg.string() + " --out " + (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "exit_stability.csv"));
    const auto s = nlohmann::json::parse(std::ifstream(dir / "out" / "exit_stability_summary.json"));
    CHECK(s["fits"].is_object());
  }
}
