#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <sys/wait.h>

#include "risbeam/config.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::path(RISBEAM_TEST_SCRATCH) / "cli";

int run(const std::string& args) {
  const std::string cmd =
      "\"" RISBEAM_CLI_PATH "\" " + args + " > \"" + (kScratch / "stdout.txt").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Scratch {
  Scratch() {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Scratch, "default-config writes a loadable default") {
  const fs::path cfg = kScratch / "default.json";
  REQUIRE(run("default-config --out \"" + cfg.string() + "\"") == 0);
  CHECK(risbeam::load_config(cfg.string()) == risbeam::SystemConfig{});
}

TEST_CASE_FIXTURE(Scratch, "configuration errors exit with status 1") {
  risbeam::SystemConfig bad;
  bad.users = 4;
  const fs::path cfg = kScratch / "bad.json";
  std::string text = risbeam::dump_config(bad);
  text.replace(text.find("\"users\": 4"), 10, "\"users\": 3");
  std::ofstream(cfg) << text;
  CHECK(run("sweep --config \"" + cfg.string() + "\" --out \"" + (kScratch / "o").string() + "\"") == 1);
  CHECK(slurp(kScratch / "stdout.txt").find("users") != std::string::npos);
  CHECK(!fs::exists(kScratch / "o"));
  CHECK(run("sweep --sweep n_elements --values 30 --trials 1 --out \"" +
            (kScratch / "o").string() + "\"") == 1);
  CHECK(run("sweep --no-such-flag") != 0);
}

TEST_CASE_FIXTURE(Scratch, "sweep output is reproducible and complete") {
  const std::string common = "sweep --trials 2 --sweep snr --values 0,10 --seed-base 5 --out ";
  REQUIRE(run(common + "\"" + (kScratch / "a").string() + "\"") == 0);
  REQUIRE(run(common + "\"" + (kScratch / "b").string() + "\" --threads 2") == 0);
  for (const char* f : {"results.csv", "summary.csv", "manifest.txt", "config.json"}) {
    CHECK(fs::exists(kScratch / "a" / f));
    CHECK(slurp(kScratch / "a" / f) == slurp(kScratch / "b" / f));
  }
  const std::string results = slurp(kScratch / "a" / "results.csv");
  CHECK(results.rfind("sweep_value,trial,seed,wsr,rate_user_1", 0) == 0);
  CHECK(results.find("\n0,0,5,") != std::string::npos);
  CHECK(results.find("\n10,1,6,") != std::string::npos);
}

TEST_CASE_FIXTURE(Scratch, "compare writes every arm and the paired differences") {
  REQUIRE(run("compare --trials 1 --values 5 --out \"" + (kScratch / "c").string() + "\"") == 0);
  const std::string diffs = slurp(kScratch / "c" / "differences.csv");
  CHECK(diffs.find("bcd-wmmse_ls@subarray") != std::string::npos);
  CHECK(diffs.find("subarray-whole@bcd") != std::string::npos);
  int results = 0;
  for (const auto& e : fs::directory_iterator(kScratch / "c"))
    results += e.path().filename().string().find("results.csv") != std::string::npos;
  CHECK(results == 4);
}
