#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "linmix/cli/commands.hpp"
#include "linmix/cli/manifest.hpp"

using namespace linmix::cli;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("linmix-test-" + name);
  fs::remove_all(p);
  return p;
}
}  // namespace

TEST_CASE("manifest parsing reports line and field") {
  const Manifest m = Manifest::parse_text("# comment\ncommand = clt\n\nalpha = 2.5  # trailing\n");
  CHECK(m.str("command") == "clt");
  CHECK(m.real("alpha") == 2.5);
  try {
    Manifest::parse_text("command = clt\nnot a pair\n");
    FAIL("expected an error");
  } catch (const ManifestError& e) {
    CHECK(e.line() == 2);
  }
  Manifest bad = Manifest::parse_text("command = clt\nalpha = two\n");
  try {
    bad.validate();
    FAIL("expected an error");
  } catch (const ManifestError& e) {
    CHECK(e.line() == 2);
    CHECK(e.field() == "alpha");
  }
  Manifest unknown = Manifest::parse_text("command = facts\ndepth = 3\n");
  CHECK_THROWS_AS(unknown.validate(), ManifestError);
  CHECK_THROWS_AS(Manifest::parse_text("command = clt\ncommand = mw\n"), ManifestError);
}

TEST_CASE("hash covers every result-relevant field") {
  Manifest a = Manifest::parse_text("command = facts\n");
  Manifest b = Manifest::parse_text("command = facts\nalpha = 2\nlags = 4:4096\n");
  a.validate();
  b.validate();
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());
  Manifest c = Manifest::parse_text("command = facts\nalpha = 1.5\n");
  c.validate();
  CHECK(c.hash() != a.hash());
  CHECK(a.hash().size() == 16);
  CHECK(fnv1a("") == 14695981039346656037ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("lists") {
  const Manifest m = Manifest::parse_text("lags = 4:32\nother = 1, 3,5\n");
  CHECK(m.int_list("lags") == std::vector<std::int64_t>{4, 8, 16, 32});
  CHECK(m.int_list("other") == std::vector<std::int64_t>{1, 3, 5});
}

TEST_CASE("basis-check writes hashed artifacts and exits 0") {
  const fs::path out = scratch("basis");
  Manifest m = Manifest::parse_text("command = basis-check\nL = 40\n");
  std::ostringstream log;
  CHECK(run(m, {out, 1}, log) == kPass);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(report["pass"] == true);
  CHECK(report["result"]["gram_error"].get<double>() < 1e-10);
  const std::string hash = report["manifest_hash"];
  CHECK(slurp(out / "data.csv").rfind("# manifest_hash=" + hash + "\n", 0) == 0);
  CHECK(slurp(out / "manifest.replay").rfind("# manifest_hash=" + hash + "\n", 0) == 0);
  CHECK(log.str().find("PASS gram_error") != std::string::npos);
}

TEST_CASE("invalid manifests exit 2, module errors exit 3, failed tolerances exit 1") {
  std::ostringstream log;
  CHECK(run(Manifest::parse_text("command = nope\n"), {scratch("bad"), 1}, log) == kInvalidManifest);
  CHECK(run(Manifest::parse_text("command = clt\nbogus = 1\n"), {scratch("bad"), 1}, log) == kInvalidManifest);
  CHECK(run(Manifest::parse_text("command = clt\nobs = what\n"), {scratch("bad"), 1}, log) == kInvalidManifest);
  CHECK(run(Manifest::parse_text("command = clt\nalpha = 0.9\n"), {scratch("bad"), 1}, log) == kModuleError);
  CHECK(log.str().find("no normal limit guarantee") != std::string::npos);
  CHECK(run(Manifest::parse_text("command = facts\nalpha = 2\ntolerance = 1.01\n"), {scratch("tol"), 1}, log) ==
        kToleranceFailed);
}

TEST_CASE("replay reproduces artifacts byte for byte under any worker count") {
  const fs::path a = scratch("clt-a"), b = scratch("clt-b");
  std::ostringstream log;
  Manifest m = Manifest::parse_text("command = clt\nalpha = 2\nN = 4096\nR = 2000\nseed = 7\n");
  REQUIRE(run(m, {a, 1}, log) == kPass);
  std::ifstream replay(a / "manifest.replay");
  REQUIRE(run(Manifest::parse(replay), {b, 3}, log) == kPass);
  for (const char* f : {"report.json", "data.csv", "manifest.replay"}) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("cov-decay exact for alpha = 0.75 reports the slow slope") {
  const fs::path out = scratch("cov");
  std::ostringstream log;
  REQUIRE(run(Manifest::parse_text("command = cov-decay\nalpha = 0.75\nmode = exact\n"), {out, 1}, log) == kPass);
  std::istringstream csv(slurp(out / "data.csv"));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  CHECK(line == "lag,cov,remainder,band,fitted_slope,theory_slope");
  std::getline(csv, line);
  std::vector<std::string> cols;
  std::istringstream row(line);
  for (std::string c; std::getline(row, c, ',');) cols.push_back(c);
  REQUIRE(cols.size() == 6);
  CHECK(std::abs(std::stod(cols[4]) + 0.5) <= 0.1);
}
