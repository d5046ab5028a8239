#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linmix/cli/commands.hpp"
#include "linmix/cli/manifest.hpp"

using linmix::cli::Manifest;
using linmix::cli::ManifestError;

int main(int argc, char** argv) {
  CLI::App app{"Experiments for invariant measures of weighted backward shifts"};
  std::string command;
  std::string manifest_path;
  std::string out_dir = "linmix-out";
  unsigned workers = 0;
  bool exact = false, mc = false;
  std::vector<std::string> sets;

  // Flag name -> manifest key.
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"--seed", "seed"},     {"--streams", "streams"}, {"--alpha", "alpha"},       {"--p-exp", "p_exp"},
      {"--depth", "depth"},   {"--L", "L"},             {"--N", "N"},               {"--R", "R"},
      {"--lags", "lags"},     {"--tolerance", "tolerance"}, {"--obs", "obs"},       {"--power", "power"},
      {"--delta", "delta"},   {"--target", "target"},   {"--d-max", "d_max"},       {"--k-max", "k_max"},
      {"--K-max", "K_max"},   {"--n-max", "n_max"},     {"--levels", "levels"},     {"--theta", "theta"},
      {"--omega", "omega"},   {"--fact2-n", "fact2_n"}, {"--count-k", "count_k"},   {"--exploratory", "exploratory"}};
  std::vector<std::optional<std::string>> values(flags.size());

  app.add_option("command", command, "weights-check, basis-check, cov-decay, clt, mw, facts, halfplane-decay, "
                                     "envelope-check or support-probe");
  app.add_option("--manifest", manifest_path, "key = value manifest; flags override its entries");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads (0: all cores); never changes results");
  app.add_flag("--exact", exact, "cov-decay from the closed-form coefficients");
  app.add_flag("--mc", mc, "cov-decay by Monte Carlo against the closed form");
  app.add_option("--set", sets, "extra key=value entries");
  for (std::size_t i = 0; i < flags.size(); ++i) app.add_option(flags[i].first, values[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : linmix::cli::kInvalidManifest;
  }

  Manifest m;
  try {
    if (!manifest_path.empty()) {
      std::ifstream in(manifest_path);
      if (!in) {
        std::cerr << "cannot read manifest " << manifest_path << '\n';
        return linmix::cli::kInvalidManifest;
      }
      m = Manifest::parse(in);
    }
    if (!command.empty()) m.set("command", command);
    for (std::size_t i = 0; i < flags.size(); ++i)
      if (values[i]) m.set(flags[i].second, *values[i]);
    if (exact && mc) throw ManifestError("--exact and --mc are exclusive", 0, "mode");
    if (exact) m.set("mode", "exact");
    if (mc) m.set("mode", "mc");
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ManifestError("--set expects key=value, got '" + kv + "'", 0, kv);
      m.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const ManifestError& e) {
    std::cerr << "invalid manifest: " << e.what() << '\n';
    return linmix::cli::kInvalidManifest;
  }
  return linmix::cli::run(std::move(m), {out_dir, workers}, std::cout);
}
