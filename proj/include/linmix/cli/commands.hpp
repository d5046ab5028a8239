#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "linmix/cli/manifest.hpp"

namespace linmix::cli {

enum ExitCode : int { kPass = 0, kToleranceFailed = 1, kInvalidManifest = 2, kModuleError = 3 };

struct RunOptions {
  std::filesystem::path out = "linmix-out";
  unsigned workers = 0;
};

/**
 * Validates the manifest, runs its command and writes report.json, data.csv and manifest.replay
 * into the output directory. One line per check goes to `log`.
 */
int run(Manifest manifest, const RunOptions& opt, std::ostream& log);

}  // namespace linmix::cli
