#include "linmix/cli/manifest.hpp"

#include <cstdio>
#include <istream>
#include <sstream>

#include "linmix/numerics.hpp"

namespace linmix::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

using Schema = std::map<std::string, std::string>;

Schema with_model(Schema extra, const std::string& alpha = "2") {
  Schema s = {{"seed", "1"}, {"streams", "16"}, {"alpha", alpha}, {"p_exp", "2"}, {"depth", "256"},
              {"L", "40"},   {"d_max", "3"},    {"K_max", "64"},  {"omega", "log"}};
  for (auto& [k, v] : extra) s[k] = v;
  return s;
}

}  // namespace

const std::map<std::string, Schema>& command_schema() {
  static const std::map<std::string, Schema> schema = {
      {"weights-check", with_model({{"k_max", "20"}, {"levels", ""}, {"tolerance", "4"}})},
      {"basis-check", with_model({{"tolerance", "1e-10"}})},
      {"cov-decay", with_model({{"mode", "exact"}, {"obs", ""}, {"lags", ""}, {"R", "100000"}, {"tolerance", ""}, {"depth", ""}})},
      {"clt", with_model({{"N", "4096"}, {"R", "2000"}, {"obs", "c:linones:256"}, {"tolerance", "0.1"}, {"exploratory", "0"}})},
      {"mw", with_model({{"depth", "16384"}, {"n_max", "4096"}, {"obs", ""}, {"tolerance", "1.5"}})},
      {"facts", {{"alpha", "2"}, {"lags", "4:4096"}, {"fact2_n", "8"}, {"tolerance", "2"}}},
      {"halfplane-decay", {{"power", "4"}, {"lags", "8:512"}, {"tolerance", "1e-12"}}},
      {"envelope-check", {{"power", "4"}, {"lags", "16,32,64"}, {"theta", "1"}, {"tolerance", "1.5"}, {"count_k", "64"}}},
      {"support-probe", with_model({{"delta", "0.25"}, {"R", "20000"}, {"target", "0:1"}, {"levels", "24"}})},
  };
  return schema;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Manifest Manifest::parse(std::istream& in) {
  Manifest m;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ManifestError("line " + std::to_string(no) + ": expected key = value", no, "");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ManifestError("line " + std::to_string(no) + ": empty key", no, "");
    if (m.has(key)) throw ManifestError("line " + std::to_string(no) + ": duplicate key '" + key + "'", no, key);
    m.set(key, trim(line.substr(eq + 1)), no);
  }
  return m;
}

Manifest Manifest::parse_text(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

void Manifest::set(const std::string& key, const std::string& value, int line) {
  values_[key] = value;
  lines_[key] = line;
}

int Manifest::line_of(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

const std::string& Manifest::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ManifestError("missing field '" + key + "'", 0, key);
  return it->second;
}

namespace {
[[noreturn]] void bad(const Manifest& m, const std::string& key, const std::string& what, int line) {
  std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
  throw ManifestError(where + "field '" + key + "': " + what + " (got '" + m.raw(key) + "')", line, key);
}
}  // namespace

double Manifest::real(const std::string& key) const {
  const std::string& s = raw(key);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    bad(*this, key, "expected a real number", line_of(key));
  }
  if (pos != s.size()) bad(*this, key, "expected a real number", line_of(key));
  return v;
}

std::int64_t Manifest::integer(const std::string& key) const {
  const std::string& s = raw(key);
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    bad(*this, key, "expected an integer", line_of(key));
  }
  if (pos != s.size()) bad(*this, key, "expected an integer", line_of(key));
  return v;
}

std::uint64_t Manifest::u64(const std::string& key) const {
  const std::string& s = raw(key);
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(s, &pos, 0);
  } catch (const std::exception&) {
    bad(*this, key, "expected an unsigned 64-bit integer", line_of(key));
  }
  if (pos != s.size()) bad(*this, key, "expected an unsigned 64-bit integer", line_of(key));
  return v;
}

std::vector<std::int64_t> Manifest::int_list(const std::string& key) const {
  const std::string& s = raw(key);
  std::vector<std::int64_t> out;
  try {
    const auto colon = s.find(':');
    if (colon != std::string::npos) {
      out = dyadic_grid(std::stoll(s.substr(0, colon)), std::stoll(s.substr(colon + 1)));
    } else {
      std::istringstream is(s);
      std::string item;
      while (std::getline(is, item, ',')) {
        std::size_t pos = 0;
        const std::string t = trim(item);
        out.push_back(std::stoll(t, &pos));
        if (pos != t.size()) throw std::invalid_argument("trailing text");
      }
    }
  } catch (const std::exception&) {
    bad(*this, key, "expected 'lo:hi' or a comma list of integers", line_of(key));
  }
  if (out.empty()) bad(*this, key, "empty list", line_of(key));
  return out;
}

void Manifest::validate() {
  if (!has("command")) throw ManifestError("missing field 'command'", 0, "command");
  const auto& schema = command_schema();
  const auto it = schema.find(raw("command"));
  if (it == schema.end()) {
    std::string names;
    for (const auto& [k, v] : schema) names += (names.empty() ? "" : ", ") + k;
    throw ManifestError("line " + std::to_string(line_of("command")) + ": field 'command': unknown command '" +
                            raw("command") + "' (expected one of " + names + ")",
                        line_of("command"), "command");
  }
  const Schema& keys = it->second;
  for (const auto& [k, v] : values_) {
    if (k == "command") continue;
    if (!keys.count(k)) {
      const int line = line_of(k);
      throw ManifestError((line ? "line " + std::to_string(line) + ": " : std::string()) + "field '" + k +
                              "' is not used by command '" + raw("command") + "'",
                          line, k);
    }
  }
  const std::string cmd = raw("command");
  // Defaults that depend on other fields.
  if (cmd == "cov-decay") {
    if (!has("mode")) set("mode", "exact");
    const std::string mode = raw("mode");
    if (mode != "exact" && mode != "mc") bad(*this, "mode", "expected 'exact' or 'mc'", line_of("mode"));
    const bool exact = mode == "exact";
    if (!has("depth") || raw("depth").empty()) set("depth", exact ? "1048576" : "512");
    if (!has("lags") || raw("lags").empty()) set("lags", exact ? "16:4096" : "1:256");
    if (!has("obs") || raw("obs").empty()) set("obs", exact ? "linones:" + raw("depth") : std::string("linones:256"));
    if (!has("tolerance") || raw("tolerance").empty()) set("tolerance", exact ? "0.1" : "3");
  }
  if (cmd == "weights-check" && (!has("levels") || raw("levels").empty())) {
    if (!has("L")) set("L", keys.at("L"));
    set("levels", std::to_string(integer("L") + 1));
  }
  if (cmd == "mw" && (!has("obs") || raw("obs").empty())) {
    if (!has("depth")) set("depth", keys.at("depth"));
    set("obs", "linones:" + raw("depth"));
  }
  for (const auto& [k, v] : keys)
    if (!has(k)) set(k, v);

  // Type checks.
  for (const char* k : {"seed"})
    if (has(k)) (void)u64(k);
  for (const char* k : {"streams", "depth", "L", "d_max", "K_max", "k_max", "levels", "N", "R", "n_max", "fact2_n",
                        "power", "count_k", "exploratory"})
    if (has(k)) (void)integer(k);
  for (const char* k : {"alpha", "p_exp", "tolerance", "delta", "theta"})
    if (has(k)) (void)real(k);
  if (has("lags")) (void)int_list("lags");
  if (has("streams") && integer("streams") < 1) bad(*this, "streams", "must be positive", line_of("streams"));
  if (has("omega") && raw("omega") != "log" && raw("omega").rfind("affine:", 0) != 0)
    bad(*this, "omega", "expected 'log' or 'affine:a,b'", line_of("omega"));
}

std::string Manifest::canonical() const {
  std::string out = "command=" + (has("command") ? raw("command") : std::string()) + "\n";
  for (const auto& [k, v] : values_)
    if (k != "command") out += k + "=" + v + "\n";
  return out;
}

std::string Manifest::hash() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
  return buf;
}

}  // namespace linmix::cli
