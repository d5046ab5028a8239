#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace linmix::cli {

/** A manifest problem, located by line (0 when it came from a flag) and field. */
class ManifestError : public std::invalid_argument {
 public:
  ManifestError(const std::string& msg, int line, std::string field)
      : std::invalid_argument(msg), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/**
 * Flat key = value settings. Comments start with '#'. Every key that influences results is part
 * of the canonical text and therefore of the hash; the output directory and worker count are not.
 */
class Manifest {
 public:
  static Manifest parse(std::istream& in);
  static Manifest parse_text(const std::string& text);

  void set(const std::string& key, const std::string& value, int line = 0);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string str(const std::string& key) const { return raw(key); }
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  /** "a:b" dyadic range or comma list. */
  std::vector<std::int64_t> int_list(const std::string& key) const;

  /** Fills defaults for the command and rejects unknown keys or malformed values. */
  void validate();

  std::string canonical() const;
  /** FNV-1a 64 of canonical(), hex. */
  std::string hash() const;

 private:
  int line_of(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

/** Commands and their keys with defaults. */
const std::map<std::string, std::map<std::string, std::string>>& command_schema();

std::uint64_t fnv1a(const std::string& s);

}  // namespace linmix::cli
