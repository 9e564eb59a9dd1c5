#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boolperc/geometry.hpp"

namespace boolperc {

/// Shortest decimal text that reads back to the same double ("%.17g").
std::string format_double(double value);

/// Error while reading a key=value file; carries the 1-based line (0 when the
/// problem is a missing key).
class ParseError : public InvalidArgument {
 public:
  ParseError(std::size_t line, const std::string& key, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

/// Flat `key = value` document. Blank lines and lines starting with '#' are
/// ignored; keys are unique.
class KeyValues {
 public:
  static KeyValues parse(std::istream& in);
  static KeyValues parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool contains(const std::string& key) const { return entries_.count(key) > 0; }
  std::size_t line_of(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// Lines of the form "key=value" in key order.
  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, std::size_t> lines_;
};

/// space.kind / space.dim / space.ball_radius.
void write_space(KeyValues& kv, const Space& space);
Space read_space(const KeyValues& kv);
/// window.kind / window.center / window.radius / window.h2_radius / window.height_half.
void write_window(KeyValues& kv, const Window& window);
Window read_window(const KeyValues& kv, const Space& space);

}  // namespace boolperc
