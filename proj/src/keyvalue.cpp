#include "boolperc/keyvalue.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace boolperc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(trim(part));
  return parts;
}

double parse_double(const std::string& text, std::size_t line, const std::string& key) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError(line, key, "expected a number, got an empty value");
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) throw ParseError(line, key, "expected a number, got '" + t + "'");
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

ParseError::ParseError(std::size_t line, const std::string& key, const std::string& message)
    : InvalidArgument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                      (key.empty() ? std::string() : "field '" + key + "': ") + message),
      line_(line),
      key_(key) {}

KeyValues KeyValues::parse(std::istream& in) {
  KeyValues kv;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "", "expected 'key = value', got '" + text + "'");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ParseError(line, "", "empty key");
    if (kv.entries_.count(key)) throw ParseError(line, key, "duplicate key");
    kv.entries_[key] = trim(text.substr(eq + 1));
    kv.lines_[key] = line;
  }
  return kv;
}

KeyValues KeyValues::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return parse(in);
}

void KeyValues::set(const std::string& key, const std::string& value) { entries_[key] = value; }

std::size_t KeyValues::line_of(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValues::require(const std::string& key) const {
  auto value = get(key);
  if (!value) throw ParseError(0, key, "missing required field");
  return *value;
}

double KeyValues::get_double(const std::string& key) const { return parse_double(require(key), line_of(key), key); }

double KeyValues::get_double(const std::string& key, double fallback) const {
  return contains(key) ? get_double(key) : fallback;
}

long long KeyValues::get_int(const std::string& key) const {
  const std::string t = require(key);
  char* end = nullptr;
  errno = 0;
  const long long value = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw ParseError(line_of(key), key, "expected an integer, got '" + t + "'");
  return value;
}

long long KeyValues::get_int(const std::string& key, long long fallback) const {
  return contains(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValues::get_u64(const std::string& key) const {
  const std::string t = require(key);
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t.front() == '-' || end != t.c_str() + t.size() || errno == ERANGE)
    throw ParseError(line_of(key), key, "expected an unsigned 64-bit integer, got '" + t + "'");
  return value;
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  const auto value = get(key);
  if (!value) return fallback;
  if (*value == "true" || *value == "1" || *value == "yes") return true;
  if (*value == "false" || *value == "0" || *value == "no") return false;
  throw ParseError(line_of(key), key, "expected true/false, got '" + *value + "'");
}

std::vector<double> KeyValues::get_double_list(const std::string& key) const {
  std::vector<double> values;
  for (const auto& part : split(require(key), ',')) values.push_back(parse_double(part, line_of(key), key));
  return values;
}

void KeyValues::write(std::ostream& out) const {
  for (const auto& [key, value] : entries_) out << key << '=' << value << '\n';
}

void write_space(KeyValues& kv, const Space& space) {
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      kv.set("space.kind", "euclidean");
      kv.set("space.dim", std::to_string(space.dim()));
      break;
    case SpaceKind::Hyperbolic2:
      kv.set("space.kind", "hyperbolic2");
      break;
    case SpaceKind::H2xR:
      kv.set("space.kind", "h2xr");
      break;
  }
  kv.set("space.ball_radius", format_double(space.ball_radius()));
}

Space read_space(const KeyValues& kv) {
  const std::string kind = kv.require("space.kind");
  const double radius = kv.get_double("space.ball_radius", 1.0);
  try {
    if (kind == "euclidean") return Space::euclidean(static_cast<int>(kv.get_int("space.dim", 2)), radius);
    if (kind == "hyperbolic2") return Space::hyperbolic_plane(radius);
    if (kind == "h2xr") return Space::hyperbolic_plane_times_line(radius);
  } catch (const ParseError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ParseError(kv.line_of("space.kind"), "space", e.what());
  }
  throw ParseError(kv.line_of("space.kind"), "space.kind",
                   "unknown space '" + kind + "' (expected euclidean, hyperbolic2 or h2xr)");
}

void write_window(KeyValues& kv, const Window& window) {
  if (const auto* ball = std::get_if<BallWindow>(&window)) {
    kv.set("window.kind", "ball");
    std::string center;
    for (Eigen::Index i = 0; i < ball->center.size(); ++i) {
      if (i) center += ',';
      center += format_double(ball->center(i));
    }
    kv.set("window.center", center);
    kv.set("window.radius", format_double(ball->radius));
  } else {
    const auto& cylinder = std::get<CylinderWindow>(window);
    kv.set("window.kind", "cylinder");
    kv.set("window.h2_radius", format_double(cylinder.h2_radius));
    kv.set("window.height_half", format_double(cylinder.height_half));
  }
}

Window read_window(const KeyValues& kv, const Space& space) {
  const std::string kind = kv.require("window.kind");
  Window window;
  if (kind == "ball") {
    Point center = space.origin();
    if (kv.contains("window.center")) {
      const auto coords = kv.get_double_list("window.center");
      if (static_cast<int>(coords.size()) != space.coordinate_count())
        throw ParseError(kv.line_of("window.center"), "window.center",
                         "expected " + std::to_string(space.coordinate_count()) + " coordinates");
      for (std::size_t i = 0; i < coords.size(); ++i) center(static_cast<Eigen::Index>(i)) = coords[i];
    }
    window = BallWindow{center, kv.get_double("window.radius")};
  } else if (kind == "cylinder") {
    window = CylinderWindow{kv.get_double("window.h2_radius"), kv.get_double("window.height_half")};
  } else {
    throw ParseError(kv.line_of("window.kind"), "window.kind", "unknown window '" + kind + "' (expected ball or cylinder)");
  }
  try {
    validate_window(space, window);
  } catch (const UnsupportedOperation& e) {
    throw ParseError(kv.line_of("window.kind"), "window.kind", e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ParseError(kv.line_of("window.kind"), "window", e.what());
  }
  return window;
}

}  // namespace boolperc
