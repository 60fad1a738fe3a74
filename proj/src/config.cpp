#include "sparse_rhc/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sparse_rhc/errors.hpp"

namespace srhc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_plain_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("cannot parse '" + std::string(s) + "' as a number");
  }
  return v;
}

double parse_double(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_plain_double(s);
  const double den = parse_plain_double(s.substr(slash + 1));
  if (den == 0.0) throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
  return parse_plain_double(s.substr(0, slash)) / den;
}

long parse_long(std::string_view s) {
  s = trim(s);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("cannot parse '" + std::string(s) + "' as an integer");
  }
  return v;
}

int parse_int(std::string_view s) {
  const long v = parse_long(s);
  if (v < -2147483647L || v > 2147483647L) throw std::invalid_argument("integer out of range");
  return static_cast<int>(v);
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected true or false, got '" + std::string(s) + "'");
}

template <class E>
E parse_enum(std::string_view s, std::initializer_list<E> values) {
  s = trim(s);
  std::string allowed;
  for (E e : values) {
    if (s == to_string(e)) return e;
    allowed += (allowed.empty() ? "" : "|") + std::string(to_string(e));
  }
  throw std::invalid_argument("expected " + allowed + ", got '" + std::string(s) + "'");
}

// Shortest %g form that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string fmt(bool v) { return v ? "true" : "false"; }

Rect parse_rect(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::string a, b, c, d, extra;
  if (!(in >> a >> b >> c >> d) || (in >> extra)) {
    throw std::invalid_argument("expected four numbers x0 y0 x1 y1");
  }
  return {parse_double(a), parse_double(b), parse_double(c), parse_double(d)};
}

struct Entry {
  ConfigKey key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SRHC_DOUBLE(sec, name, field, doc)                                          \
  Entry {                                                                           \
    {sec, name, doc}, [](RunConfig& c, std::string_view v) { field = parse_double(v); }, \
        [](const RunConfig& c) { return fmt(field); }                               \
  }
#define SRHC_INT(sec, name, field, doc)                                          \
  Entry {                                                                        \
    {sec, name, doc}, [](RunConfig& c, std::string_view v) { field = parse_int(v); }, \
        [](const RunConfig& c) { return std::to_string(field); }                 \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      SRHC_INT("mesh", "n_side", c.rhc.n_side, "cells per side of the uniform triangulation"),
      Entry{{"rhc", "mode", "fom | pod | uncontrolled"},
            [](RunConfig& c, std::string_view v) {
              c.rhc.mode = parse_enum(v, {RhcMode::fom, RhcMode::pod, RhcMode::uncontrolled});
            },
            [](const RunConfig& c) { return std::string(to_string(c.rhc.mode)); }},
      SRHC_DOUBLE("rhc", "T", c.rhc.T, "prediction horizon"),
      SRHC_DOUBLE("rhc", "delta", c.rhc.delta, "sampling time, a multiple of dt"),
      SRHC_DOUBLE("rhc", "T_inf", c.rhc.T_inf, "final time of the closed loop, a multiple of delta"),
      SRHC_DOUBLE("rhc", "dt", c.rhc.dt, "time step; fractions like 1/80 are accepted"),
      SRHC_DOUBLE("rhc", "beta", c.rhc.beta, "weight of the squared l1 control cost"),
      SRHC_DOUBLE("rhc", "nu", c.rhc.nu, "diffusion coefficient"),
      Entry{{"rhc", "norm", "mass | euclidean, norm of the state_norms.csv output"},
            [](RunConfig& c, std::string_view v) { c.rhc.norm = parse_enum(v, {NormKind::mass, NormKind::euclidean}); },
            [](const RunConfig& c) { return std::string(to_string(c.rhc.norm)); }},
      SRHC_DOUBLE("prox", "rel_tol", c.rhc.fbs.rel_tol, "FBS stops when the fixed-point residual is below this"),
      SRHC_INT("prox", "max_iter", c.rhc.fbs.max_iter, "FBS iteration cap per window"),
      SRHC_INT("prox", "ls_window", c.rhc.fbs.ls_window, "nonmonotone line search memory"),
      SRHC_DOUBLE("prox", "ls_shrink", c.rhc.fbs.ls_shrink, "step reduction factor of the line search"),
      SRHC_DOUBLE("prox", "ls_c", c.rhc.fbs.ls_c, "sufficient decrease constant"),
      SRHC_DOUBLE("prox", "step_init", c.rhc.fbs.step_init, "first trial step"),
      SRHC_DOUBLE("prox", "step_min", c.rhc.fbs.step_min, "lower clamp of the BB step"),
      SRHC_DOUBLE("prox", "step_max", c.rhc.fbs.step_max, "upper clamp of the BB step"),
      SRHC_DOUBLE("prox", "bisect_tol", c.rhc.fbs.bisect_tol, "relative tolerance of the prox root find"),
      SRHC_INT("prox", "max_bisect", c.rhc.fbs.max_bisect, "bisection cap of the prox root find"),
      SRHC_DOUBLE("pod", "tol", c.rhc.pod.tol, "keep singular values above this"),
      SRHC_DOUBLE("pod", "T_train", c.rhc.pod.T_train, "horizon of the full-order training window"),
      Entry{{"pod", "weight", "mass | stiffness, inner product of the basis"},
            [](RunConfig& c, std::string_view v) {
              c.rhc.pod.weight = parse_enum(v, {PodWeight::mass, PodWeight::stiffness});
            },
            [](const RunConfig& c) { return std::string(to_string(c.rhc.pod.weight)); }},
      Entry{{"pod", "adjoint", "projected (adjoint basis) | consistent (state basis)"},
            [](RunConfig& c, std::string_view v) {
              c.rhc.pod.adjoint = parse_enum(v, {PodAdjoint::projected, PodAdjoint::consistent});
            },
            [](const RunConfig& c) { return std::string(to_string(c.rhc.pod.adjoint)); }},
      Entry{{"pod", "refresh", "retrain the bases every T_train"},
            [](RunConfig& c, std::string_view v) { c.rhc.pod.refresh = parse_bool(v); },
            [](const RunConfig& c) { return fmt(c.rhc.pod.refresh); }},
      Entry{{"actuators", "rect", "x0 y0 x1 y1, one line per actuator; replaces the default 13 squares"},
            [](RunConfig& c, std::string_view v) { c.rhc.layout.rectangles.push_back(parse_rect(v)); },
            [](const RunConfig&) { return std::string("default layout"); }},
      Entry{{"output", "dir", "output directory"},
            [](RunConfig& c, std::string_view v) { c.out_dir = std::string(trim(v)); },
            [](const RunConfig& c) { return c.out_dir; }},
      Entry{{"output", "verbose", "per-window progress on stderr"},
            [](RunConfig& c, std::string_view v) { c.verbose = parse_bool(v); },
            [](const RunConfig& c) { return fmt(c.verbose); }},
      Entry{{"output", "seed", "seed of the test utilities"},
            [](RunConfig& c, std::string_view v) {
              const long s = parse_long(v);
              if (s < 0 || s > 4294967295L) throw std::invalid_argument("seed out of range");
              c.seed = static_cast<unsigned>(s);
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
  };
  return table;
}

#undef SRHC_DOUBLE
#undef SRHC_INT

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string> sections;
  for (const auto& e : entries()) sections.insert(e.key.section);

  std::string section;
  std::set<std::string> seen;
  bool layout_replaced = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.count(section)) throw ConfigError(where + "unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + "key '" + key + "' outside a section", line_no);

    const Entry* entry = nullptr;
    for (const auto& e : entries()) {
      if (e.key.section == section && e.key.name == key) entry = &e;
    }
    const std::string full = section + "." + key;
    if (!entry) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]", line_no);
    const bool repeatable = full == "actuators.rect";
    if (!repeatable && !seen.insert(full).second) throw ConfigError(where + "duplicate key " + full, line_no);
    if (repeatable && !layout_replaced) {
      config.rhc.layout.rectangles.clear();
      layout_replaced = true;
    }
    try {
      entry->set(config, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + full + ": " + e.what(), line_no);
    }
  }
  config.rhc.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.line());
  }
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& e : entries()) {
    if (e.key.section != section) {
      section = e.key.section;
      out << (out.tellp() > 0 ? "\n" : "") << '[' << section << "]\n";
    }
    if (e.key.section == "actuators") {
      if (config.rhc.layout == ActuatorLayout::default_layout()) {
        out << "# default layout\n";
        continue;
      }
      for (const Rect& r : config.rhc.layout.rectangles) {
        out << "rect = " << fmt(r.x0) << ' ' << fmt(r.y0) << ' ' << fmt(r.x1) << ' ' << fmt(r.y1) << '\n';
      }
      continue;
    }
    out << e.key.name << " = " << e.get(config) << '\n';
  }
  return out.str();
}

std::string config_help() {
  const RunConfig defaults;
  std::ostringstream out;
  out << "Config keys (INI, [section] then key = value):\n";
  for (const auto& e : entries()) {
    std::string full = e.key.section + "." + e.key.name;
    out << "  " << full;
    for (std::size_t i = full.size(); i < 22; ++i) out << ' ';
    out << e.key.doc << " [default: " << e.get(defaults) << "]\n";
  }
  return out.str();
}

}  // namespace srhc
