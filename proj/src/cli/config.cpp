#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "cli/config_json.hpp"
#include "qgsw/cli.hpp"
#include "qgsw/contour.hpp"
#include "qgsw/io.hpp"

namespace qgsw::cli {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using RawConfig = std::map<std::string, Entry>;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "subcommand", "mode",           "epsilon",          "geometry",          "node_count",
      "dt",         "t_end",          "epsilons",         "seeds",             "output_dir",
      "amplitude",  "chord_arc_ceiling", "diagnostics_stride", "resample_stride", "sample_stride",
      "quadrature", "direction",      "substeps"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

void insert(RawConfig& raw, const std::string& key, std::string value, std::size_t line) {
  if (!known_keys().contains(key)) throw ConfigError(key, line, "unknown key");
  if (raw.contains(key)) throw ConfigError(key, line, "duplicate key");
  raw.emplace(key, Entry{std::move(value), line});
}

RawConfig read_key_value(std::string_view text) {
  RawConfig raw;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    ++line_no;
    std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (!line.empty() && line.front() != '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("", line_no, "expected key=value");
      const std::string key = trim(std::string_view(line).substr(0, eq));
      if (key.empty()) throw ConfigError("", line_no, "empty key");
      insert(raw, key, trim(std::string_view(line).substr(eq + 1)), line_no);
    }
    if (nl == std::string_view::npos) break;
  }
  return raw;
}

std::string json_scalar(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return io::format_double(v.get<double>());
  throw ConfigError(key, 0, "expected a string or number");
}

// JSON input is flattened to the same textual values the key=value form uses.
RawConfig read_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", 0, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", 0, "JSON config must be an object");
  RawConfig raw;
  for (const auto& [key, v] : doc.items()) {
    std::string value;
    if (key == "epsilons" && v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(key, 0, "expected an array of numbers");
        value += (i ? "," : "") + json_scalar(key, v[i]);
      }
    } else if (key == "seeds" && v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& p = v[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          throw ConfigError(key, 0, "expected an array of [x1, x2] pairs");
        }
        value += (i ? ";" : "") + json_scalar(key, p[0]) + "," + json_scalar(key, p[1]);
      }
    } else {
      value = json_scalar(key, v);
    }
    insert(raw, key, std::move(value), 0);
  }
  return raw;
}

double parse_real(const std::string& key, const Entry& e) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (e.value.empty() || end != begin + e.value.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(key, e.line, "expected a finite real, got '" + e.value + "'");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& text, std::size_t line) {
  return parse_real(key, Entry{text, line});
}

std::size_t parse_count(const std::string& key, const Entry& e) {
  std::size_t v = 0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (e.value.empty() || ec != std::errc{} || ptr != last) {
    throw ConfigError(key, e.line, "expected a nonnegative integer, got '" + e.value + "'");
  }
  return v;
}

Geometry parse_geometry(const Entry& e) {
  const auto colon = e.value.find(':');
  if (colon == std::string::npos) throw ConfigError("geometry", e.line, "expected circle:R, ellipse:a,b or file:path");
  const std::string kind = trim(std::string_view(e.value).substr(0, colon));
  const std::string arg = trim(std::string_view(e.value).substr(colon + 1));
  Geometry g;
  if (kind == "circle") {
    g.kind = Geometry::Kind::circle;
    g.a = g.b = parse_real("geometry", arg, e.line);
    if (!(g.a > 0.0)) throw ConfigError("geometry", e.line, "circle radius must be positive");
  } else if (kind == "ellipse") {
    const auto parts = split(arg, ',');
    if (parts.size() != 2) throw ConfigError("geometry", e.line, "expected ellipse:a,b");
    g.kind = Geometry::Kind::ellipse;
    g.a = parse_real("geometry", parts[0], e.line);
    g.b = parse_real("geometry", parts[1], e.line);
    if (!(g.a > 0.0) || !(g.b > 0.0)) throw ConfigError("geometry", e.line, "ellipse semi-axes must be positive");
  } else if (kind == "file") {
    if (arg.empty()) throw ConfigError("geometry", e.line, "file path is empty");
    g.kind = Geometry::Kind::file;
    g.path = arg;
  } else {
    throw ConfigError("geometry", e.line, "unknown geometry kind '" + kind + "'");
  }
  return g;
}

std::vector<double> parse_epsilons(const Entry& e) {
  std::vector<double> out;
  for (const auto& part : split(e.value, ',')) {
    const double v = parse_real("epsilons", part, e.line);
    if (!(v > 0.0)) throw ConfigError("epsilons", e.line, "every epsilon must be positive");
    if (!out.empty() && !(v < out.back())) throw ConfigError("epsilons", e.line, "epsilons must be strictly decreasing");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("epsilons", e.line, "empty list");
  return out;
}

std::vector<Vec2> parse_seeds(const Entry& e) {
  std::vector<Vec2> out;
  for (const auto& pair : split(e.value, ';')) {
    const auto xy = split(pair, ',');
    if (xy.size() != 2) throw ConfigError("seeds", e.line, "expected x1,x2 pairs separated by ';'");
    out.push_back({parse_real("seeds", xy[0], e.line), parse_real("seeds", xy[1], e.line)});
  }
  if (out.empty()) throw ConfigError("seeds", e.line, "empty list");
  return out;
}

Subcommand subcommand_from(const std::string& name, std::size_t line) {
  static const std::map<std::string, Subcommand> names = {{"bessel-verify", Subcommand::bessel_verify},
                                                          {"kernel-verify", Subcommand::kernel_verify},
                                                          {"evolve", Subcommand::evolve},
                                                          {"converge", Subcommand::converge},
                                                          {"trace", Subcommand::trace}};
  const auto it = names.find(name);
  if (it == names.end()) throw ConfigError("subcommand", line, "unknown subcommand '" + name + "'");
  return it->second;
}

void require(const RawConfig& raw, const std::string& key) {
  if (!raw.contains(key)) throw ConfigError(key, 0, "missing required key");
}

ExperimentConfig build(const RawConfig& raw) {
  ExperimentConfig c;
  require(raw, "subcommand");
  c.subcommand = subcommand_from(raw.at("subcommand").value, raw.at("subcommand").line);

  if (raw.contains("epsilon")) {
    const auto& e = raw.at("epsilon");
    const double eps = parse_real("epsilon", e);
    if (!(eps > 0.0)) throw ConfigError("epsilon", e.line, "epsilon must be positive");
  }

  const bool dynamics = c.subcommand == Subcommand::evolve || c.subcommand == Subcommand::trace ||
                        c.subcommand == Subcommand::converge;
  if (dynamics) {
    if (c.subcommand != Subcommand::converge) require(raw, "mode");
    for (const char* k : {"geometry", "node_count", "dt", "t_end"}) require(raw, k);
  }
  if (c.subcommand == Subcommand::converge) require(raw, "epsilons");
  if (c.subcommand == Subcommand::trace) require(raw, "seeds");
  require(raw, "output_dir");

  if (raw.contains("mode")) {
    const auto& e = raw.at("mode");
    KernelVariant variant{};
    try {
      variant = parse_kernel_variant(e.value);
    } catch (const Error&) {
      throw ConfigError("mode", e.line, "unknown mode '" + e.value + "'");
    }
    if (variant == KernelVariant::euler) {
      c.mode = KernelMode::euler();
    } else if (c.subcommand == Subcommand::converge) {
      // converge takes its epsilons from the list; mode only picks shifted or not.
      c.mode = variant == KernelVariant::qgsw ? KernelMode::qgsw(1.0) : KernelMode::qgsw_shifted(1.0);
    } else {
      if (!raw.contains("epsilon")) throw ConfigError("epsilon", 0, "missing required key for mode " + e.value);
      const double eps = parse_real("epsilon", raw.at("epsilon"));
      c.mode = variant == KernelVariant::qgsw ? KernelMode::qgsw(eps) : KernelMode::qgsw_shifted(eps);
    }
    if (c.subcommand == Subcommand::converge && variant == KernelVariant::euler) {
      throw ConfigError("mode", e.line, "converge compares qgsw or qgsw_shifted against euler");
    }
  } else if (c.subcommand == Subcommand::converge) {
    c.mode = KernelMode::qgsw_shifted(1.0);
  }

  if (raw.contains("geometry")) c.geometry = parse_geometry(raw.at("geometry"));
  if (raw.contains("node_count")) {
    const auto& e = raw.at("node_count");
    c.node_count = parse_count("node_count", e);
    if (c.node_count < kMinContourNodes || c.node_count % 2 != 0) {
      throw ConfigError("node_count", e.line, "node_count must be even and at least " + std::to_string(kMinContourNodes));
    }
  }
  if (raw.contains("dt")) {
    const auto& e = raw.at("dt");
    c.dt = parse_real("dt", e);
    if (!(c.dt > 0.0)) throw ConfigError("dt", e.line, "dt must be positive");
  }
  if (raw.contains("t_end")) {
    const auto& e = raw.at("t_end");
    c.t_end = parse_real("t_end", e);
    if (!(c.t_end > 0.0)) throw ConfigError("t_end", e.line, "t_end must be positive");
    if (c.dt > c.t_end) throw ConfigError("dt", raw.at("dt").line, "dt must not exceed t_end");
  }
  if (raw.contains("epsilons")) c.epsilons = parse_epsilons(raw.at("epsilons"));
  if (c.subcommand == Subcommand::converge && c.epsilons.front() >= 2.0) {
    throw ConfigError("epsilons", raw.at("epsilons").line, "converge requires every epsilon below 2");
  }
  if (c.subcommand == Subcommand::kernel_verify && c.epsilons.empty()) c.epsilons = {10.0, 1.0, 0.1, 0.01};
  if (raw.contains("seeds")) c.seeds = parse_seeds(raw.at("seeds"));

  c.output_dir = raw.at("output_dir").value;
  if (c.output_dir.empty()) throw ConfigError("output_dir", raw.at("output_dir").line, "output_dir is empty");

  if (raw.contains("amplitude")) c.amplitude = parse_real("amplitude", raw.at("amplitude"));
  if (raw.contains("chord_arc_ceiling")) {
    const auto& e = raw.at("chord_arc_ceiling");
    c.chord_arc_ceiling = parse_real("chord_arc_ceiling", e);
    if (!(c.chord_arc_ceiling >= 1.0)) throw ConfigError("chord_arc_ceiling", e.line, "ceiling must be at least 1");
  }
  if (raw.contains("diagnostics_stride")) {
    const auto& e = raw.at("diagnostics_stride");
    c.diagnostics_stride = parse_count("diagnostics_stride", e);
    if (c.diagnostics_stride == 0) throw ConfigError("diagnostics_stride", e.line, "stride must be positive");
  }
  if (raw.contains("resample_stride")) c.resample_stride = parse_count("resample_stride", raw.at("resample_stride"));
  if (raw.contains("sample_stride")) {
    const auto& e = raw.at("sample_stride");
    c.sample_stride = parse_count("sample_stride", e);
    if (c.sample_stride == 0) throw ConfigError("sample_stride", e.line, "stride must be positive");
  }
  if (raw.contains("substeps")) {
    const auto& e = raw.at("substeps");
    c.substeps = parse_count("substeps", e);
    if (c.substeps == 0) throw ConfigError("substeps", e.line, "substeps must be positive");
  }
  if (raw.contains("quadrature")) {
    const auto& e = raw.at("quadrature");
    if (e.value == "log_corrected") {
      c.quadrature = QuadratureRule::log_corrected;
    } else if (e.value == "trapezoid") {
      c.quadrature = QuadratureRule::punctured_trapezoid;
    } else {
      throw ConfigError("quadrature", e.line, "expected log_corrected or trapezoid");
    }
  }
  if (raw.contains("direction")) {
    const auto& e = raw.at("direction");
    if (e.value == "forward") {
      c.direction = FlowDirection::forward;
    } else if (e.value == "backward") {
      c.direction = FlowDirection::backward;
    } else {
      throw ConfigError("direction", e.line, "expected forward or backward");
    }
  }
  return c;
}

std::string geometry_string(const Geometry& g) {
  switch (g.kind) {
    case Geometry::Kind::circle:
      return "circle:" + io::format_double(g.a);
    case Geometry::Kind::ellipse:
      return "ellipse:" + io::format_double(g.a) + "," + io::format_double(g.b);
    case Geometry::Kind::file:
      return "file:" + g.path;
  }
  return {};
}

}  // namespace

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::bessel_verify:
      return "bessel-verify";
    case Subcommand::kernel_verify:
      return "kernel-verify";
    case Subcommand::evolve:
      return "evolve";
    case Subcommand::converge:
      return "converge";
    case Subcommand::trace:
      return "trace";
  }
  return "unknown";
}

ConfigError::ConfigError(std::string key, std::size_t line, const std::string& message)
    : Error("config" + (key.empty() ? std::string() : " key '" + key + "'") +
            (line ? " (line " + std::to_string(line) + ")" : std::string()) + ": " + message),
      key_(std::move(key)),
      line_(line) {}

Subcommand parse_subcommand(std::string_view name) { return subcommand_from(std::string(name), 0); }

ExperimentConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  const auto first = text.find_first_not_of(" \t\r\n");
  RawConfig raw = first != std::string_view::npos && text[first] == '{' ? read_json(text) : read_key_value(text);
  if (overrides.subcommand) {
    const std::string name = to_string(*overrides.subcommand);
    const auto it = raw.find("subcommand");
    if (it == raw.end()) {
      raw["subcommand"] = Entry{name, 0};
    } else if (subcommand_from(it->second.value, it->second.line) != *overrides.subcommand) {
      throw ConfigError("subcommand", it->second.line,
                        "config names '" + it->second.value + "' but the command line asks for '" + name + "'");
    }
  }
  if (overrides.output_dir) raw["output_dir"] = Entry{*overrides.output_dir, 0};
  return build(raw);
}

std::string describe(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto line = [&](const std::string& k, const std::string& v) { out << k << '=' << v << '\n'; };
  line("subcommand", to_string(c.subcommand));
  line("mode", to_string(c.mode.variant()));
  if (!c.mode.is_euler() && c.subcommand != Subcommand::converge) line("epsilon", io::format_double(c.mode.epsilon()));
  if (c.geometry) line("geometry", geometry_string(*c.geometry));
  if (c.node_count) line("node_count", std::to_string(c.node_count));
  if (c.dt > 0.0) line("dt", io::format_double(c.dt));
  if (c.t_end > 0.0) line("t_end", io::format_double(c.t_end));
  if (!c.epsilons.empty()) {
    std::string s;
    for (std::size_t i = 0; i < c.epsilons.size(); ++i) s += (i ? "," : "") + io::format_double(c.epsilons[i]);
    line("epsilons", s);
  }
  if (!c.seeds.empty()) {
    std::string s;
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
      s += (i ? ";" : "") + io::format_double(c.seeds[i].x1) + "," + io::format_double(c.seeds[i].x2);
    }
    line("seeds", s);
  }
  line("output_dir", c.output_dir);
  line("amplitude", io::format_double(c.amplitude));
  line("chord_arc_ceiling", io::format_double(c.chord_arc_ceiling));
  line("diagnostics_stride", std::to_string(c.diagnostics_stride));
  line("resample_stride", std::to_string(c.resample_stride));
  line("sample_stride", std::to_string(c.sample_stride));
  line("substeps", std::to_string(c.substeps));
  line("quadrature", c.quadrature == QuadratureRule::log_corrected ? "log_corrected" : "trapezoid");
  line("direction", c.direction == FlowDirection::forward ? "forward" : "backward");
  return out.str();
}

namespace detail {

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["subcommand"] = to_string(c.subcommand);
  j["mode"] = to_string(c.mode.variant());
  if (!c.mode.is_euler() && c.subcommand != Subcommand::converge) j["epsilon"] = c.mode.epsilon();
  if (c.geometry) j["geometry"] = geometry_string(*c.geometry);
  if (c.node_count) j["node_count"] = c.node_count;
  if (c.dt > 0.0) j["dt"] = c.dt;
  if (c.t_end > 0.0) j["t_end"] = c.t_end;
  if (!c.epsilons.empty()) j["epsilons"] = c.epsilons;
  if (!c.seeds.empty()) {
    auto seeds = nlohmann::json::array();
    for (const auto& s : c.seeds) seeds.push_back({s.x1, s.x2});
    j["seeds"] = seeds;
  }
  j["output_dir"] = c.output_dir;
  j["amplitude"] = c.amplitude;
  j["chord_arc_ceiling"] = c.chord_arc_ceiling;
  j["diagnostics_stride"] = c.diagnostics_stride;
  j["resample_stride"] = c.resample_stride;
  j["sample_stride"] = c.sample_stride;
  j["substeps"] = c.substeps;
  j["quadrature"] = c.quadrature == QuadratureRule::log_corrected ? "log_corrected" : "trapezoid";
  j["direction"] = c.direction == FlowDirection::forward ? "forward" : "backward";
  return j;
}

}  // namespace detail

}  // namespace qgsw::cli
