#include "covsw/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "covsw/errors.hpp"

namespace covsw {

std::string_view to_string(MeshKind k) { return k == MeshKind::kRect ? "rect" : "voronoi"; }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("not a non-negative integer: '" + std::string(text) + "'");
  }
  return v;
}

bool parse_switch(std::string_view text) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw ConfigError("expected on|off, got '" + std::string(text) + "'");
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void validate(const RunConfig& c) {
  if (c.mesh_size && !(*c.mesh_size > 0.0)) throw ConfigError("mesh_size must be positive");
  if (c.gauss < 1) throw ConfigError("gauss must be >= 1");
  if (!(c.cfl > 0.0 && c.cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.output_interval < 0.0) throw ConfigError("output_interval must be >= 0");
  if ((c.nx && *c.nx < 2) || (c.ny && *c.ny < 2)) throw ConfigError("nx, ny must be >= 2");
  if (c.nx.has_value() != c.ny.has_value()) throw ConfigError("nx and ny must be given together");
}

void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
  if (key == "scenario") {
    c.scenario = std::string(value);
  } else if (key == "mesh") {
    if (value == "rect") {
      c.mesh = MeshKind::kRect;
    } else if (value == "voronoi") {
      c.mesh = MeshKind::kVoronoi;
    } else {
      throw ConfigError("mesh must be rect or voronoi");
    }
  } else if (key == "mesh_size") {
    c.mesh_size = parse_double(value);
  } else if (key == "nx") {
    c.nx = parse_uint(value);
  } else if (key == "ny") {
    c.ny = parse_uint(value);
  } else if (key == "lloyd_iters") {
    c.lloyd_iters = parse_uint(value);
  } else if (key == "seed") {
    c.seed = parse_uint(value);
  } else if (key == "cfl") {
    c.cfl = parse_double(value);
  } else if (key == "limiter") {
    c.limiter = parse_switch(value) ? Limiter::kBarthJespersen : Limiter::kNone;
  } else if (key == "first_order") {
    c.first_order = parse_switch(value);
  } else if (key == "gauss") {
    c.gauss = static_cast<int>(parse_uint(value));
  } else if (key == "output_interval") {
    c.output_interval = parse_double(value);
  } else if (key == "out") {
    c.out = std::string(value);
  } else if (key == "h_min") {
    if (value == "off") {
      c.h_min.reset();
    } else {
      c.h_min = parse_double(value);
    }
  } else if (key == "threads") {
    c.threads = static_cast<int>(parse_uint(value));
  } else if (key == "chart") {
    try {
      c.chart = chart_kind_from_string(value);
    } catch (const GeometryError& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "metric_mode") {
    c.metric_mode = metric_mode_from_string(value);
  } else if (key == "g") {
    c.g = parse_double(value);
  } else if (key == "final_time") {
    c.final_time = parse_double(value);
  } else if (key == "formulation") {
    c.formulation = formulation_from_string(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string line;
  int line_no = 0;
  bool active = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    if (view.front() == '[') {
      active = view == "[run]";
      continue;
    }
    if (!active) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_config_value(c, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream os;
  os << "[run]\n";
  os << "scenario = " << c.scenario << '\n';
  os << "mesh = " << to_string(c.mesh) << '\n';
  if (c.mesh_size) os << "mesh_size = " << format_double(*c.mesh_size) << '\n';
  if (c.nx) os << "nx = " << *c.nx << '\n';
  if (c.ny) os << "ny = " << *c.ny << '\n';
  os << "lloyd_iters = " << c.lloyd_iters << '\n';
  os << "seed = " << c.seed << '\n';
  os << "cfl = " << format_double(c.cfl) << '\n';
  os << "limiter = " << to_string(c.limiter) << '\n';
  os << "first_order = " << (c.first_order ? "on" : "off") << '\n';
  os << "gauss = " << c.gauss << '\n';
  os << "output_interval = " << format_double(c.output_interval) << '\n';
  os << "out = " << c.out << '\n';
  os << "h_min = " << (c.h_min ? format_double(*c.h_min) : std::string("off")) << '\n';
  os << "threads = " << c.threads << '\n';
  if (c.chart) os << "chart = " << to_string(*c.chart) << '\n';
  if (c.metric_mode) os << "metric_mode = " << to_string(*c.metric_mode) << '\n';
  if (c.g) os << "g = " << format_double(*c.g) << '\n';
  if (c.final_time) os << "final_time = " << format_double(*c.final_time) << '\n';
  if (c.formulation) os << "formulation = " << to_string(*c.formulation) << '\n';
  return os.str();
}

Scenario resolve_scenario(const RunConfig& c) {
  Scenario s = scenario_by_name(c.scenario);
  if (c.chart) s.chart = *c.chart;
  if (c.metric_mode) s.metric_mode = *c.metric_mode;
  if (c.g) s.g = *c.g;
  if (c.final_time) s.final_time = *c.final_time;
  if (c.formulation) s.formulation = *c.formulation;
  validate(s);
  return s;
}

RunConfig resolved(const RunConfig& c) {
  const Scenario s = resolve_scenario(c);
  RunConfig r = c;
  r.chart = s.chart;
  r.metric_mode = s.metric_mode;
  r.g = s.g;
  r.final_time = s.final_time;
  r.formulation = s.formulation;
  if (!r.mesh_size && !r.nx) {
    if (s.default_counts && r.mesh == MeshKind::kRect) {
      r.nx = s.default_counts->first;
      r.ny = s.default_counts->second;
    } else {
      r.mesh_size = s.default_mesh_size;
    }
  }
  return r;
}

SolverConfig solver_config(const RunConfig& c, const Scenario& s) {
  SolverConfig sc;
  sc.cfl = c.cfl;
  sc.limiter = c.limiter;
  sc.first_order = c.first_order;
  sc.gauss_points = c.gauss;
  sc.h_min = c.h_min;
  sc.threads = c.threads;
  sc.final_time = s.final_time;
  sc.output_interval = c.output_interval;
  return sc;
}

}  // namespace covsw
