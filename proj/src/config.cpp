#include "elastic_flow/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace elastic_flow {

const FlowConfig& ParsedConfig::flow() const {
  if (const auto* s = std::get_if<SweepConfig>(&config)) return s->base;
  return std::get<FlowConfig>(config);
}

namespace {

namespace pt = boost::property_tree;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double to_real(const std::string& key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(key, fmt::format("expected a number, got '{}'", text));
  }
  return v;
}

std::size_t to_count(const std::string& key, std::string_view text) {
  text = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key, fmt::format("expected a non-negative integer, got '{}'", text));
  }
  return v;
}

std::vector<double> to_list(const std::string& key, std::string_view text) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    throw ConfigError(key, fmt::format("expected a list like [a, b], got '{}'", text));
  }
  text = trim(text.substr(1, text.size() - 2));
  std::vector<double> out;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    out.push_back(to_real(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text = trim(text.substr(comma + 1));
    if (text.empty()) throw ConfigError(key, "trailing comma in list");
  }
  return out;
}

using Setter = std::function<void(const std::string& key, const std::string& value)>;

void apply_section(const std::string& section, const pt::ptree& tree, const std::map<std::string, Setter>& setters) {
  for (const auto& [name, child] : tree) {
    const std::string key = section + "." + name;
    if (!child.empty()) throw ConfigError(key, "unexpected nested section");
    const auto it = setters.find(name);
    if (it == setters.end()) throw ConfigError(key, "unknown key");
    it->second(key, child.data());
  }
}

/// Re-raises a BadConfig whose message starts with a field name as a ConfigError
/// on "<section>.<field>".
[[noreturn]] void rethrow_as_config_error(const BadConfig& err, const std::string& section) {
  const std::string msg = err.what();
  const std::size_t colon = msg.find(':');
  if (colon == std::string::npos) throw ConfigError(section, msg);
  std::string field = msg.substr(0, colon);
  if (field.find('.') == std::string::npos) field = section + "." + field;
  throw ConfigError(field, std::string(trim(std::string_view(msg).substr(colon + 1))));
}

}  // namespace

ParsedConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& err) {
    throw ConfigError(fmt::format("line {}", err.line()), err.message());
  }

  FlowConfig flow;
  bool dt_given = false;
  InitialCurveParams initial;
  std::size_t stride = 1;
  bool sweep = false;
  std::vector<double> epsilons;
  bool delta_given = false;
  double delta = 0.0;
  int k_max = 1;
  std::vector<double> snapshot_times;

  const std::map<std::string, Setter> flow_keys{
      {"epsilon", [&](auto& k, auto& v) { flow.epsilon = to_real(k, v); }},
      {"dt", [&](auto& k, auto& v) { flow.dt = to_real(k, v), dt_given = true; }},
      {"n", [&](auto& k, auto& v) { flow.n = to_count(k, v); }},
      {"t_end", [&](auto& k, auto& v) { flow.t_end = to_real(k, v); }},
      {"reparam_every", [&](auto& k, auto& v) { flow.reparam_every = to_count(k, v); }},
      {"kappa_blowup_threshold", [&](auto& k, auto& v) { flow.kappa_blowup_threshold = to_real(k, v); }},
      {"solver_tol", [&](auto& k, auto& v) { flow.solver_tol = to_real(k, v); }},
  };
  const std::map<std::string, Setter> initial_keys{
      {"family",
       [&](auto& k, auto& v) {
         const auto f = parse_curve_family(trim(v));
         if (!f) throw ConfigError(k, fmt::format("unknown curve family '{}'", v));
         initial.family = *f;
       }},
      {"p_x", [&](auto& k, auto& v) { initial.p.x = to_real(k, v); }},
      {"p_y", [&](auto& k, auto& v) { initial.p.y = to_real(k, v); }},
      {"q_x", [&](auto& k, auto& v) { initial.q.x = to_real(k, v); }},
      {"q_y", [&](auto& k, auto& v) { initial.q.y = to_real(k, v); }},
      {"amplitude", [&](auto& k, auto& v) { initial.amplitude = to_real(k, v); }},
      {"modes", [&](auto& k, auto& v) { initial.modes = static_cast<int>(to_count(k, v)); }},
      {"support_lo", [&](auto& k, auto& v) { initial.support_lo = to_real(k, v); }},
      {"support_hi", [&](auto& k, auto& v) { initial.support_hi = to_real(k, v); }},
      {"arc_angle", [&](auto& k, auto& v) { initial.arc_angle = to_real(k, v); }},
      {"arc_radius", [&](auto& k, auto& v) { initial.arc_radius = to_real(k, v); }},
      {"ramp_length", [&](auto& k, auto& v) { initial.ramp_length = to_real(k, v); }},
      {"flat_length", [&](auto& k, auto& v) { initial.flat_length = to_real(k, v); }},
  };
  const std::map<std::string, Setter> sweep_keys{
      {"epsilons", [&](auto& k, auto& v) { epsilons = to_list(k, v); }},
      {"delta", [&](auto& k, auto& v) { delta = to_real(k, v), delta_given = true; }},
      {"k_max", [&](auto& k, auto& v) { k_max = static_cast<int>(to_count(k, v)); }},
      {"snapshot_times", [&](auto& k, auto& v) { snapshot_times = to_list(k, v); }},
  };
  const std::map<std::string, Setter> output_keys{
      {"stride", [&](auto& k, auto& v) { stride = to_count(k, v); }},
  };

  for (const auto& [name, child] : tree) {
    if (child.empty()) {
      // top-level key, belongs to [flow]
      const auto it = flow_keys.find(name);
      if (it == flow_keys.end()) throw ConfigError("flow." + name, "unknown key");
      it->second("flow." + name, child.data());
    } else if (name == "flow") {
      apply_section(name, child, flow_keys);
    } else if (name == "initial") {
      apply_section(name, child, initial_keys);
    } else if (name == "sweep") {
      sweep = true;
      apply_section(name, child, sweep_keys);
    } else if (name == "output") {
      apply_section(name, child, output_keys);
    } else {
      throw ConfigError(name, "unknown section");
    }
  }

  if (!dt_given) flow.dt = FlowConfig::default_dt(flow.n);
  if (stride < 1) throw ConfigError("output.stride", "must be at least 1");
  try {
    flow.validate();
  } catch (const BadConfig& err) {
    rethrow_as_config_error(err, "flow");
  }

  ParsedConfig out;
  out.initial = initial;
  out.stride = stride;
  if (!sweep) {
    out.config = flow;
    return out;
  }
  if (epsilons.empty()) throw ConfigError("sweep.epsilons", "required in a sweep document");
  SweepConfig sc = SweepConfig::with_defaults(epsilons, flow);
  if (delta_given) sc.delta = delta;
  sc.k_max = k_max;
  sc.snapshot_times = snapshot_times;
  try {
    sc.validate();
  } catch (const BadConfig& err) {
    rethrow_as_config_error(err, "sweep");
  }
  out.config = sc;
  return out;
}

ParsedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace elastic_flow
