#include "elastic_flow/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace elastic_flow {

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

double parse_real(std::string_view token) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw IoError(fmt::format("not a number: '{}'", token));
  }
  return v;
}

void write_snapshot(std::ostream& out, const FlowState& state) {
  const DiscreteCurve& c = state.curve();
  out << "n=" << c.segments() << " length=" << format_real(state.cache().total_length)
      << " t=" << format_real(state.time()) << " eps=" << format_real(state.epsilon()) << '\n';
  const auto nodes = c.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out << format_real(nodes[i].x) << ' ' << format_real(nodes[i].y) << ' '
        << format_real(state.cache().kappa[i]) << '\n';
  }
  if (!out) throw IoError("failed writing snapshot");
}

namespace {

std::string_view header_field(std::string_view token, std::string_view key) {
  if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key || token[key.size()] != '=') {
    throw IoError(fmt::format("snapshot header: expected '{}=...', got '{}'", key, token));
  }
  return token.substr(key.size() + 1);
}

}  // namespace

Snapshot read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("snapshot: missing header");
  std::istringstream header(line);
  std::string f[4];
  if (!(header >> f[0] >> f[1] >> f[2] >> f[3])) throw IoError("snapshot: malformed header");
  Snapshot s;
  const std::string_view n_text = header_field(f[0], "n");
  const auto [ptr, ec] = std::from_chars(n_text.data(), n_text.data() + n_text.size(), s.n);
  if (ec != std::errc() || ptr != n_text.data() + n_text.size()) throw IoError("snapshot: bad node count");
  s.length = parse_real(header_field(f[1], "length"));
  s.t = parse_real(header_field(f[2], "t"));
  s.epsilon = parse_real(header_field(f[3], "eps"));
  for (std::size_t i = 0; i <= s.n; ++i) {
    if (!std::getline(in, line)) throw IoError(fmt::format("snapshot: expected {} node lines, got {}", s.n + 1, i));
    std::istringstream row(line);
    std::string x, y, k;
    if (!(row >> x >> y >> k)) throw IoError(fmt::format("snapshot: malformed node line {}", i + 1));
    s.nodes.push_back({parse_real(x), parse_real(y)});
    s.kappa.push_back(parse_real(k));
  }
  return s;
}

std::string_view diagnostics_csv_header() {
  return "t,length,energy,dissipation,k0,k1,k2,k3,k4,b0L,b0R,b2L,b2R,b4L,b4R,lam_res,maxE,maxLam";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& d) {
  const auto& b = d.boundary;
  return fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
                     "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}",
                     d.t, d.length, d.energy, d.dissipation, d.kappa_l2_sq[0], d.kappa_l2_sq[1],
                     d.kappa_l2_sq[2], d.kappa_l2_sq[3], d.kappa_l2_sq[4], b.left[0], b.right[0], b.left[1],
                     b.right[1], b.left[2], b.right[2], d.lambda_endpoint_residual, d.max_abs_e,
                     d.max_abs_lambda);
}

void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records) {
  out << diagnostics_csv_header() << '\n';
  for (const DiagnosticsRecord& d : records) out << diagnostics_csv_row(d) << '\n';
  if (!out) throw IoError("failed writing diagnostics");
}

std::string report_text(const ConvergenceReport& r) {
  std::string out = "# convergence report\n";
  out += fmt::format("n={} dt={} t_end={} delta={} k_max={} reference={}\n", r.n, format_real(r.dt),
                     format_real(r.t_end), format_real(r.delta), r.k_max, to_string(r.reference_terminated_by));
  out += "eps";
  for (int k = 0; k <= r.k_max; ++k) out += fmt::format(",d{}", k);
  out += '\n';
  for (const ConvergenceRow& row : r.rows) {
    out += format_real(row.epsilon);
    if (row.complete()) {
      for (double d : row.distance) out += "," + format_real(d);
    } else {
      out += fmt::format(",incomplete:{}", to_string(row.terminated_by));
    }
    out += '\n';
  }
  out += "fitted_order";
  for (std::size_t k = 0; k < r.fitted_order.size(); ++k) {
    out += fmt::format(",d{}={}", k, r.fitted_order[k] ? format_real(*r.fitted_order[k]) : "n/a");
  }
  out += "\nmonotone";
  for (std::size_t k = 0; k < r.monotone.size(); ++k) {
    out += fmt::format(",d{}={}", k, r.monotone[k] ? "true" : "false");
  }
  out += '\n';
  return out;
}

std::string report_json(const ConvergenceReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["dt"] = r.dt;
  j["t_end"] = r.t_end;
  j["delta"] = r.delta;
  j["k_max"] = r.k_max;
  j["reference"] = std::string(to_string(r.reference_terminated_by));
  j["rows"] = nlohmann::ordered_json::array();
  for (const ConvergenceRow& row : r.rows) {
    nlohmann::ordered_json jr;
    jr["epsilon"] = row.epsilon;
    jr["terminated_by"] = std::string(to_string(row.terminated_by));
    jr["complete"] = row.complete();
    jr["distance"] = row.distance;
    j["rows"].push_back(jr);
  }
  j["fitted_order"] = nlohmann::ordered_json::array();
  for (const auto& f : r.fitted_order) {
    j["fitted_order"].push_back(f ? nlohmann::ordered_json(*f) : nlohmann::ordered_json(nullptr));
  }
  j["monotone"] = r.monotone;
  return j.dump(2) + "\n";
}

void RunManifest::validate() const {
  if (stride < 1) throw IoError("stride: must be at least 1");
  if (command != Command::verify && out_dir.empty()) throw IoError("out_dir: required");
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
  }
}

}  // namespace

std::vector<std::filesystem::path> emit_outputs(const Trajectory& traj, const RunManifest& manifest) {
  manifest.validate();
  ensure_dir(manifest.out_dir);
  std::vector<std::filesystem::path> written;
  for (const FlowState& s : traj.states) {
    const auto path = manifest.out_dir / fmt::format("snapshot_{:07d}.txt", s.step_index());
    std::ofstream out = open_output(path);
    write_snapshot(out, s);
    written.push_back(path);
  }
  const auto csv = manifest.out_dir / "diagnostics.csv";
  std::ofstream out = open_output(csv);
  write_diagnostics_csv(out, traj.diagnostics);
  written.push_back(csv);
  return written;
}

std::vector<std::filesystem::path> emit_outputs(const ConvergenceReport& report, const RunManifest& manifest) {
  manifest.validate();
  ensure_dir(manifest.out_dir);
  const auto text = manifest.out_dir / "report.txt";
  const auto json = manifest.out_dir / "report.json";
  {
    std::ofstream out = open_output(text);
    out << report_text(report);
    if (!out) throw IoError("failed writing report.txt");
  }
  {
    std::ofstream out = open_output(json);
    out << report_json(report);
    if (!out) throw IoError("failed writing report.json");
  }
  return {text, json};
}

}  // namespace elastic_flow
