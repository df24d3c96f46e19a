#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "elastic_flow/convergence.hpp"
#include "elastic_flow/flow.hpp"

namespace elastic_flow {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, so parse_real(format_real(x)) == x.
std::string format_real(double x);
/// Strict parse of a whole token; throws IoError.
double parse_real(std::string_view token);

struct Snapshot {
  std::size_t n = 0;
  double length = 0.0;
  double t = 0.0;
  double epsilon = 0.0;
  std::vector<Point2> nodes;
  std::vector<double> kappa;
};

/// Header `n=<int> length=<float> t=<float> eps=<float>`, then n+1 lines `x y kappa`.
void write_snapshot(std::ostream& out, const FlowState& state);
Snapshot read_snapshot(std::istream& in);

std::string_view diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& d);
void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records);

std::string report_text(const ConvergenceReport& report);
std::string report_json(const ConvergenceReport& report);

struct RunManifest {
  enum class Command { simulate, sweep, verify };
  Command command = Command::simulate;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::uint64_t seed = 1;
  std::size_t stride = 1;

  void validate() const;
};

/// snapshot_<step>.txt per stored state and diagnostics.csv; returns the files written.
std::vector<std::filesystem::path> emit_outputs(const Trajectory& traj, const RunManifest& manifest);
/// report.txt and its JSON mirror report.json.
std::vector<std::filesystem::path> emit_outputs(const ConvergenceReport& report, const RunManifest& manifest);

}  // namespace elastic_flow
