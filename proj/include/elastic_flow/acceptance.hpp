#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace elastic_flow {

struct CriterionInfo {
  int id;
  std::string_view tag;
  std::string_view title;
};

struct CriterionResult {
  int id = 0;
  std::string tag;
  std::string title;
  bool passed = false;
  std::vector<std::string> details;  ///< deterministic for a fixed seed
  double seconds = 0.0;              ///< wall time, not part of the report
};

inline constexpr std::uint64_t kDefaultSeed = 1;

struct VerifyOptions {
  std::vector<std::string> filters;  ///< tags or ids; empty runs everything
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  bool mutate_stencil = false;  ///< negative control: curvature stencil scaled by 1.05
};

std::span<const CriterionInfo> acceptance_criteria();
bool matches_filter(const CriterionInfo& info, std::span<const std::string> filters);

std::vector<CriterionResult> run_acceptance(const VerifyOptions& options);

/// One PASS/FAIL line per criterion, its detail lines and a summary line.
std::string format_report(std::span<const CriterionResult> results, const VerifyOptions& options);
bool all_passed(std::span<const CriterionResult> results);

}  // namespace elastic_flow
