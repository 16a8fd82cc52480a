#pragma once

#include <span>
#include <string>

#include "mfnas/harness.hpp"

namespace mfnas {

/// "trial,best_m" rows of the running maximum.
std::string best_so_far_csv(std::span<const TrialRecord> log);
/// "trial,accuracy,params,m_value"; accuracy blank for unevaluated trials.
std::string trials_csv(std::span<const TrialRecord> log);
/// Top-quintile records: "trial,arch_id,genotype,accuracy,params,m_value".
std::string top20_csv(std::span<const TrialRecord> log);
/// Standalone SVG polyline of the best-so-far curve.
std::string best_so_far_svg(std::span<const TrialRecord> log);

struct ReportFiles {
  std::vector<std::string> written;
};

/// Writes the CSVs (and optionally the SVG) into out_dir. top20.csv is skipped
/// for logs shorter than five trials.
ReportFiles write_report(std::span<const TrialRecord> log, const std::string& out_dir, bool svg);

}  // namespace mfnas
