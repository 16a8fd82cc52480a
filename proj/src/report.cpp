#include "mfnas/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfnas/errors.hpp"
#include "mfnas/format.hpp"

namespace mfnas {

std::string best_so_far_csv(std::span<const TrialRecord> log) {
  std::ostringstream out;
  out << "trial,best_m\n";
  for (const auto& [trial, best] : best_so_far_curve(log)) out << trial << ',' << format_double(best) << '\n';
  return out.str();
}

std::string trials_csv(std::span<const TrialRecord> log) {
  std::ostringstream out;
  out << "trial,accuracy,params,m_value\n";
  for (const auto& r : log)
    out << r.trial << ',' << (r.accuracy ? format_double(*r.accuracy) : "") << ',' << r.params << ','
        << format_double(r.m_value) << '\n';
  return out.str();
}

std::string top20_csv(std::span<const TrialRecord> log) {
  std::ostringstream out;
  out << "trial,arch_id,genotype,accuracy,params,m_value\n";
  for (const auto& r : top_quintile_analysis(log).records)
    out << r.trial << ',' << r.arch_id << ',' << r.genotype.str() << ','
        << (r.accuracy ? format_double(*r.accuracy) : "") << ',' << r.params << ',' << format_double(r.m_value)
        << '\n';
  return out.str();
}

std::string best_so_far_svg(std::span<const TrialRecord> log) {
  const auto curve = best_so_far_curve(log);
  constexpr double width = 640, height = 360, margin = 40;
  double lo = curve.front().second, hi = curve.back().second;
  for (const auto& r : log) lo = std::min(lo, r.m_value);
  if (hi - lo < 1e-9) {
    lo -= 0.05;
    hi += 0.05;
  }
  const double n = static_cast<double>(std::max<std::size_t>(curve.size() - 1, 1));
  auto x = [&](std::size_t i) { return margin + (width - 2 * margin) * static_cast<double>(i) / n; };
  auto y = [&](double v) { return height - margin - (height - 2 * margin) * (v - lo) / (hi - lo); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < log.size(); ++i)
    out << "<circle cx=\"" << x(i) << "\" cy=\"" << y(log[i].m_value) << "\" r=\"2\" fill=\"gray\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < curve.size(); ++i) out << (i ? " " : "") << x(i) << ',' << y(curve[i].second);
  out << "\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << margin - 10 << "\" font-size=\"12\">best M over "
      << curve.size() << " trials: " << format_double(curve.back().second) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body, ReportFiles& files) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << body;
  files.written.push_back(path.string());
}

}  // namespace

ReportFiles write_report(std::span<const TrialRecord> log, const std::string& out_dir, bool svg) {
  if (log.empty()) throw EmptyRun("empty trial log");
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  ReportFiles files;
  write_file(dir / "best_so_far.csv", best_so_far_csv(log), files);
  write_file(dir / "trials.csv", trials_csv(log), files);
  if (log.size() >= 5) write_file(dir / "top20.csv", top20_csv(log), files);
  if (svg) write_file(dir / "best_so_far.svg", best_so_far_svg(log), files);
  return files;
}

}  // namespace mfnas
