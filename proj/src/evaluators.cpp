#include "mfnas/evaluators.hpp"

#include <algorithm>
#include <fstream>
#include <vector>

#include "mfnas/errors.hpp"
#include "mfnas/format.hpp"
#include "mfnas/random.hpp"

namespace mfnas {

std::string to_string(EvaluatorKind kind) {
  switch (kind) {
    case EvaluatorKind::surrogate: return "surrogate";
    case EvaluatorKind::table: return "table";
    case EvaluatorKind::external: return "external";
  }
  return "unknown";
}

EvaluatorKind parse_evaluator_kind(const std::string& text) {
  if (text == "surrogate") return EvaluatorKind::surrogate;
  if (text == "table") return EvaluatorKind::table;
  if (text == "external") return EvaluatorKind::external;
  throw InvalidConfig("unknown evaluator '" + text + "'");
}

Evaluation Evaluator::evaluate(const Genotype& g) {
  const auto start = std::chrono::steady_clock::now();
  const double acc = accuracy(g);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return {g, acc, kind(), elapsed.count()};
}

void SurrogateSpec::validate() const {
  if (noise_amplitude < 0) throw InvalidConfig("surrogate noise_amplitude must be non-negative");
  if (base < 0) throw InvalidConfig("surrogate base must be non-negative");
  if (base + static_cast<double>(target.size()) * step + noise_amplitude > 1.0 + 1e-12)
    throw InvalidConfig("surrogate base + slots*step + noise_amplitude exceeds 1");
}

double surrogate_noise(ArchId arch_id, std::uint64_t seed) {
  const std::uint64_t h = splitmix64(arch_id ^ splitmix64(seed));
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

double surrogate_accuracy(const Genotype& g, const SurrogateSpec& spec, const SpaceSpec& space) {
  space.check(g);
  if (spec.target.size() != g.size()) throw InvalidGenotype("surrogate target length differs from genotype");
  int matches = 0;
  for (std::size_t i = 0; i < g.size(); ++i) matches += g[i] == spec.target[i];
  double acc = spec.base + spec.step * matches;
  if (spec.noise_amplitude > 0) acc += spec.noise_amplitude * surrogate_noise(encode(g, space), spec.noise_seed);
  return std::clamp(acc, 0.0, 1.0);
}

SurrogateEvaluator::SurrogateEvaluator(SurrogateSpec spec, SpaceSpec space)
    : spec_(std::move(spec)), space_(std::move(space)) {
  space_.validate();
  space_.check(spec_.target);
  spec_.validate();
}

AccuracyTable load_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open table '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || (line != "arch_id,accuracy" && line != "arch_id,accuracy\r"))
    throw Error(path + ": expected header 'arch_id,accuracy'");
  AccuracyTable table;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw Error("missing comma");
      const long long id = parse_int(std::string_view(line).substr(0, comma));
      const double acc = parse_double(std::string_view(line).substr(comma + 1));
      if (id < 0) throw Error("negative arch_id");
      if (!(acc >= 0.0 && acc <= 1.0)) throw Error("accuracy outside [0, 1]");
      if (!table.emplace(static_cast<ArchId>(id), acc).second) throw Error("duplicate arch_id");
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

void write_table_csv(const std::string& path, const AccuracyTable& table) {
  std::vector<std::pair<ArchId, double>> rows(table.begin(), table.end());
  std::sort(rows.begin(), rows.end());
  std::ofstream out(path);
  if (!out) throw Error("cannot write table '" + path + "'");
  out << "arch_id,accuracy\n";
  for (const auto& [id, acc] : rows) out << id << ',' << format_double(acc) << '\n';
}

double table_accuracy(const Genotype& g, const AccuracyTable& table, const SpaceSpec& space) {
  const ArchId id = encode(g, space);
  const auto it = table.find(id);
  if (it == table.end()) throw MissingEntry("no accuracy for arch_id " + std::to_string(id));
  return it->second;
}

TableEvaluator::TableEvaluator(AccuracyTable table, SpaceSpec space)
    : table_(std::move(table)), space_(std::move(space)) {}

std::unique_ptr<Evaluator> make_evaluator(const EvaluatorConfig& cfg, const SpaceSpec& space) {
  switch (cfg.kind) {
    case EvaluatorKind::surrogate:
      return std::make_unique<SurrogateEvaluator>(cfg.surrogate, space);
    case EvaluatorKind::table:
      if (cfg.table_path.empty()) throw InvalidConfig("table evaluator needs a table path");
      return std::make_unique<TableEvaluator>(load_table_csv(cfg.table_path), space);
    case EvaluatorKind::external:
      if (cfg.command.empty()) throw InvalidConfig("external evaluator needs an evaluator command");
      if (!(cfg.timeout_s > 0)) throw InvalidConfig("evaluator timeout must be positive");
      return std::make_unique<ExternalEvaluator>(
          cfg.command, std::chrono::milliseconds(static_cast<long long>(cfg.timeout_s * 1000.0)), space);
  }
  throw InvalidConfig("unknown evaluator kind");
}

}  // namespace mfnas
