#include "mfnas/search_space.hpp"

#include <algorithm>
#include <numeric>

#include "mfnas/errors.hpp"

namespace mfnas {

Genotype::Genotype(std::initializer_list<int> slots) {
  slots_.reserve(slots.size());
  for (int v : slots) {
    if (v < 0 || v > 9) throw InvalidGenotype("slot value " + std::to_string(v) + " out of range");
    slots_.push_back(static_cast<std::uint8_t>(v));
  }
}

std::string Genotype::str() const {
  std::string out;
  out.reserve(slots_.size());
  for (auto v : slots_) out.push_back(static_cast<char>('0' + v));
  return out;
}

int hamming_distance(const Genotype& a, const Genotype& b) {
  if (a.size() != b.size()) throw InvalidGenotype("hamming distance of genotypes with different lengths");
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

std::size_t SpaceSpec::slot_count() const {
  return static_cast<std::size_t>(std::accumulate(blocks_per_stage.begin(), blocks_per_stage.end(), 0));
}

ArchId SpaceSpec::size() const {
  ArchId n = 1;
  for (std::size_t i = 0; i < slot_count(); ++i) n *= choice_count();
  return n;
}

void SpaceSpec::validate() const {
  auto positive = [](int v) { return v > 0; };
  if (stage_widths.empty()) throw InvalidSpace("space has no stages");
  if (stage_widths.size() != blocks_per_stage.size() || stage_widths.size() != stage_strides.size())
    throw InvalidSpace("stage_widths, blocks_per_stage and stage_strides must have equal length");
  if (!std::all_of(stage_widths.begin(), stage_widths.end(), positive) ||
      !std::all_of(blocks_per_stage.begin(), blocks_per_stage.end(), positive) ||
      !std::all_of(stage_strides.begin(), stage_strides.end(), positive))
    throw InvalidSpace("stage widths, block counts and strides must be positive");
  if (stem_in_channels <= 0 || stem_out_channels <= 0 || num_classes <= 0 || input_resolution <= 0)
    throw InvalidSpace("stem channels, class count and resolution must be positive");
  if (choices.empty() || choices.size() > 10) throw InvalidSpace("between 1 and 10 kernel choices required");
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (choices[i].index != static_cast<int>(i)) throw InvalidSpace("kernel choice indices must be 0..n-1 in order");
    if (choices[i].kernel <= 0 || choices[i].kernel % 2 == 0) throw InvalidSpace("kernel sizes must be odd and positive");
  }
  // arch ids are 64-bit
  long double total = 1;
  for (std::size_t i = 0; i < slot_count(); ++i) total *= static_cast<long double>(choices.size());
  if (total > 1e18L) throw InvalidSpace("space too large to index");
}

void SpaceSpec::check(const Genotype& g) const {
  if (g.size() != slot_count())
    throw InvalidGenotype("genotype has " + std::to_string(g.size()) + " slots, space has " +
                          std::to_string(slot_count()));
  for (std::size_t i = 0; i < g.size(); ++i)
    if (static_cast<std::size_t>(g[i]) >= choice_count())
      throw InvalidGenotype("slot " + std::to_string(i) + " value " + std::to_string(g[i]) + " out of range");
}

ArchId encode(const Genotype& g, const SpaceSpec& space) {
  space.check(g);
  ArchId id = 0;
  for (auto v : g.slots()) id = id * space.choice_count() + v;
  return id;
}

Genotype decode(ArchId id, const SpaceSpec& space) {
  if (id >= space.size()) throw InvalidArchId("arch_id " + std::to_string(id) + " out of range");
  std::vector<std::uint8_t> slots(space.slot_count());
  for (auto it = slots.rbegin(); it != slots.rend(); ++it) {
    *it = static_cast<std::uint8_t>(id % space.choice_count());
    id /= space.choice_count();
  }
  return Genotype(std::move(slots));
}

Genotype parse_genotype(std::string_view text, const SpaceSpec& space) {
  std::vector<std::uint8_t> slots;
  slots.reserve(text.size());
  for (char c : text) {
    if (c < '0' || c > '9') throw InvalidGenotype("bad genotype character '" + std::string(1, c) + "'");
    slots.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  Genotype g(std::move(slots));
  space.check(g);
  return g;
}

GenotypeRange::GenotypeRange(SpaceSpec space) : space_(std::move(space)) { space_.validate(); }

GenotypeRange enumerate(const SpaceSpec& space) { return GenotypeRange(space); }

Genotype sample_uniform(Rng& rng, const SpaceSpec& space) {
  std::vector<std::uint8_t> slots(space.slot_count());
  for (auto& v : slots) v = static_cast<std::uint8_t>(uniform_below(rng, space.choice_count()));
  return Genotype(std::move(slots));
}

Genotype mutate_one_slot(const Genotype& g, Rng& rng, const SpaceSpec& space) {
  space.check(g);
  if (space.choice_count() < 2) throw InvalidSpace("mutation needs at least two choices");
  auto slots = g.slots();
  const auto slot = uniform_below(rng, slots.size());
  // Draw among the other choices by skipping over the current one.
  auto v = uniform_below(rng, space.choice_count() - 1);
  if (v >= slots[slot]) ++v;
  slots[slot] = static_cast<std::uint8_t>(v);
  return Genotype(std::move(slots));
}

}  // namespace mfnas
