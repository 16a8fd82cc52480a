#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mfnas/random.hpp"

namespace mfnas {

/// One option for a block's first convolution. Padding keeps the spatial size.
struct KernelChoice {
  int index = 0;
  int kernel = 3;

  int padding() const { return (kernel - 1) / 2; }

  friend bool operator==(const KernelChoice&, const KernelChoice&) = default;
};

using ArchId = std::uint64_t;

/// Per-block kernel choice indices, stage-major then block-minor.
class Genotype {
 public:
  Genotype() = default;
  explicit Genotype(std::vector<std::uint8_t> slots) : slots_(std::move(slots)) {}
  Genotype(std::initializer_list<int> slots);

  std::size_t size() const { return slots_.size(); }
  int operator[](std::size_t i) const { return slots_[i]; }
  const std::vector<std::uint8_t>& slots() const { return slots_; }

  /// Digit string form, e.g. "012012012".
  std::string str() const;

  friend bool operator==(const Genotype&, const Genotype&) = default;
  friend auto operator<=>(const Genotype&, const Genotype&) = default;

 private:
  std::vector<std::uint8_t> slots_;
};

int hamming_distance(const Genotype& a, const Genotype& b);

/// Structural description of a ResNet family whose blocks each pick a kernel.
struct SpaceSpec {
  int stem_in_channels = 3;
  int stem_out_channels = 16;
  std::vector<int> stage_widths{16, 32, 64};
  std::vector<int> blocks_per_stage{3, 3, 3};
  std::vector<int> stage_strides{1, 2, 2};
  int num_classes = 10;
  std::vector<KernelChoice> choices{{0, 3}, {1, 5}, {2, 7}};
  int input_resolution = 32;

  /// The 3-stage, 9-block CIFAR ResNet space with 3x3/5x5/7x7 choices.
  static SpaceSpec default_space() { return {}; }

  std::size_t slot_count() const;
  std::size_t choice_count() const { return choices.size(); }
  /// choice_count ^ slot_count.
  ArchId size() const;

  /// Throws InvalidSpace on inconsistent fields.
  void validate() const;
  /// Throws InvalidGenotype when g does not fit this space.
  void check(const Genotype& g) const;

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

ArchId encode(const Genotype& g, const SpaceSpec& space = SpaceSpec::default_space());
Genotype decode(ArchId id, const SpaceSpec& space = SpaceSpec::default_space());

/// Parses the digit string form; throws InvalidGenotype on bad characters or length.
Genotype parse_genotype(std::string_view text, const SpaceSpec& space = SpaceSpec::default_space());

/// Lazy, arch_id-ordered range over every genotype of a space.
class GenotypeRange {
 public:
  class iterator {
   public:
    using value_type = Genotype;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const SpaceSpec* space, ArchId id) : space_(space), id_(id) {}

    Genotype operator*() const { return decode(id_, *space_); }
    iterator& operator++() {
      ++id_;
      return *this;
    }
    iterator operator++(int) {
      auto tmp = *this;
      ++id_;
      return tmp;
    }
    ArchId id() const { return id_; }
    friend bool operator==(const iterator& a, const iterator& b) { return a.id_ == b.id_; }

   private:
    const SpaceSpec* space_ = nullptr;
    ArchId id_ = 0;
  };

  explicit GenotypeRange(SpaceSpec space);

  iterator begin() const { return {&space_, 0}; }
  iterator end() const { return {&space_, space_.size()}; }
  ArchId size() const { return space_.size(); }

 private:
  SpaceSpec space_;
};

GenotypeRange enumerate(const SpaceSpec& space = SpaceSpec::default_space());

/// Every slot independently uniform over the choices.
Genotype sample_uniform(Rng& rng, const SpaceSpec& space = SpaceSpec::default_space());

/// Reassigns exactly one uniformly chosen slot to a different choice.
Genotype mutate_one_slot(const Genotype& g, Rng& rng,
                         const SpaceSpec& space = SpaceSpec::default_space());

}  // namespace mfnas
