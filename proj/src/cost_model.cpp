#include "mfnas/cost_model.hpp"

#include <algorithm>

#include "mfnas/errors.hpp"

namespace mfnas {
namespace {

constexpr std::int64_t norm_params(std::int64_t channels) { return 2 * channels; }

/// Walks the fixed skeleton, calling visit(c_in, c_out, kernel, out_side) for every conv.
/// kernel < 0 marks the searched conv of slot -kernel-1.
template <typename Visit>
std::int64_t walk_skeleton(const SpaceSpec& space, Visit&& visit) {
  std::int64_t norms = 0;
  std::int64_t side = space.input_resolution;
  visit(space.stem_in_channels, space.stem_out_channels, 3, side);
  norms += norm_params(space.stem_out_channels);

  int c_in = space.stem_out_channels;
  int slot = 0;
  for (std::size_t s = 0; s < space.stage_widths.size(); ++s) {
    const int width = space.stage_widths[s];
    for (int b = 0; b < space.blocks_per_stage[s]; ++b) {
      const int stride = b == 0 ? space.stage_strides[s] : 1;
      const std::int64_t out_side = conv_output_side(side, stride);
      visit(c_in, width, -(slot + 1), out_side);
      visit(width, width, 3, out_side);
      norms += 2 * norm_params(width);
      if (stride != 1 || c_in != width) {
        visit(c_in, width, 1, out_side);
        norms += norm_params(width);
      }
      side = out_side;
      c_in = width;
      ++slot;
    }
  }
  return norms;
}

std::int64_t classifier_params(const SpaceSpec& space) {
  return static_cast<std::int64_t>(space.stage_widths.back()) * space.num_classes + space.num_classes;
}

std::int64_t classifier_macs(const SpaceSpec& space) {
  return static_cast<std::int64_t>(space.stage_widths.back()) * space.num_classes;
}

}  // namespace

std::vector<ChoiceSlotShape> choice_slot_shapes(const SpaceSpec& space) {
  space.validate();
  std::vector<ChoiceSlotShape> shapes;
  int c_in = space.stem_out_channels;
  std::int64_t side = space.input_resolution;
  for (std::size_t s = 0; s < space.stage_widths.size(); ++s) {
    for (int b = 0; b < space.blocks_per_stage[s]; ++b) {
      const int stride = b == 0 ? space.stage_strides[s] : 1;
      side = conv_output_side(side, stride);
      shapes.push_back({c_in, space.stage_widths[s], stride, static_cast<int>(side)});
      c_in = space.stage_widths[s];
    }
  }
  return shapes;
}

ModelCost model_cost(const Genotype& g, const SpaceSpec& space) {
  space.validate();
  space.check(g);
  ModelCost cost;
  const std::int64_t norms = walk_skeleton(space, [&](std::int64_t c_in, std::int64_t c_out, int kernel,
                                                       std::int64_t out_side) {
    const std::int64_t k = kernel < 0 ? space.choices[g[static_cast<std::size_t>(-kernel - 1)]].kernel : kernel;
    cost.params += conv_params(c_in, c_out, k);
    cost.macs += conv_macs(c_in, c_out, k, out_side, out_side);
  });
  cost.params += norms + classifier_params(space);
  cost.macs += classifier_macs(space);
  return cost;
}

std::int64_t count_params(const Genotype& g, const SpaceSpec& space) { return model_cost(g, space).params; }

std::int64_t count_macs(const Genotype& g, const SpaceSpec& space) { return model_cost(g, space).macs; }

Genotype p_min_genotype(const SpaceSpec& space) {
  space.validate();
  // Every slot's conv cost is c_in*c_out*k^2, so the smallest kernel wins in every slot.
  const auto smallest = std::min_element(space.choices.begin(), space.choices.end(),
                                         [](const KernelChoice& a, const KernelChoice& b) {
                                           return a.kernel < b.kernel;
                                         });
  return Genotype(std::vector<std::uint8_t>(space.slot_count(), static_cast<std::uint8_t>(smallest->index)));
}

std::int64_t p_min(const SpaceSpec& space) { return count_params(p_min_genotype(space), space); }

}  // namespace mfnas
