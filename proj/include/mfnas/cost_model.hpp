#pragma once

#include <cstdint>
#include <vector>

#include "mfnas/search_space.hpp"

namespace mfnas {

/// Learnable scalar count and forward-pass multiply-accumulate count.
struct ModelCost {
  std::int64_t params = 0;
  std::int64_t macs = 0;

  friend bool operator==(const ModelCost&, const ModelCost&) = default;
};

/// Parameters of a bias-free convolution.
constexpr std::int64_t conv_params(std::int64_t c_in, std::int64_t c_out, std::int64_t kernel) {
  return c_in * c_out * kernel * kernel;
}

/// Multiply-accumulates of a bias-free convolution producing an out_h x out_w map.
constexpr std::int64_t conv_macs(std::int64_t c_in, std::int64_t c_out, std::int64_t kernel,
                                 std::int64_t out_h, std::int64_t out_w) {
  return conv_params(c_in, c_out, kernel) * out_h * out_w;
}

/// Output side of a "same"-padded convolution: floor((side - 1) / stride) + 1.
constexpr std::int64_t conv_output_side(std::int64_t side, std::int64_t stride) {
  return (side - 1) / stride + 1;
}

/// Shape of one searched convolution: the block's first conv.
struct ChoiceSlotShape {
  int c_in = 0;
  int c_out = 0;
  int stride = 1;
  int out_side = 0;
};

/// Input/output channels and output map side of every searched conv, slot order.
std::vector<ChoiceSlotShape> choice_slot_shapes(const SpaceSpec& space);

/// Full network: stem conv + norm, per block {choice conv1 + norm, 3x3 conv2 + norm,
/// 1x1 projection + norm where the shape changes}, global pool and affine classifier.
/// Norms count 2 scalars per channel and no MACs.
ModelCost model_cost(const Genotype& g, const SpaceSpec& space = SpaceSpec::default_space());

std::int64_t count_params(const Genotype& g, const SpaceSpec& space = SpaceSpec::default_space());
std::int64_t count_macs(const Genotype& g, const SpaceSpec& space = SpaceSpec::default_space());

/// Smallest parameter count in the space. Exact: parameters are separable per slot.
std::int64_t p_min(const SpaceSpec& space = SpaceSpec::default_space());

/// The genotype attaining p_min with the lowest arch_id.
Genotype p_min_genotype(const SpaceSpec& space = SpaceSpec::default_space());

}  // namespace mfnas
