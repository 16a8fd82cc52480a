#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "mfnas/search_space.hpp"

// Independent per-slot categorical policy over genotypes. Logits are a
// slots x choices matrix; each row is the logit vector of one slot.

namespace mfnas {

template <typename Scalar>
using LogitMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Row-wise softmax with the row max subtracted first.
template <typename Derived>
LogitMatrix<typename Derived::Scalar> row_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const auto max = logits.rowwise().maxCoeff();
  LogitMatrix<Scalar> e = (logits.colwise() - max).array().exp().matrix();
  const auto sums = e.rowwise().sum().eval();
  for (Eigen::Index r = 0; r < e.rows(); ++r) e.row(r) /= sums(r);
  return e;
}

/// log pi(g) = sum over slots of log softmax(logits_i)[g_i].
template <typename Derived>
typename Derived::Scalar log_prob(const Eigen::MatrixBase<Derived>& logits, const Genotype& g) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log;
  Scalar total(0);
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const Scalar max = logits.row(r).maxCoeff();
    const Scalar lse = max + log((logits.row(r).array() - max).exp().sum());
    total += logits(r, g[static_cast<std::size_t>(r)]) - lse;
  }
  return total;
}

/// Gradient of log pi(g) with respect to the logits: one_hot(g) - pi.
template <typename Derived>
LogitMatrix<typename Derived::Scalar> score_function(const Eigen::MatrixBase<Derived>& logits, const Genotype& g) {
  LogitMatrix<typename Derived::Scalar> grad = -row_softmax(logits);
  for (Eigen::Index r = 0; r < grad.rows(); ++r) grad(r, g[static_cast<std::size_t>(r)]) += 1;
  return grad;
}

/// REINFORCE step: lr * advantage * grad log pi(g).
template <typename Derived>
LogitMatrix<typename Derived::Scalar> reinforce_update(const Eigen::MatrixBase<Derived>& logits, const Genotype& g,
                                                       typename Derived::Scalar advantage,
                                                       typename Derived::Scalar learning_rate) {
  return (learning_rate * advantage) * score_function(logits, g);
}

}  // namespace mfnas
