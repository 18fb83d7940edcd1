#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "psvm/bounds.hpp"
#include "psvm/dataset.hpp"
#include "psvm/matrix.hpp"

namespace psvm {

struct LinearKernel {
  bool operator==(const LinearKernel&) const = default;
};

/// k(u, v) = exp(-|u - v|^2 / (2 sigma^2))
struct RbfKernel {
  double sigma = 1.0;
  bool operator==(const RbfKernel&) const = default;
};

using KernelSpec = std::variant<LinearKernel, RbfKernel>;

void validate(const KernelSpec& spec);
std::string describe(const KernelSpec& spec);

double eval_kernel(const KernelSpec& spec, std::span<const double> u, std::span<const double> v);

/// Signed Gram blocks over the hard (n) and soft (m - n) parts of a training set.
///   k1(i, j) = y_i y_j k(x_i, x_j)   hard x hard
///   k2(i, j) = y_i k(x_i, x_j)       hard x soft
///   k3(i, j) = k(x_i, x_j)           soft x soft
struct GramBlocks {
  Matrix k1;
  Matrix k2;
  Matrix k3;
};

GramBlocks build_blocks(const TrainingSet& train, const KernelSpec& spec);

/// min 1/2 g'Gg - e'g  s.t.  f'g = 0,  0 <= g <= upper
///
/// Variables are laid out [alpha (n); mu_plus (m-n); mu_minus (m-n)].
/// A variable whose band end is infinite has upper bound 0 and active = false.
struct DualProblem {
  Matrix G;
  std::vector<double> e_tilde;
  std::vector<double> f;
  std::vector<double> upper;
  std::vector<bool> active;
  std::size_t n_hard = 0;
  std::size_t n_soft = 0;

  std::size_t size() const { return e_tilde.size(); }

  /// Training point index (0..m-1) that variable t belongs to.
  std::size_t point_of(std::size_t t) const {
    if (t < n_hard) return t;
    if (t < n_hard + n_soft) return t;
    return t - n_soft;
  }

  /// Throws InvalidArgument when sizes, signs or bounds are inconsistent.
  void validate() const;
};

DualProblem assemble(const GramBlocks& blocks, std::span<const TargetBand> bands, double C,
                     double C_tilde, std::span<const int> y);

}  // namespace psvm
