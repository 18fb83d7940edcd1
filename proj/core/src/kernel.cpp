#include "psvm/kernel.hpp"

#include <cmath>

#include "psvm/error.hpp"
#include "psvm/format.hpp"

namespace psvm {

void validate(const KernelSpec& spec) {
  if (const auto* rbf = std::get_if<RbfKernel>(&spec)) {
    if (!(rbf->sigma > 0.0) || !std::isfinite(rbf->sigma)) {
      throw InvalidArgument("rbf kernel sigma must be positive");
    }
  }
}

std::string describe(const KernelSpec& spec) {
  if (const auto* rbf = std::get_if<RbfKernel>(&spec)) return "rbf(sigma=" + format_double(rbf->sigma) + ")";
  return "linear";
}

double eval_kernel(const KernelSpec& spec, std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw InvalidArgument("kernel arguments have dimensions " + std::to_string(u.size()) + " and " +
                          std::to_string(v.size()));
  }
  if (std::holds_alternative<LinearKernel>(spec)) return dot(u, v);

  const double sigma = std::get<RbfKernel>(spec).sigma;
  double dist2 = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) dist2 += (u[k] - v[k]) * (u[k] - v[k]);
  return std::exp(-dist2 / (2.0 * sigma * sigma));
}

GramBlocks build_blocks(const TrainingSet& train, const KernelSpec& spec) {
  if (train.empty()) throw InvalidArgument("build_blocks: empty training set");
  validate(spec);

  const auto& hard = train.hard();
  const auto& soft = train.soft();
  const std::size_t n = hard.size();
  const std::size_t s = soft.size();

  GramBlocks b{Matrix(n, n), Matrix(n, s), Matrix(s, s)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = hard[i].y * hard[j].y * eval_kernel(spec, hard[i].x, hard[j].x);
      b.k1(i, j) = v;
      b.k1(j, i) = v;
    }
    for (std::size_t j = 0; j < s; ++j) b.k2(i, j) = hard[i].y * eval_kernel(spec, hard[i].x, soft[j].x);
  }
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i; j < s; ++j) {
      const double v = eval_kernel(spec, soft[i].x, soft[j].x);
      b.k3(i, j) = v;
      b.k3(j, i) = v;
    }
  }
  return b;
}

DualProblem assemble(const GramBlocks& blocks, std::span<const TargetBand> bands, double C,
                     double C_tilde, std::span<const int> y) {
  if (!(C > 0.0) || !(C_tilde > 0.0)) throw InvalidArgument("C and C_tilde must be positive");
  const std::size_t n = blocks.k1.rows();
  const std::size_t s = blocks.k3.rows();
  if (y.size() != n) throw InvalidArgument("assemble: label count does not match K1");
  if (bands.size() != s) throw InvalidArgument("assemble: band count does not match K3");
  if (blocks.k2.rows() != n || blocks.k2.cols() != s) throw InvalidArgument("assemble: K2 has wrong shape");

  const std::size_t dim = n + 2 * s;
  DualProblem p;
  p.n_hard = n;
  p.n_soft = s;
  p.G = Matrix(dim, dim);
  p.e_tilde.assign(dim, 0.0);
  p.f.assign(dim, 0.0);
  p.upper.assign(dim, 0.0);
  p.active.assign(dim, true);

  const std::size_t plus = n;       // mu_plus offset
  const std::size_t minus = n + s;  // mu_minus offset

  //      [  K1   -K2    K2 ]
  //  G = [ -K2'   K3   -K3 ]
  //      [  K2'  -K3    K3 ]
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p.G(i, j) = blocks.k1(i, j);
    for (std::size_t j = 0; j < s; ++j) {
      const double v = blocks.k2(i, j);
      p.G(i, plus + j) = -v;
      p.G(plus + j, i) = -v;
      p.G(i, minus + j) = v;
      p.G(minus + j, i) = v;
    }
  }
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      const double v = blocks.k3(i, j);
      p.G(plus + i, plus + j) = v;
      p.G(plus + i, minus + j) = -v;
      p.G(minus + i, plus + j) = -v;
      p.G(minus + i, minus + j) = v;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != 1 && y[i] != -1) throw InvalidArgument("assemble: labels must be -1 or +1");
    p.e_tilde[i] = 1.0;
    p.f[i] = y[i];
    p.upper[i] = C;
  }
  for (std::size_t j = 0; j < s; ++j) {
    const TargetBand& b = bands[j];
    p.f[plus + j] = -1.0;
    p.f[minus + j] = 1.0;
    if (b.upper_active()) {
      p.e_tilde[plus + j] = -b.z_plus;
      p.upper[plus + j] = C_tilde;
    } else {
      p.active[plus + j] = false;
    }
    if (b.lower_active()) {
      p.e_tilde[minus + j] = b.z_minus;
      p.upper[minus + j] = C_tilde;
    } else {
      p.active[minus + j] = false;
    }
  }
  return p;
}

void DualProblem::validate() const {
  const std::size_t dim = n_hard + 2 * n_soft;
  if (dim == 0) throw InvalidArgument("dual problem has no variables");
  if (G.rows() != dim || G.cols() != dim || e_tilde.size() != dim || f.size() != dim ||
      upper.size() != dim || active.size() != dim) {
    throw InvalidArgument("dual problem has inconsistent sizes");
  }
  for (std::size_t t = 0; t < dim; ++t) {
    if (f[t] != 1.0 && f[t] != -1.0) throw InvalidArgument("equality vector entries must be +-1");
    if (!(upper[t] >= 0.0) || !std::isfinite(upper[t])) throw InvalidArgument("upper bounds must be finite and >= 0");
    if (!std::isfinite(e_tilde[t])) throw InvalidArgument("linear term must be finite");
    if (!active[t] && upper[t] != 0.0) throw InvalidArgument("inactive variable must have upper bound 0");
  }
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < r; ++c) {
      const double a = G(r, c), b = G(c, r);
      if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a) + std::abs(b))) {
        throw InvalidArgument("quadratic term must be symmetric");
      }
    }
  }
}

}  // namespace psvm
