#include "psvm/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psvm/error.hpp"

namespace psvm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTau = 1e-12;

// Γ_t can increase along +f_t: it belongs to the "up" set.
bool in_up(const DualProblem& p, std::span<const double> gamma, std::size_t t) {
  return p.f[t] > 0 ? gamma[t] < p.upper[t] : gamma[t] > 0.0;
}

bool in_low(const DualProblem& p, std::span<const double> gamma, std::size_t t) {
  return p.f[t] > 0 ? gamma[t] > 0.0 : gamma[t] < p.upper[t];
}

struct Pair {
  std::size_t up = 0;
  std::size_t low = 0;
  double gap = 0.0;
};

// max over up of -f g, min over low of -f g
Pair select_pair(const DualProblem& p, std::span<const double> gamma, std::span<const double> grad) {
  double best_up = -kInf;
  double best_low = kInf;
  Pair pair;
  for (std::size_t t = 0; t < gamma.size(); ++t) {
    if (!p.active[t]) continue;
    const double v = -p.f[t] * grad[t];
    if (in_up(p, gamma, t) && v > best_up) {
      best_up = v;
      pair.up = t;
    }
    if (in_low(p, gamma, t) && v < best_low) {
      best_low = v;
      pair.low = t;
    }
  }
  pair.gap = (best_up == -kInf || best_low == kInf) ? 0.0 : std::max(0.0, best_up - best_low);
  return pair;
}

std::vector<double> gradient(const DualProblem& p, std::span<const double> gamma) {
  auto g = multiply(p.G, gamma);
  for (std::size_t t = 0; t < g.size(); ++t) g[t] -= p.e_tilde[t];
  return g;
}

double objective_from_gradient(const DualProblem& p, std::span<const double> gamma,
                               std::span<const double> grad) {
  double v = 0.0;
  for (std::size_t t = 0; t < gamma.size(); ++t) v += gamma[t] * (grad[t] - p.e_tilde[t]);
  return 0.5 * v;
}

double equality_drift(const DualProblem& p, std::span<const double> gamma) {
  return std::abs(dot(p.f, gamma));
}

}  // namespace

double dual_objective(const DualProblem& problem, std::span<const double> gamma) {
  const auto g = gradient(problem, gamma);
  return objective_from_gradient(problem, gamma, g);
}

double kkt_residual(const DualProblem& problem, std::span<const double> gamma) {
  const auto g = gradient(problem, gamma);
  return select_pair(problem, gamma, g).gap;
}

std::vector<double> project_feasible(std::span<const double> f, std::span<const double> upper,
                                     std::span<const double> point) {
  const std::size_t n = point.size();
  if (f.size() != n || upper.size() != n) throw InvalidArgument("project_feasible: size mismatch");

  auto at = [&](double nu, std::vector<double>* out) {
    double h = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double x = std::clamp(point[t] - nu * f[t], 0.0, upper[t]);
      if (out) (*out)[t] = x;
      h += f[t] * x;
    }
    return h;
  };

  // h(nu) = f'x(nu) is piecewise linear and nonincreasing; its kinks sit
  // where a coordinate enters or leaves its box.
  std::vector<double> kinks;
  kinks.reserve(2 * n);
  for (std::size_t t = 0; t < n; ++t) {
    if (upper[t] <= 0.0) continue;
    kinks.push_back(f[t] * point[t]);
    kinks.push_back(f[t] * (point[t] - upper[t]));
  }
  std::vector<double> x(n, 0.0);
  if (kinks.empty()) return x;
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

  double lo = kinks.front();
  double h_lo = at(lo, nullptr);
  if (h_lo <= 0.0) {
    at(lo, &x);
    return x;
  }
  for (std::size_t k = 1; k < kinks.size(); ++k) {
    const double hi = kinks[k];
    const double h_hi = at(hi, nullptr);
    if (h_hi <= 0.0) {
      const double nu = h_hi == h_lo ? hi : lo + (hi - lo) * h_lo / (h_lo - h_hi);
      at(nu, &x);
      return x;
    }
    lo = hi;
    h_lo = h_hi;
  }
  at(kinks.back(), &x);
  return x;
}

QPSolution solve_smo(const DualProblem& problem, const SolverConfig& cfg,
                     const IterateObserver& observer) {
  problem.validate();
  if (!(cfg.kkt_tolerance > 0.0)) throw InvalidArgument("kkt_tolerance must be positive");

  const std::size_t dim = problem.size();
  std::vector<double> gamma(dim, 0.0);
  std::vector<double> grad(dim);
  for (std::size_t t = 0; t < dim; ++t) grad[t] = -problem.e_tilde[t];

  QPSolution sol;
  constexpr std::int64_t kDriftCheckEvery = 100'000;
  constexpr int kMaxRefresh = 5;
  int refreshes = 0;

  for (;;) {
    const Pair pair = select_pair(problem, gamma, grad);
    if (pair.gap <= cfg.kkt_tolerance || sol.iterations >= cfg.max_iterations) {
      // incremental gradients accumulate rounding; confirm on a fresh one
      grad = gradient(problem, gamma);
      const double fresh = select_pair(problem, gamma, grad).gap;
      if (fresh <= cfg.kkt_tolerance || sol.iterations >= cfg.max_iterations ||
          ++refreshes > kMaxRefresh) {
        sol.kkt_residual = fresh;
        sol.converged = fresh <= cfg.kkt_tolerance;
        break;
      }
      continue;
    }

    const std::size_t i = pair.up;
    const std::size_t j = pair.low;
    const double fi = problem.f[i];
    const double fj = problem.f[j];

    // Γ_i += f_i t, Γ_j -= f_j t keeps f'Γ fixed
    const double room_i = fi > 0 ? problem.upper[i] - gamma[i] : gamma[i];
    const double room_j = fj > 0 ? gamma[j] : problem.upper[j] - gamma[j];
    const double t_max = std::min(room_i, room_j);
    const double quad = problem.G(i, i) + problem.G(j, j) - 2.0 * fi * fj * problem.G(i, j);
    const double step = quad > kTau ? std::min(pair.gap / quad, t_max) : t_max;

    const double old_i = gamma[i];
    const double old_j = gamma[j];
    if (step == room_i) {
      gamma[i] = fi > 0 ? problem.upper[i] : 0.0;
    } else {
      gamma[i] = std::clamp(old_i + fi * step, 0.0, problem.upper[i]);
    }
    if (step == room_j) {
      gamma[j] = fj > 0 ? 0.0 : problem.upper[j];
    } else {
      gamma[j] = std::clamp(old_j - fj * step, 0.0, problem.upper[j]);
    }

    const double di = gamma[i] - old_i;
    const double dj = gamma[j] - old_j;
    const auto row_i = problem.G.row(i);
    const auto row_j = problem.G.row(j);
    for (std::size_t t = 0; t < dim; ++t) grad[t] += row_i[t] * di + row_j[t] * dj;

    ++sol.iterations;
    if (sol.iterations % kDriftCheckEvery == 0 && equality_drift(problem, gamma) > 1e-10) {
      gamma = project_feasible(problem.f, problem.upper, gamma);
      grad = gradient(problem, gamma);
    }
    if (observer) observer(gamma);
  }

  sol.objective = objective_from_gradient(problem, gamma, grad);
  sol.gamma = std::move(gamma);
  return sol;
}

QPSolution solve_reference(const DualProblem& problem, const SolverConfig& cfg) {
  problem.validate();
  const std::size_t dim = problem.size();

  // Gershgorin bound on the largest eigenvalue of G
  double lipschitz = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    double s = 0.0;
    for (double v : problem.G.row(r)) s += std::abs(v);
    lipschitz = std::max(lipschitz, s);
  }
  lipschitz = std::max(lipschitz, 1e-12);

  auto pg_step = [&](std::span<const double> from) {
    auto g = gradient(problem, from);
    std::vector<double> trial(dim);
    for (std::size_t t = 0; t < dim; ++t) trial[t] = from[t] - g[t] / lipschitz;
    return project_feasible(problem.f, problem.upper, trial);
  };

  std::vector<double> x(dim, 0.0);
  std::vector<double> y = x;
  double x_obj = dual_objective(problem, x);
  double momentum = 1.0;
  double scale = 1.0;
  for (double u : problem.upper) scale = std::max(scale, u);

  QPSolution sol;
  while (sol.iterations < cfg.reference_step_budget) {
    ++sol.iterations;
    auto x_next = pg_step(y);
    const double next_obj = dual_objective(problem, x_next);
    if (next_obj > x_obj) {
      // objective went up: drop momentum and restart from x
      momentum = 1.0;
      y = x;
      continue;
    }
    double moved = 0.0;
    for (std::size_t t = 0; t < dim; ++t) moved = std::max(moved, std::abs(x_next[t] - x[t]));

    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double beta = (momentum - 1.0) / next_momentum;
    for (std::size_t t = 0; t < dim; ++t) y[t] = x_next[t] + beta * (x_next[t] - x[t]);
    momentum = next_momentum;
    x = std::move(x_next);
    x_obj = next_obj;

    if (moved <= 1e-14 * scale) {
      // fixed point of the plain projected-gradient map
      const auto probe = pg_step(x);
      double mapping = 0.0;
      for (std::size_t t = 0; t < dim; ++t) mapping = std::max(mapping, std::abs(probe[t] - x[t]));
      if (mapping <= 1e-12 * scale) {
        sol.converged = true;
        break;
      }
    }
  }

  sol.objective = x_obj;
  sol.kkt_residual = kkt_residual(problem, x);
  sol.gamma = std::move(x);
  return sol;
}

}  // namespace psvm
