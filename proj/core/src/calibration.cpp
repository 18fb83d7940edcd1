#include "psvm/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psvm/error.hpp"

namespace psvm {

namespace {

using Targets = PlattTargets;

Targets smoothed_targets(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("platt: scores/labels size mismatch");
  double n_pos = 0.0;
  double n_neg = 0.0;
  for (int y : labels) {
    if (y == 1) {
      n_pos += 1.0;
    } else if (y == -1) {
      n_neg += 1.0;
    } else {
      throw InvalidArgument("platt: labels must be -1 or +1");
    }
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw InvalidArgument("platt: both classes must be present");
  return platt_targets(static_cast<std::size_t>(n_pos), static_cast<std::size_t>(n_neg));
}

// t log(1 + e^{-z}) + (1 - t) log(1 + e^{z}) with z = -(A s + B), evaluated
// without overflow
double point_loss(double fApB, double t) {
  if (fApB >= 0.0) return t * fApB + std::log1p(std::exp(-fApB));
  return (t - 1.0) * fApB + std::log1p(std::exp(fApB));
}

double nll(double A, double B, std::span<const double> scores, std::span<const int> labels,
           const Targets& tg) {
  double f = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    f += point_loss(scores[i] * A + B, labels[i] > 0 ? tg.pos : tg.neg);
  }
  return f;
}

}  // namespace

PlattTargets platt_targets(std::size_t n_pos, std::size_t n_neg) {
  const double p = static_cast<double>(n_pos);
  const double n = static_cast<double>(n_neg);
  return {(p + 1.0) / (p + 2.0), 1.0 / (n + 2.0)};
}

double apply_platt(const PlattParams& params, double score) {
  const double fApB = score * params.A + params.B;
  double p;
  if (fApB >= 0.0) {
    const double e = std::exp(-fApB);
    p = e / (1.0 + e);
  } else {
    p = 1.0 / (1.0 + std::exp(fApB));
  }
  // keep saturated scores off the endpoints
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double platt_nll(const PlattParams& params, std::span<const double> scores,
                 std::span<const int> labels) {
  return nll(params.A, params.B, scores, labels, smoothed_targets(scores, labels));
}

PlattParams fit_platt(std::span<const double> scores, std::span<const int> labels,
                      int max_newton_steps) {
  const Targets tg = smoothed_targets(scores, labels);
  double n_pos = 0.0;
  for (int y : labels) n_pos += y > 0 ? 1.0 : 0.0;
  const double n_neg = static_cast<double>(labels.size()) - n_pos;

  constexpr double kMinStep = 1e-10;
  constexpr double kRidge = 1e-12;
  constexpr double kGradTol = 1e-8;

  double A = 0.0;
  double B = std::log((n_neg + 1.0) / (n_pos + 1.0));
  double fval = nll(A, B, scores, labels, tg);

  for (int it = 0; it < max_newton_steps; ++it) {
    double h11 = kRidge, h22 = kRidge, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double s = scores[i];
      const double t = labels[i] > 0 ? tg.pos : tg.neg;
      const double fApB = s * A + B;
      double p = 0.0;
      double q = 0.0;
      if (fApB >= 0.0) {
        const double e = std::exp(-fApB);
        p = e / (1.0 + e);
        q = 1.0 / (1.0 + e);
      } else {
        const double e = std::exp(fApB);
        p = 1.0 / (1.0 + e);
        q = e / (1.0 + e);
      }
      const double d2 = p * q;
      h11 += s * s * d2;
      h22 += d2;
      h21 += s * d2;
      const double d1 = t - p;
      g1 += s * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kGradTol && std::abs(g2) < kGradTol) break;

    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;

    double step = 1.0;
    bool accepted = false;
    while (step >= kMinStep) {
      const double newA = A + step * dA;
      const double newB = B + step * dB;
      const double newf = nll(newA, newB, scores, labels, tg);
      if (newf < fval + 1e-4 * step * gd) {
        A = newA;
        B = newB;
        fval = newf;
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) break;  // line search failed; keep the current point
  }
  return {A, B};
}

}  // namespace psvm
