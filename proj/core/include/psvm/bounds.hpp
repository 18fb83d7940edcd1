#pragma once

#include <limits>

namespace psvm {

/// Labelling precision and confidence; their sum eta is the tolerated
/// probability error around each soft label.
struct PrecisionConfig {
  double epsilon = 0.0;
  double delta = 0.1;

  double eta() const { return epsilon + delta; }

  static PrecisionConfig from_eta(double eta) { return {0.0, eta}; }
};

/// Sigmoid steepness a: P(y=1|s) = 1 / (1 + exp(-a s)).
struct SigmoidLink {
  double a = 0.0;
};

/// Score interval [z_minus, z_plus] whose sigmoid image is [p - eta, p + eta].
/// An infinite end means the probability bound was clamped at 0 or 1 and the
/// corresponding constraint is dropped.
struct TargetBand {
  double z_minus = -std::numeric_limits<double>::infinity();
  double z_plus = std::numeric_limits<double>::infinity();

  bool lower_active() const { return z_minus > -std::numeric_limits<double>::infinity(); }
  bool upper_active() const { return z_plus < std::numeric_limits<double>::infinity(); }
};

/// a = ln(1/eta - 1). Throws DegenerateLink unless 0 < eta < 0.5.
SigmoidLink link_param(const PrecisionConfig& cfg);

TargetBand band(double p, const PrecisionConfig& cfg);

double prob_from_score(double s, SigmoidLink link);

}  // namespace psvm
