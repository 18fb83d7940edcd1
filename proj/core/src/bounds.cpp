#include "psvm/bounds.hpp"

#include <cmath>
#include <string>

#include "psvm/error.hpp"

namespace psvm {

namespace {

// ln(q / (1 - q)) for q in (0, 1)
double logit(double q) { return std::log(q) - std::log1p(-q); }

}  // namespace

SigmoidLink link_param(const PrecisionConfig& cfg) {
  const double eta = cfg.eta();
  if (!(eta > 0.0 && eta < 0.5)) {
    throw DegenerateLink("eta = " + std::to_string(eta) + " must lie in (0, 0.5)");
  }
  return SigmoidLink{logit(1.0 - eta)};
}

TargetBand band(double p, const PrecisionConfig& cfg) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("band: p must lie in [0, 1]");
  const SigmoidLink link = link_param(cfg);
  const double eta = cfg.eta();

  TargetBand b;
  // -(1/a) ln(1/q - 1) == logit(q) / a
  if (p - eta > 0.0) b.z_minus = logit(p - eta) / link.a;
  if (p + eta < 1.0) b.z_plus = logit(p + eta) / link.a;
  return b;
}

double prob_from_score(double s, SigmoidLink link) {
  const double t = link.a * s;
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace psvm
