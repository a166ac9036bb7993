#include "glucolab/env/risk.hpp"

#include <algorithm>
#include <cmath>

#include "glucolab/util/errors.hpp"

namespace glucolab {

namespace {
constexpr double kScale = 3.5506;
constexpr double kExponent = 0.8353;
constexpr double kOffset = 3.7932;
}  // namespace

double magni_risk(double glucose) {
  if (!(glucose > 0.0)) throw Error("magni_risk: glucose must be > 0");
  // ln(g)^0.8353 is undefined below 1 mg/dl; the simulator floors glucose there.
  const double log_g = std::max(std::log(glucose), 0.0);
  const double inner = kScale * (std::pow(log_g, kExponent) - kOffset);
  return 10.0 * inner * inner;
}

double magni_risk_minimum() { return std::exp(std::pow(kOffset, 1.0 / kExponent)); }

}  // namespace glucolab
