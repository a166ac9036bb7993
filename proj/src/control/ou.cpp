#include "glucolab/control/ou.hpp"

#include <cmath>

#include "glucolab/util/errors.hpp"

namespace glucolab {

void OuParams::validate() const {
  if (!(theta > 0.0)) throw ConfigError("ou: theta must be > 0");
  if (!(sigma >= 0.0)) throw ConfigError("ou: sigma must be >= 0");
}

double ou_step(const OuParams& params, double x, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw Error("ou_step: dt must be > 0");
  double next = x + params.theta * (params.mu - x) * dt;
  if (params.sigma > 0.0) next += params.sigma * std::sqrt(dt) * standard_normal(rng);
  return next;
}

}  // namespace glucolab
