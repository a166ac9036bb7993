#pragma once

#include <cstdint>
#include <optional>

#include "glucolab/control/ou.hpp"
#include "glucolab/control/pid.hpp"
#include "glucolab/env/controller.hpp"

namespace glucolab {

/// PID basal controller acting on the latest CGM reading, optionally with
/// OU noise added to its output before pump clamping.
class PidController final : public Controller {
 public:
  explicit PidController(PidParams params, std::optional<OuParams> noise = std::nullopt,
                         std::uint64_t seed = 0);

  void reset() override;
  double act(const GlucoseEnv& env) override;

  const PidParams& params() const { return params_; }

 private:
  PidParams params_;
  std::optional<OuParams> noise_;
  Rng rng_;
  PidState state_;
  double noise_value_ = 0.0;
};

}  // namespace glucolab
