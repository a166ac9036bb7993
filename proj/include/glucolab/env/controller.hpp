#pragma once

#include "glucolab/env/glucose_env.hpp"

namespace glucolab {

/// Anything that picks a basal action for a GlucoseEnv.
class Controller {
 public:
  virtual ~Controller() = default;
  /// Called at the start of every episode.
  virtual void reset() = 0;
  /// Normalized basal action in [-1, 1] for the env's current decision point.
  virtual double act(const GlucoseEnv& env) = 0;
};

}  // namespace glucolab
