#pragma once

#include "phasefield/spaces.hpp"

namespace phasefield {

/// Solution at one time level. Only phi (and v for CHNS) carry information
/// between steps; mu, p and the Darcy velocity are per-step quantities kept
/// for reporting. Flow fields are empty (null space) for CH.
struct SchemeState {
  int step = 0;
  double time = 0.0;
  FieldVector phi;
  FieldVector mu;
  FieldVector velocity;
  FieldVector pressure;

  bool has_velocity() const { return velocity.space != nullptr; }
};

}  // namespace phasefield
