#pragma once

#include <vector>

#include "covsw/model.hpp"

namespace covsw {

/// Cell averages Q_k^n at one time level.
struct FieldSnapshot {
  std::vector<Vec7> states;
  double time = 0.0;

  std::size_t size() const { return states.size(); }
  State state(std::size_t k) const { return State(states[k]); }
};

}  // namespace covsw
