#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>

namespace banzhaf {

using Clock = std::chrono::steady_clock;

/// Limits for anytime computations. Empty fields mean unlimited.
struct Budget {
  std::optional<std::size_t> max_expansions;
  std::optional<Clock::time_point> deadline;

  static Budget unlimited() { return {}; }

  static Budget timeout(std::chrono::milliseconds ms) {
    Budget b;
    b.deadline = Clock::now() + ms;
    return b;
  }

  bool exhausted(std::size_t expansions) const {
    if (max_expansions && expansions >= *max_expansions) return true;
    if (deadline && Clock::now() >= *deadline) return true;
    return false;
  }
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace banzhaf
