#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "nhsta/error.hpp"

namespace nhsta {

/// Uniform grid t_k = t0 + (t_final - t0) k / steps, k = 0..steps.
/// `steps` counts intervals, so the grid holds steps + 1 samples.
class TimeGrid {
 public:
  TimeGrid(double t0, double t_final, std::size_t steps) : t0_(t0), t_final_(t_final), steps_(steps) {
    if (!std::isfinite(t0) || !std::isfinite(t_final) || !(t0 < t_final)) {
      throw Error(ErrorKind::InvalidArgument, "TimeGrid requires finite t0 < t_final");
    }
    if (steps < 2) throw Error(ErrorKind::InvalidArgument, "TimeGrid requires steps >= 2");
  }

  double t0() const { return t0_; }
  double t_final() const { return t_final_; }
  std::size_t steps() const { return steps_; }
  std::size_t size() const { return steps_ + 1; }
  double step() const { return (t_final_ - t0_) / static_cast<double>(steps_); }

  double at(std::size_t k) const {
    if (k > steps_) throw Error(ErrorKind::IndexOutOfRange, "grid index " + std::to_string(k));
    if (k == steps_) return t_final_;
    // Written so the points of refined() at even indices reproduce these bitwise.
    return t0_ + (t_final_ - t0_) * static_cast<double>(k) / static_cast<double>(steps_);
  }

  std::vector<double> samples() const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = at(k);
    return out;
  }

  /// Same window, half the step.
  TimeGrid refined() const { return TimeGrid(t0_, t_final_, 2 * steps_); }

  bool operator==(const TimeGrid&) const = default;

 private:
  double t0_;
  double t_final_;
  std::size_t steps_;
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
  if (!(a == b)) throw Error(ErrorKind::GridMismatch, what);
}

}  // namespace nhsta
