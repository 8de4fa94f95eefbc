#pragma once

#include <cstddef>
#include <type_traits>

#include "nhsta/error.hpp"

namespace nhsta {

/// Central first derivative of grid samples at interior index k, step = grid
/// step. Uses the five-point stencil when two neighbours exist on each side
/// and the three-point stencil next to the ends. `sample(j)` must return a
/// value supporting +, - and scalar *.
template <class Sample>
auto central_derivative(Sample&& sample, std::size_t k, std::size_t size, double h)
    -> std::decay_t<decltype(sample(std::size_t{}))> {
  if (k == 0 || k + 1 >= size) {
    throw Error(ErrorKind::IndexOutOfRange, "central difference needs neighbours on both sides");
  }
  if (k >= 2 && k + 2 < size) {
    return ((sample(k - 2) - sample(k + 2)) + 8.0 * (sample(k + 1) - sample(k - 1))) * (1.0 / (12.0 * h));
  }
  return (sample(k + 1) - sample(k - 1)) * (1.0 / (2.0 * h));
}

/// Derivative at any index; second-order one-sided differences at the ends.
template <class Sample>
auto grid_derivative(Sample&& sample, std::size_t k, std::size_t size, double h)
    -> std::decay_t<decltype(sample(std::size_t{}))> {
  if (size < 3) throw Error(ErrorKind::InvalidArgument, "grid derivative needs at least 3 samples");
  if (k == 0) return (-3.0 * sample(0) + 4.0 * sample(1) - sample(2)) * (1.0 / (2.0 * h));
  if (k + 1 == size) {
    return (3.0 * sample(k) - 4.0 * sample(k - 1) + sample(k - 2)) * (1.0 / (2.0 * h));
  }
  return central_derivative(sample, k, size, h);
}

}  // namespace nhsta
