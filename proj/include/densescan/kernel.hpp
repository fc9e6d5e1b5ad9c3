#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>

#include "densescan/euclid.hpp"

namespace densescan {

// A window function: maps `arity` consecutive samples to one output sample.
// eval must be pure and deterministic (identical inputs -> bitwise-identical
// outputs); every equivalence this library guarantees depends on that.
template <class In, class Out = In>
struct Kernel {
  Index arity = 1;
  std::function<Out(std::span<const In>)> eval;
  std::string name;  // diagnostics only

  Kernel() = default;
  Kernel(Index c, std::function<Out(std::span<const In>)> fn,
         std::string label = "")
      : arity(c), eval(std::move(fn)), name(std::move(label)) {}
};

template <class S>
Kernel<S, S> identity_kernel() {
  return Kernel<S, S>(1, [](std::span<const S> w) { return w[0]; },
                      "identity");
}

}  // namespace densescan
