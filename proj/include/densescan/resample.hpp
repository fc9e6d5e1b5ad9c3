#pragma once

#include <functional>
#include <string>
#include <vector>

#include "densescan/error.hpp"
#include "densescan/euclid.hpp"
#include "densescan/signal.hpp"

namespace densescan {

// Total extension of sample access beyond [1, dim]: lookup(xi, nu) must equal
// xi_nu for in-range nu and may return anything well-defined outside.
template <class S>
struct BoundaryRule {
  std::function<S(const Signal<S>&, Index)> lookup;
  std::string name;
};

// Out-of-range positions read as zero.
template <class S>
BoundaryRule<S> dirichlet_rule() {
  return {[](const Signal<S>& xi, Index nu) -> S {
            if (nu >= 1 && nu <= xi.dim()) return xi[nu];
            return SampleAlgebra<S>::zero_like(xi[1]);
          },
          "dirichlet"};
}

// Out-of-range positions replicate the nearest edge sample.
template <class S>
BoundaryRule<S> neumann_rule() {
  return {[](const Signal<S>& xi, Index nu) -> S {
            if (nu < 1) return xi[1];
            if (nu > xi.dim()) return xi[xi.dim()];
            return xi[nu];
          },
          "neumann"};
}

// Append r copies of the dummy sample zeta.
template <class S>
Signal<S> stuff(Index r, const S& zeta, const Signal<S>& xi) {
  if (r < 0) throw LengthError("stuff: r must be >= 0");
  std::vector<S> out = xi.samples();
  for (Index n = 0; n < r; ++n) out.push_back(zeta);
  return Signal<S>(std::move(out));
}

// Remove the final r samples.
template <class S>
Signal<S> trim(Index r, const Signal<S>& xi) {
  if (r < 0) throw LengthError("trim: r must be >= 0");
  if (xi.dim() < r + 1)
    throw LengthError("trim: cannot remove " + std::to_string(r) +
                      " samples from a signal of length " +
                      std::to_string(xi.dim()));
  std::vector<S> out(xi.samples().begin(), xi.samples().end() - r);
  return Signal<S>(std::move(out));
}

// Extend by R samples on both ends; result_nu = theta(xi, nu - R).
template <class S>
Signal<S> pad(Index R, const BoundaryRule<S>& theta, const Signal<S>& xi) {
  if (R < 0) throw LengthError("pad: R must be >= 0");
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(xi.dim() + 2 * R));
  for (Index nu = 1; nu <= xi.dim() + 2 * R; ++nu)
    out.push_back(theta.lookup(xi, nu - R));
  return Signal<S>(std::move(out));
}

// Remove P samples from both ends.
template <class S>
Signal<S> crop(Index P, const Signal<S>& xi) {
  if (P < 0) throw LengthError("crop: P must be >= 0");
  if (xi.dim() < 2 * P + 1)
    throw LengthError("crop: cannot remove 2x" + std::to_string(P) +
                      " samples from a signal of length " +
                      std::to_string(xi.dim()));
  std::vector<S> out(xi.samples().begin() + P, xi.samples().end() - P);
  return Signal<S>(std::move(out));
}

// Keep every k-th sample starting with the first: result_nu = xi_{k(nu-1)+1}.
template <class S>
Signal<S> downsample(Index k, const Signal<S>& xi) {
  if (k < 1) throw LengthError("downsample: k must be >= 1");
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(ceil_div(xi.dim(), k)));
  for (Index nu = 1; k * (nu - 1) + 1 <= xi.dim(); ++nu)
    out.push_back(xi[k * (nu - 1) + 1]);
  return Signal<S>(std::move(out));
}

// Repeat every sample k times: result_nu = xi_{div(nu-1,k)+1}.
template <class S>
Signal<S> upsample_zoh(Index k, const Signal<S>& xi) {
  if (k < 1) throw LengthError("upsample_zoh: k must be >= 1");
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(k * xi.dim()));
  for (Index nu = 1; nu <= k * xi.dim(); ++nu)
    out.push_back(xi[euclid_div(nu - 1, k) + 1]);
  return Signal<S>(std::move(out));
}

// Insert k-1 zeros between neighboring samples; length k(dim-1)+1.
// result_i = xi_{div(i-1,k)+1} when k | i-1, zero otherwise.
template <class S>
Signal<S> spread(Index k, const Signal<S>& xi) {
  if (k < 1) throw LengthError("spread: k must be >= 1");
  if (!SampleAlgebra<S>::has_zero)
    throw NoZeroElement("spread: sample type has no zero element");
  const S zero = SampleAlgebra<S>::zero_like(xi[1]);
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(k * (xi.dim() - 1) + 1));
  for (Index i = 1; i <= k * (xi.dim() - 1) + 1; ++i) {
    if (euclid_rem(i - 1, k) == 0)
      out.push_back(xi[euclid_div(i - 1, k) + 1]);
    else
      out.push_back(zero);
  }
  return Signal<S>(std::move(out));
}

}  // namespace densescan
