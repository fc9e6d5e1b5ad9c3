#pragma once

#include <span>
#include <string>
#include <vector>

#include "densescan/error.hpp"
#include "densescan/euclid.hpp"
#include "densescan/kernel.hpp"
#include "densescan/signal.hpp"

namespace densescan {

// Apply f at every window position, advancing one sample at a time.
// Output shrinks by arity - 1.
template <class In, class Out>
Signal<Out> slide(const Kernel<In, Out>& f, const Signal<In>& xi) {
  const Index c = f.arity;
  const Index d = xi.dim();
  if (d < c)
    throw LengthError("slide: signal length " + std::to_string(d) +
                      " below window width " + std::to_string(c));
  std::vector<Out> out;
  out.reserve(static_cast<std::size_t>(d - c + 1));
  const In* base = xi.samples().data();
  for (Index i = 1; i <= d - c + 1; ++i)
    out.push_back(f.eval(std::span<const In>(base + (i - 1),
                                             static_cast<std::size_t>(c))));
  return Signal<Out>(std::move(out));
}

// Apply g to consecutive non-overlapping blocks of width k.
template <class In, class Out>
Signal<Out> stride(const Kernel<In, Out>& g, const Signal<In>& xi) {
  const Index k = g.arity;
  const Index d = xi.dim();
  if (!divides(k, d))
    throw DivisibilityError("stride: block width " + std::to_string(k) +
                            " does not divide signal length " +
                            std::to_string(d));
  std::vector<Out> out;
  out.reserve(static_cast<std::size_t>(d / k));
  const In* base = xi.samples().data();
  for (Index i = 1; i <= d / k; ++i)
    out.push_back(g.eval(std::span<const In>(base + k * (i - 1),
                                             static_cast<std::size_t>(k))));
  return Signal<Out>(std::move(out));
}

// d samples spaced k apart, starting at i: result_nu = xi_{i + k(nu-1)}.
template <class S>
Signal<S> dilated_subsignal(const Signal<S>& xi, Index d, Index k, Index i) {
  if (d < 1 || k < 1)
    throw LengthError("dilated_subsignal: d and k must be >= 1");
  if (xi.dim() < k * (d - 1) + 1)
    throw LengthError("dilated_subsignal: need length >= " +
                      std::to_string(k * (d - 1) + 1) + ", have " +
                      std::to_string(xi.dim()));
  const Index max_i = xi.dim() - k * (d - 1);
  if (i < 1 || i > max_i)
    throw IndexOutOfRange("dilated_subsignal: index " + std::to_string(i) +
                          " outside [1, " + std::to_string(max_i) + "]");
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(d));
  for (Index nu = 1; nu <= d; ++nu) out.push_back(xi[i + k * (nu - 1)]);
  return Signal<S>(std::move(out));
}

// Apply f to windows whose taps are k samples apart. Output shrinks by
// k*(arity - 1); dilate with k = 1 is slide.
template <class In, class Out>
Signal<Out> dilate(const Kernel<In, Out>& f, Index k, const Signal<In>& xi) {
  const Index c = f.arity;
  const Index d = xi.dim();
  if (k < 1) throw LengthError("dilate: k must be >= 1");
  if (d < k * (c - 1) + 1)
    throw LengthError("dilate: signal length " + std::to_string(d) +
                      " below dilated width " +
                      std::to_string(k * (c - 1) + 1));
  std::vector<In> window;
  window.reserve(static_cast<std::size_t>(c));
  std::vector<Out> out;
  out.reserve(static_cast<std::size_t>(d - k * (c - 1)));
  for (Index i = 1; i <= d - k * (c - 1); ++i) {
    window.clear();
    for (Index nu = 1; nu <= c; ++nu) window.push_back(xi[i + k * (nu - 1)]);
    out.push_back(f.eval(std::span<const In>(window.data(), window.size())));
  }
  return Signal<Out>(std::move(out));
}

// Polyphase split: rows shrink by factor k, fragment count grows by factor k.
// Entry law with s = cdim(chi):
//   result_{mu,nu} = chi_{div((mu-1)ks + nu - 1, s) + 1,
//                        rem((mu-1)ks + nu - 1, s) + 1}.
template <class S>
FragmentedSignal<S> fragment(Index k, const FragmentedSignal<S>& chi) {
  if (k < 1) throw DivisibilityError("fragment: k must be >= 1");
  const Index q = chi.rdim();
  const Index s = chi.cdim();
  if (!divides(k, q))
    throw DivisibilityError("fragment: " + std::to_string(k) +
                            " does not divide row count " + std::to_string(q));
  std::vector<S> entries(static_cast<std::size_t>(q * s), chi.at(1, 1));
  FragmentedSignal<S> out(q / k, s * k, std::move(entries));
  for (Index mu = 1; mu <= q / k; ++mu)
    for (Index nu = 1; nu <= s * k; ++nu) {
      const Index flat = (mu - 1) * k * s + nu - 1;
      out.at(mu, nu) = chi.at(euclid_div(flat, s) + 1, euclid_rem(flat, s) + 1);
    }
  return out;
}

// Inverse reordering: rows grow by factor k, fragment count shrinks by
// factor k. With s = cdim(result):
//   result_{mu,nu} = chi_{div((mu-1)s + nu - 1, ks) + 1,
//                        rem((mu-1)s + nu - 1, ks) + 1},
// equivalently result_{mu,nu} = chi_{div(mu-1,k)+1, rem(mu-1,k)*s + nu}.
template <class S>
FragmentedSignal<S> defragment(Index k, const FragmentedSignal<S>& chi) {
  if (k < 1) throw DivisibilityError("defragment: k must be >= 1");
  const Index q = chi.rdim();
  const Index ks = chi.cdim();
  if (!divides(k, ks))
    throw DivisibilityError("defragment: " + std::to_string(k) +
                            " does not divide fragment count " +
                            std::to_string(ks));
  const Index s = ks / k;
  std::vector<S> entries(static_cast<std::size_t>(q * ks), chi.at(1, 1));
  FragmentedSignal<S> out(q * k, s, std::move(entries));
  for (Index mu = 1; mu <= q * k; ++mu)
    for (Index nu = 1; nu <= s; ++nu) {
      const Index flat = (mu - 1) * s + nu - 1;
      out.at(mu, nu) =
          chi.at(euclid_div(flat, ks) + 1, euclid_rem(flat, ks) + 1);
    }
  return out;
}

// Slide f over every fragment independently; fragment count is preserved.
template <class In, class Out>
FragmentedSignal<Out> slide_fragmented(const Kernel<In, Out>& f,
                                       const FragmentedSignal<In>& chi) {
  const Index c = f.arity;
  const Index q = chi.rdim();
  if (q < c)
    throw LengthError("slide_fragmented: fragment length " +
                      std::to_string(q) + " below window width " +
                      std::to_string(c));
  const Index s = chi.cdim();
  const Index rows_out = q - c + 1;
  std::vector<In> column;
  column.reserve(static_cast<std::size_t>(q));
  // Evaluate column by column, then assemble the row-major block.
  std::vector<std::vector<Out>> per_fragment;
  per_fragment.reserve(static_cast<std::size_t>(s));
  for (Index nu = 1; nu <= s; ++nu) {
    column.clear();
    for (Index r = 1; r <= q; ++r) column.push_back(chi.at(r, nu));
    std::vector<Out> col_out;
    col_out.reserve(static_cast<std::size_t>(rows_out));
    for (Index i = 1; i <= rows_out; ++i)
      col_out.push_back(f.eval(std::span<const In>(
          column.data() + (i - 1), static_cast<std::size_t>(c))));
    per_fragment.push_back(std::move(col_out));
  }
  std::vector<Out> entries;
  entries.reserve(static_cast<std::size_t>(rows_out * s));
  for (Index r = 0; r < rows_out; ++r)
    for (Index nu = 0; nu < s; ++nu)
      entries.push_back(per_fragment[static_cast<std::size_t>(nu)]
                                    [static_cast<std::size_t>(r)]);
  return FragmentedSignal<Out>(rows_out, s, std::move(entries));
}

}  // namespace densescan
