#pragma once

#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "densescan/error.hpp"
#include "densescan/euclid.hpp"
#include "densescan/kernel.hpp"
#include "densescan/resample.hpp"
#include "densescan/signal.hpp"
#include "densescan/windowed.hpp"

namespace densescan {

// Half-width of the padding that keeps a lowpass-and-downsample front end
// aligned with window starts: raw = (k-1)B + h - k, rounded up to whole
// samples per side.
inline std::pair<Index, Index> ms_boundary(Index B, Index k, Index h) {
  if (k < 2) throw BadConfig("ms_boundary: decimation factor must be >= 2");
  if (h < k)
    throw BadConfig("ms_boundary: lowpass width " + std::to_string(h) +
                    " must be >= decimation factor " + std::to_string(k));
  if (B < 1) throw BadConfig("ms_boundary: window width must be >= 1");
  const Index raw = (k - 1) * B + h - k;
  return {raw, ceil_div(raw, 2)};
}

// Window start i snapped down to the coarse grid: k*div(i-1,k) + 1.
inline Index ms_index(Index k, Index i) {
  if (k < 1) throw BadConfig("ms_index: factor must be >= 1");
  if (i < 1) throw IndexOutOfRange("ms_index: start must be >= 1");
  return k * euclid_div(i - 1, k) + 1;
}

// Length-d window at start i, extended R samples on both sides by the
// boundary rule. Sample nu of the result reads position i + nu - R - 1.
template <class S>
Signal<S> padded_subsignal(const Signal<S>& xi, Index d, Index R,
                           const BoundaryRule<S>& theta, Index i) {
  if (d < 1) throw LengthError("padded_subsignal: window width must be >= 1");
  if (R < 0) throw LengthError("padded_subsignal: pad width must be >= 0");
  if (i < 1 || i + d - 1 > xi.dim())
    throw IndexOutOfRange("padded_subsignal: window [" + std::to_string(i) +
                          ", " + std::to_string(i + d - 1) +
                          "] outside signal of length " +
                          std::to_string(xi.dim()));
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(d + 2 * R));
  for (Index nu = 1; nu <= d + 2 * R; ++nu)
    out.push_back(theta.lookup(xi, i + nu - R - 1));
  return Signal<S>(std::move(out));
}

// Coarse-scale front end: lowpass of width h, decimation by k, padding by
// a boundary rule. B is the window width the scan pairs it with.
template <class S>
struct MultiScaleConfig {
  Index k = 2;
  Index h = 2;
  Index B = 1;
  Kernel<S, S> lowpass;
  BoundaryRule<S> theta;

  MultiScaleConfig(Index k_, Index h_, Index B_, Kernel<S, S> lowpass_,
                   BoundaryRule<S> theta_)
      : k(k_), h(h_), B(B_), lowpass(std::move(lowpass_)),
        theta(std::move(theta_)) {
    ms_boundary(B, k, h);  // validates k, h, B
    if (lowpass.arity != h)
      throw BadConfig("multiscale: lowpass arity " +
                      std::to_string(lowpass.arity) + " must equal width " +
                      std::to_string(h));
  }

  // Recomputed on demand so a tweaked configuration can never serve a
  // stale padding width.
  Index boundary_raw() const { return ms_boundary(B, k, h).first; }
  Index boundary() const { return ms_boundary(B, k, h).second; }
};

// Downscaled companion of the whole signal: pad by R, lowpass, decimate.
template <class S>
Signal<S> ms_downscale(const MultiScaleConfig<S>& cfg, const Signal<S>& xi) {
  if (xi.dim() < cfg.B)
    throw LengthError("ms_downscale: signal length " +
                      std::to_string(xi.dim()) + " below window width " +
                      std::to_string(cfg.B));
  return downsample(cfg.k,
                    slide(cfg.lowpass, pad(cfg.boundary(), cfg.theta, xi)));
}

// Downscaled companion of the window at start i (must lie on the coarse
// grid for the pairing law; any valid start is accepted here).
template <class S>
Signal<S> ms_subsignal(const MultiScaleConfig<S>& cfg, const Signal<S>& xi,
                       Index i) {
  if (i < 1 || xi.dim() < cfg.B || i > xi.dim() - cfg.B + 1)
    throw IndexOutOfRange("ms_subsignal: window start " + std::to_string(i) +
                          " outside [1, " +
                          std::to_string(xi.dim() - cfg.B + 1) + "]");
  const Signal<S> padded =
      padded_subsignal(xi, cfg.B, cfg.boundary(), cfg.theta, i);
  const Signal<S> coarse = downsample(cfg.k, slide(cfg.lowpass, padded));
  if (coarse.dim() != cfg.B) throw std::logic_error("ms_subsignal: bad length");
  return coarse;
}

// Per-window two-scale scan, the defining form: window i is paired with the
// downscaled companion of the window at the snapped start ms_index(k, i).
template <class S, class P, class Q, class F>
auto ms_scan_reference(const MultiScaleConfig<S>& cfg, const Signal<S>& xi,
                       const Kernel<S, P>& fine, const Kernel<S, Q>& coarse,
                       F&& combine)
    -> Signal<std::invoke_result_t<F&, const P&, const Q&>> {
  using N = std::invoke_result_t<F&, const P&, const Q&>;
  if (fine.arity != cfg.B || coarse.arity != cfg.B)
    throw BadConfig("ms_scan: kernel arities must equal the window width");
  if (xi.dim() < cfg.B)
    throw LengthError("ms_scan: signal length " + std::to_string(xi.dim()) +
                      " below window width " + std::to_string(cfg.B));
  std::vector<N> out;
  out.reserve(static_cast<std::size_t>(xi.dim() - cfg.B + 1));
  for (Index i = 1; i <= xi.dim() - cfg.B + 1; ++i) {
    const Signal<S> fine_win = subsignal(xi, cfg.B, i);
    const Signal<S> coarse_win = ms_subsignal(cfg, xi, ms_index(cfg.k, i));
    const P p = fine.eval(std::span<const S>(fine_win.samples()));
    const Q q = coarse.eval(std::span<const S>(coarse_win.samples()));
    out.push_back(combine(p, q));
  }
  return Signal<N>(std::move(out));
}

// Same outputs, one pass per scale: slide the fine kernel over the signal,
// slide the coarse kernel over the downscaled companion once, hold each
// coarse output for k fine positions, drop the r surplus samples.
template <class S, class P, class Q, class F>
auto ms_scan(const MultiScaleConfig<S>& cfg, const Signal<S>& xi,
             const Kernel<S, P>& fine, const Kernel<S, Q>& coarse,
             F&& combine)
    -> Signal<std::invoke_result_t<F&, const P&, const Q&>> {
  using N = std::invoke_result_t<F&, const P&, const Q&>;
  if (fine.arity != cfg.B || coarse.arity != cfg.B)
    throw BadConfig("ms_scan: kernel arities must equal the window width");
  if (xi.dim() < cfg.B)
    throw LengthError("ms_scan: signal length " + std::to_string(xi.dim()) +
                      " below window width " + std::to_string(cfg.B));
  const Index span = xi.dim() - cfg.B + 1;
  const Signal<P> fine_out = slide(fine, xi);
  const Signal<Q> coarse_out = slide(coarse, ms_downscale(cfg, xi));
  const Signal<Q> held = upsample_zoh(cfg.k, coarse_out);
  const Index parity = euclid_rem(cfg.boundary_raw(), 2);
  const Index span_padded = span + parity;
  const Index r = parity - euclid_rem(span_padded, cfg.k) +
                  (divides(cfg.k, span_padded) ? 0 : cfg.k);
  const Signal<Q> aligned = trim(r, held);
  if (aligned.dim() != span)
    throw std::logic_error("ms_scan: alignment dropped the wrong count");
  std::vector<N> out;
  out.reserve(static_cast<std::size_t>(span));
  for (Index i = 1; i <= span; ++i) out.push_back(combine(fine_out[i], aligned[i]));
  return Signal<N>(std::move(out));
}

// Width-3 smoothing kernel with quarter weights; handy default lowpass.
inline Kernel<double, double> binomial3_kernel() {
  return Kernel<double, double>(
      3,
      [](std::span<const double> w) {
        return (w[0] + 2.0 * w[1] + w[2]) * 0.25;
      },
      "binomial3");
}

}  // namespace densescan
