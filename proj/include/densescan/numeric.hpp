#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "densescan/error.hpp"
#include "densescan/euclid.hpp"
#include "densescan/kernel.hpp"
#include "densescan/resample.hpp"
#include "densescan/signal.hpp"
#include "densescan/windowed.hpp"

namespace densescan {

// Weight tensor for multi-channel convolution: spatial width c, m input
// channels, n output channels. Stored (mu, lambda, kappa) row-major with
// kappa fastest. All entries must be finite.
class FilterBank {
 public:
  FilterBank(Index c, Index m, Index n, std::vector<double> weights)
      : c_(c), m_(m), n_(n), w_(std::move(weights)) {
    if (c_ < 1 || m_ < 1 || n_ < 1)
      throw ShapeError("filter bank needs c, m, n >= 1");
    if (static_cast<Index>(w_.size()) != c_ * m_ * n_)
      throw ShapeError("filter bank expects " + std::to_string(c_ * m_ * n_) +
                       " weights, got " + std::to_string(w_.size()));
    for (double v : w_)
      if (!std::isfinite(v))
        throw BadSample("filter bank weights must be finite");
  }

  Index spatial() const { return c_; }
  Index in_channels() const { return m_; }
  Index out_channels() const { return n_; }

  double at(Index mu, Index lambda, Index kappa) const {
    if (mu < 1 || mu > c_ || lambda < 1 || lambda > m_ || kappa < 1 ||
        kappa > n_)
      throw IndexOutOfRange("filter bank index out of range");
    return w_[static_cast<std::size_t>(((mu - 1) * m_ + (lambda - 1)) * n_ +
                                       (kappa - 1))];
  }

  const std::vector<double>& weights() const { return w_; }

 private:
  Index c_, m_, n_;
  std::vector<double> w_;
};

namespace detail {

inline void require_channels(const Channels& x, Index m, const char* where) {
  if (static_cast<Index>(x.size()) != m)
    throw ChannelMismatch(std::string(where) + ": expected " +
                          std::to_string(m) + " channels, got " +
                          std::to_string(x.size()));
}

// Accumulation order shared by conv and its window form: one accumulator per
// output channel, lambda outer ascending, mu inner ascending, add
// left-to-right, no FMA. rho is the window in signal order; flip = true reads
// tap c-mu+1 (window form), flip = false reads tap mu directly.
inline Channels conv_window(const FilterBank& w, std::span<const Channels> rho,
                            bool flip) {
  const Index c = w.spatial();
  const Index m = w.in_channels();
  const Index n = w.out_channels();
  for (const Channels& s : rho) require_channels(s, m, "conv");
  Channels out(static_cast<std::size_t>(n), 0.0);
  for (Index kappa = 1; kappa <= n; ++kappa) {
    double acc = 0.0;
    for (Index lambda = 1; lambda <= m; ++lambda)
      for (Index mu = 1; mu <= c; ++mu) {
        const Index tap = flip ? (c - mu + 1) : mu;
        acc += w.at(mu, lambda, kappa) *
               rho[static_cast<std::size_t>(tap - 1)]
                  [static_cast<std::size_t>(lambda - 1)];
      }
    out[static_cast<std::size_t>(kappa - 1)] = acc;
  }
  return out;
}

}  // namespace detail

// Multi-channel convolution: (xi * w)_i = sum_lambda sum_mu (w_mu)_lambda *
// (xi_{c+i-mu})_lambda. Output length D - c + 1 with n channels.
inline Signal<Channels> conv(const Signal<Channels>& xi, const FilterBank& w) {
  const Index c = w.spatial();
  if (xi.dim() < c)
    throw LengthError("conv: signal length " + std::to_string(xi.dim()) +
                      " below filter width " + std::to_string(c));
  std::vector<Channels> out;
  out.reserve(static_cast<std::size_t>(xi.dim() - c + 1));
  const Channels* base = xi.samples().data();
  for (Index i = 1; i <= xi.dim() - c + 1; ++i) {
    // Window xi_i..xi_{i+c-1}; the tap for mu is xi_{c+i-mu} = window[c-mu+1].
    std::span<const Channels> window(base + (i - 1),
                                     static_cast<std::size_t>(c));
    out.push_back(detail::conv_window(w, window, /*flip=*/true));
  }
  return Signal<Channels>(std::move(out));
}

// Window form of conv: slide(conv_kernel(w), xi) matches conv(xi, w) bitwise.
inline Kernel<Channels, Channels> conv_kernel(const FilterBank& w) {
  return Kernel<Channels, Channels>(
      w.spatial(),
      [w](std::span<const Channels> rho) {
        return detail::conv_window(w, rho, /*flip=*/true);
      },
      "conv");
}

// Channel-wise scalar function on a single sample.
inline Kernel<Channels, Channels> pointwise_kernel(
    std::function<double(double)> phi, Index m, std::string label = "pointwise") {
  return Kernel<Channels, Channels>(
      1,
      [phi = std::move(phi), m](std::span<const Channels> rho) {
        detail::require_channels(rho[0], m, "pointwise");
        Channels out = rho[0];
        for (double& v : out) v = phi(v);
        return out;
      },
      std::move(label));
}

// Adds a fixed per-channel offset to a single sample.
inline Kernel<Channels, Channels> bias_kernel(Channels b) {
  const Index n = static_cast<Index>(b.size());
  return Kernel<Channels, Channels>(
      1,
      [b = std::move(b), n](std::span<const Channels> rho) {
        detail::require_channels(rho[0], n, "bias");
        Channels out = rho[0];
        for (std::size_t ch = 0; ch < out.size(); ++ch) out[ch] += b[ch];
        return out;
      },
      "bias");
}

// Channel-wise mean over a block of k samples.
inline Kernel<Channels, Channels> avg_pool_kernel(Index k, Index m) {
  if (k < 1) throw LengthError("avg_pool_kernel: k must be >= 1");
  return Kernel<Channels, Channels>(
      k,
      [k, m](std::span<const Channels> rho) {
        for (const Channels& s : rho) {
          detail::require_channels(s, m, "avg_pool");
          for (double v : s)
            if (std::isnan(v)) throw BadSample("avg_pool: NaN input");
        }
        Channels out(static_cast<std::size_t>(m), 0.0);
        for (Index ch = 0; ch < m; ++ch) {
          double acc = rho[0][static_cast<std::size_t>(ch)];
          for (Index nu = 1; nu < k; ++nu)
            acc += rho[static_cast<std::size_t>(nu)]
                      [static_cast<std::size_t>(ch)];
          out[static_cast<std::size_t>(ch)] = acc / static_cast<double>(k);
        }
        return out;
      },
      "avg_pool");
}

// Channel-wise maximum over a block of k samples.
inline Kernel<Channels, Channels> max_pool_kernel(Index k, Index m) {
  if (k < 1) throw LengthError("max_pool_kernel: k must be >= 1");
  return Kernel<Channels, Channels>(
      k,
      [k, m](std::span<const Channels> rho) {
        for (const Channels& s : rho) {
          detail::require_channels(s, m, "max_pool");
          for (double v : s)
            if (std::isnan(v)) throw BadSample("max_pool: NaN input");
        }
        Channels out = rho[0];
        for (Index nu = 1; nu < k; ++nu)
          for (Index ch = 0; ch < m; ++ch) {
            const double v =
                rho[static_cast<std::size_t>(nu)][static_cast<std::size_t>(ch)];
            if (v > out[static_cast<std::size_t>(ch)])
              out[static_cast<std::size_t>(ch)] = v;
          }
        return out;
      },
      "max_pool");
}

// Fractionally strided convolution: insert k-1 zeros between samples, pad
// with c-1 zeros on both ends, run valid convolution, crop P from both ends.
// Output length k(D-1) + c - 2P.
inline Signal<Channels> transposed_conv(const Signal<Channels>& xi,
                                        const FilterBank& w, Index k,
                                        Index P) {
  if (k < 1) throw LengthError("transposed_conv: k must be >= 1");
  if (P < 0) throw LengthError("transposed_conv: P must be >= 0");
  const Index c = w.spatial();
  const Index need = 2 * P - c + 1;
  const Index min_len = need <= 0 ? 1 : ceil_div(need, k) + 1;
  if (xi.dim() < min_len)
    throw LengthError("transposed_conv: signal length " +
                      std::to_string(xi.dim()) + " below minimum " +
                      std::to_string(min_len));
  const Signal<Channels> spreaded = spread(k, xi);
  const Signal<Channels> padded =
      pad(c - 1, dirichlet_rule<Channels>(), spreaded);
  const Signal<Channels> convolved = conv(padded, w);
  return crop(P, convolved);
}

// Filter bank that makes transposed_conv(., bank, u, u/2) repeat each sample
// u times: spatial 2u, channel-diagonal, ones at taps u/2+1 .. u/2+u.
inline FilterBank zoh_filter_bank(Index u, Index m) {
  if (u >= 1 && u % 2 != 0)
    throw OddFactor("zoh_filter_bank: factor " + std::to_string(u) +
                    " must be even");
  if (u < 2) throw BadConfig("zoh_filter_bank: factor must be >= 2");
  if (m < 1) throw ShapeError("zoh_filter_bank: m must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(2 * u * m * m), 0.0);
  for (Index mu = 1; mu <= 2 * u; ++mu)
    for (Index lambda = 1; lambda <= m; ++lambda)
      for (Index kappa = 1; kappa <= m; ++kappa)
        if (lambda == kappa && mu >= 1 + u / 2 && mu <= u + u / 2)
          w[static_cast<std::size_t>(((mu - 1) * m + (lambda - 1)) * m +
                                     (kappa - 1))] = 1.0;
  return FilterBank(2 * u, m, m, std::move(w));
}

// Dense upsampling: unit-spatial convolution to u*n channels, then move the
// channel groups into the spatial axis. Output has u*D samples of n channels:
//   out_i[kappa] = (xi * w)_{div(i-1,u)+1}[rem(i-1,u)*n + kappa].
inline Signal<Channels> duc(const Signal<Channels>& xi, const FilterBank& w,
                            Index u) {
  if (u < 1) throw BadConfig("duc: factor must be >= 1");
  if (w.spatial() != 1)
    throw ShapeError("duc: filter bank must have unit spatial size");
  if (!divides(u, w.out_channels()))
    throw ChannelMismatch("duc: factor " + std::to_string(u) +
                          " does not divide output channel count " +
                          std::to_string(w.out_channels()));
  const Index n = w.out_channels() / u;
  const Signal<Channels> dense = conv(xi, w);
  std::vector<Channels> out;
  out.reserve(static_cast<std::size_t>(u * dense.dim()));
  for (Index i = 1; i <= u * dense.dim(); ++i) {
    const Channels& src = dense[euclid_div(i - 1, u) + 1];
    const Index offset = euclid_rem(i - 1, u) * n;
    Channels sample(static_cast<std::size_t>(n), 0.0);
    for (Index kappa = 1; kappa <= n; ++kappa)
      sample[static_cast<std::size_t>(kappa - 1)] =
          src[static_cast<std::size_t>(offset + kappa - 1)];
    out.push_back(std::move(sample));
  }
  return Signal<Channels>(std::move(out));
}

// Repack a spatial-u bank into the unit-spatial shape duc consumes:
//   (result_1)_{lambda, nu} = (w_{div(nu-1,n)+1})_{lambda, rem(nu-1,n)+1}.
// duc(., duc_reorder(w), u) equals transposed_conv(., w, u, 0).
inline FilterBank duc_reorder(const FilterBank& w) {
  const Index u = w.spatial();
  const Index m = w.in_channels();
  const Index n = w.out_channels();
  std::vector<double> out(static_cast<std::size_t>(m * u * n), 0.0);
  for (Index lambda = 1; lambda <= m; ++lambda)
    for (Index nu = 1; nu <= u * n; ++nu)
      out[static_cast<std::size_t>((lambda - 1) * (u * n) + (nu - 1))] =
          w.at(euclid_div(nu - 1, n) + 1, lambda, euclid_rem(nu - 1, n) + 1);
  return FilterBank(1, m, u * n, std::move(out));
}

}  // namespace densescan
