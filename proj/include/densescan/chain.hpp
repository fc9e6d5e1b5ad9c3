#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "densescan/error.hpp"
#include "densescan/euclid.hpp"
#include "densescan/kernel.hpp"
#include "densescan/resample.hpp"
#include "densescan/signal.hpp"
#include "densescan/windowed.hpp"

namespace densescan {

// One layer: a window kernel f (arity c) followed by a pooling kernel g
// (arity k). A bypass layer is c = k = 1 with identity kernels.
template <class S>
struct ChainLayer {
  Kernel<S, S> f;
  Kernel<S, S> g;
};

// Ordered layer stack with a dummy sample for stuffing. The receptive field
// B and the per-layer length profile u_j are derived from the arities so
// that a full patch evaluation ends in exactly one sample (u_L = 1):
//   u_L = 1,   u_{j-1} = k_j * u_j + c_j - 1,   B = u_0.
// Stride products: k_0* = 1, k_j* = k_1 * ... * k_j.
template <class S>
class ProcessingChain {
 public:
  ProcessingChain(std::vector<ChainLayer<S>> layers, S zeta,
                  std::optional<Index> declared_b = std::nullopt)
      : layers_(std::move(layers)), zeta_(std::move(zeta)) {
    const Index L = depth();
    if (L < 1) throw IllFormedChain("chain needs at least one layer");
    for (Index j = 1; j <= L; ++j) {
      if (layer(j).f.arity < 1 || layer(j).g.arity < 1)
        throw IllFormedChain("layer " + std::to_string(j) +
                             ": kernel arities must be >= 1");
      if (!layer(j).f.eval || !layer(j).g.eval)
        throw IllFormedChain("layer " + std::to_string(j) +
                             ": missing kernel function");
    }
    u_.assign(static_cast<std::size_t>(L + 1), 1);
    for (Index j = L; j >= 1; --j)
      u_[static_cast<std::size_t>(j - 1)] =
          k(j) * u_[static_cast<std::size_t>(j)] + c(j) - 1;
    kstar_.assign(static_cast<std::size_t>(L + 1), 1);
    for (Index j = 1; j <= L; ++j)
      kstar_[static_cast<std::size_t>(j)] =
          kstar_[static_cast<std::size_t>(j - 1)] * k(j);
    if (declared_b) validate_declared(*declared_b);
  }

  Index depth() const { return static_cast<Index>(layers_.size()); }

  const ChainLayer<S>& layer(Index j) const {
    if (j < 1 || j > depth())
      throw IndexOutOfRange("layer index " + std::to_string(j) +
                            " outside [1, " + std::to_string(depth()) + "]");
    return layers_[static_cast<std::size_t>(j - 1)];
  }

  Index c(Index j) const { return layer(j).f.arity; }
  Index k(Index j) const { return layer(j).g.arity; }

  // Stride product through layer j; kstar(0) = 1.
  Index kstar(Index j) const {
    if (j < 0 || j > depth())
      throw IndexOutOfRange("kstar index out of range");
    return kstar_[static_cast<std::size_t>(j)];
  }

  // Patch-mode length after layer j; u(0) = B, u(depth()) = 1.
  Index u(Index j) const {
    if (j < 0 || j > depth()) throw IndexOutOfRange("u index out of range");
    return u_[static_cast<std::size_t>(j)];
  }

  Index receptive_field() const { return u_[0]; }

  const S& dummy() const { return zeta_; }

  ProcessingChain with_dummy(S zeta) const {
    ProcessingChain copy = *this;
    copy.zeta_ = std::move(zeta);
    return copy;
  }

  ProcessingChain with_layers(std::vector<ChainLayer<S>> layers) const {
    return ProcessingChain(std::move(layers), zeta_);
  }

 private:
  // Walk the profile forward from a caller-supplied B and name the first
  // layer where it breaks.
  void validate_declared(Index b) const {
    Index len = b;
    for (Index j = 1; j <= depth(); ++j) {
      const Index after_f = len - c(j) + 1;
      if (after_f < 1)
        throw IllFormedChain("layer " + std::to_string(j) +
                             ": window width " + std::to_string(c(j)) +
                             " exceeds running length " + std::to_string(len));
      if (!divides(k(j), after_f))
        throw IllFormedChain("layer " + std::to_string(j) +
                             ": pool width " + std::to_string(k(j)) +
                             " does not divide running length " +
                             std::to_string(after_f));
      len = after_f / k(j);
      if (len < 1)
        throw IllFormedChain("layer " + std::to_string(j) +
                             ": running length drops below one sample");
    }
    if (len != 1)
      throw IllFormedChain("declared receptive field " + std::to_string(b) +
                           " leaves " + std::to_string(len) +
                           " samples after the final layer; expected 1 " +
                           "(derived receptive field is " +
                           std::to_string(receptive_field()) + ")");
  }

  std::vector<ChainLayer<S>> layers_;
  S zeta_;
  std::vector<Index> kstar_;
  std::vector<Index> u_;
};

template <class S>
ProcessingChain<S> build_chain(std::vector<ChainLayer<S>> layers, S zeta) {
  return ProcessingChain<S>(std::move(layers), std::move(zeta));
}

template <class S>
ProcessingChain<S> build_chain(std::vector<ChainLayer<S>> layers, S zeta,
                               Index declared_b) {
  return ProcessingChain<S>(std::move(layers), std::move(zeta), declared_b);
}

// --- single-layer steps -----------------------------------------------
// The full evaluators are folds over these; tests and shape probes reuse
// them layer by layer.

// Patch mode: pool over the window outputs in non-overlapping blocks.
template <class S>
Signal<S> stride_step(const ChainLayer<S>& ly, const Signal<S>& rho) {
  return stride(ly.g, slide(ly.f, rho));
}

// Sliding mode on fragments: slide both kernels over every fragment, then
// split each fragment into k polyphase fragments.
template <class S>
FragmentedSignal<S> slide_step(const ChainLayer<S>& ly,
                               const FragmentedSignal<S>& chi) {
  return fragment(ly.g.arity,
                  slide_fragmented(ly.g, slide_fragmented(ly.f, chi)));
}

// Dilated mode: both kernels run with tap spacing equal to the stride
// product accumulated before this layer.
template <class S>
Signal<S> dilate_step(const ChainLayer<S>& ly, Index spacing,
                      const Signal<S>& xi) {
  return dilate(ly.g, spacing, dilate(ly.f, spacing, xi));
}

// --- full evaluators ---------------------------------------------------

// Patch mode over one receptive field; output has exactly one sample.
template <class S>
Signal<S> eval_stride(const ProcessingChain<S>& chain, const Signal<S>& rho) {
  if (rho.dim() != chain.receptive_field())
    throw LengthError("eval_stride: patch length " + std::to_string(rho.dim()) +
                      " must equal the receptive field " +
                      std::to_string(chain.receptive_field()));
  Signal<S> cur = rho;
  for (Index j = 1; j <= chain.depth(); ++j)
    cur = stride_step(chain.layer(j), cur);
  return cur;
}

// Sliding mode over the whole signal. Requires k_L* | D - B + 1; the result
// holds every patch output, reordered into k_L* interleaved fragments:
// patch i sits at row div(i-1, k_L*) + 1, column rem(i-1, k_L*) + 1.
template <class S>
FragmentedSignal<S> eval_slide(const ProcessingChain<S>& chain,
                               const Signal<S>& xi) {
  const Index B = chain.receptive_field();
  const Index kl = chain.kstar(chain.depth());
  if (xi.dim() < B)
    throw LengthError("eval_slide: signal length " + std::to_string(xi.dim()) +
                      " below receptive field " + std::to_string(B));
  if (!divides(kl, xi.dim() - B + 1))
    throw DivisibilityError("eval_slide: stride product k_L* = " +
                            std::to_string(kl) + " does not divide D - B + 1 = " +
                            std::to_string(xi.dim() - B + 1));
  FragmentedSignal<S> cur = FragmentedSignal<S>::from_signal(xi);
  for (Index j = 1; j <= chain.depth(); ++j)
    cur = slide_step(chain.layer(j), cur);
  return cur;
}

// Number of dummy samples needed to make sliding-mode evaluation of a
// length-d signal come out even.
template <class S>
Index stuff_count(const ProcessingChain<S>& chain, Index d) {
  const Index B = chain.receptive_field();
  const Index kl = chain.kstar(chain.depth());
  if (d < B) throw LengthError("stuff_count: signal shorter than the field");
  const Index rem = euclid_rem(d - B + 1, kl);
  return rem == 0 ? 0 : kl - rem;
}

// Dense scan: every patch output at full resolution, computed the fast way.
// Stuff to divisibility, run sliding mode, undo the polyphase split, drop
// the outputs that came from stuffed samples. result_i equals
// eval_stride(chain, subsignal(xi, B, i)) for every i, regardless of the
// dummy value.
template <class S>
Signal<S> exact_scan(const ProcessingChain<S>& chain, const Signal<S>& xi) {
  const Index B = chain.receptive_field();
  if (xi.dim() < B)
    throw LengthError("exact_scan: signal length " + std::to_string(xi.dim()) +
                      " below receptive field " + std::to_string(B));
  const Index kl = chain.kstar(chain.depth());
  const Index r = stuff_count(chain, xi.dim());
  const FragmentedSignal<S> frag =
      eval_slide(chain, stuff(r, chain.dummy(), xi));
  const Signal<S> dense = defragment(kl, frag).to_signal();
  if (dense.dim() != xi.dim() + r - B + 1)
    throw std::logic_error("exact_scan: unexpected dense length");
  return trim(r, dense);
}

// Dilated mode over the whole signal; no divisibility requirements. Output
// equals exact_scan sample for sample.
template <class S>
Signal<S> eval_dilate(const ProcessingChain<S>& chain, const Signal<S>& xi) {
  const Index B = chain.receptive_field();
  if (xi.dim() < B)
    throw LengthError("eval_dilate: signal length " + std::to_string(xi.dim()) +
                      " below receptive field " + std::to_string(B));
  Signal<S> cur = xi;
  for (Index j = 1; j <= chain.depth(); ++j)
    cur = dilate_step(chain.layer(j), chain.kstar(j - 1), cur);
  return cur;
}

// Relaxed mode: run the patch pipeline on the whole signal. Requires
// k_L* | D - B; output i is the patch output at position k_L*(i-1)+1, i.e.
// the dense result downsampled by the stride product.
template <class S>
Signal<S> eval_relax(const ProcessingChain<S>& chain, const Signal<S>& xi) {
  const Index B = chain.receptive_field();
  const Index kl = chain.kstar(chain.depth());
  if (xi.dim() < B)
    throw LengthError("eval_relax: signal length " + std::to_string(xi.dim()) +
                      " below receptive field " + std::to_string(B));
  if (!divides(kl, xi.dim() - B))
    throw DivisibilityError("eval_relax: stride product k_L* = " +
                            std::to_string(kl) + " does not divide D - B = " +
                            std::to_string(xi.dim() - B));
  Signal<S> cur = xi;
  for (Index j = 1; j <= chain.depth(); ++j)
    cur = stride_step(chain.layer(j), cur);
  return cur;
}

// Relaxed mode for arbitrary lengths: drop the tail remainder first. The
// result equals downsample(k_L*, exact_scan(chain, xi)) bitwise.
template <class S>
Signal<S> relaxed_scan(const ProcessingChain<S>& chain, const Signal<S>& xi) {
  const Index B = chain.receptive_field();
  if (xi.dim() < B)
    throw LengthError("relaxed_scan: signal length " +
                      std::to_string(xi.dim()) + " below receptive field " +
                      std::to_string(B));
  const Index r = euclid_rem(xi.dim() - B, chain.kstar(chain.depth()));
  return eval_relax(chain, trim(r, xi));
}

// Full resolution out of relaxed passes: pass gamma scans the subsignal
// starting at gamma and yields column gamma of eval_slide; interleaving the
// passes restores the dense result. Same precondition as eval_slide.
template <class S>
Signal<S> shift_and_stitch(const ProcessingChain<S>& chain,
                           const Signal<S>& xi) {
  const Index B = chain.receptive_field();
  const Index kl = chain.kstar(chain.depth());
  if (xi.dim() < B)
    throw LengthError("shift_and_stitch: signal length " +
                      std::to_string(xi.dim()) + " below receptive field " +
                      std::to_string(B));
  if (!divides(kl, xi.dim() - B + 1))
    throw DivisibilityError("shift_and_stitch: stride product k_L* = " +
                            std::to_string(kl) +
                            " does not divide D - B + 1 = " +
                            std::to_string(xi.dim() - B + 1));
  const Index pass_len = (xi.dim() - B + 1) / kl;
  std::vector<Signal<S>> passes;
  passes.reserve(static_cast<std::size_t>(kl));
  for (Index gamma = 1; gamma <= kl; ++gamma)
    passes.push_back(
        eval_relax(chain, subsignal(xi, xi.dim() - kl + 1, gamma)));
  std::vector<S> entries;
  entries.reserve(static_cast<std::size_t>(pass_len * kl));
  for (Index row = 1; row <= pass_len; ++row)
    for (Index gamma = 1; gamma <= kl; ++gamma)
      entries.push_back(passes[static_cast<std::size_t>(gamma - 1)][row]);
  const FragmentedSignal<S> stacked(pass_len, kl, std::move(entries));
  return defragment(kl, stacked).to_signal();
}

// Mixed mode: layers 1..l run relaxed on the signal, layers l+1..L run in
// sliding mode on fragments. Requires D = B + k_L*'t - k_l*' for some t >= 1;
// the result has k_L*/k_l* fragments.
template <class S>
FragmentedSignal<S> eval_mixed(const ProcessingChain<S>& chain, Index level,
                               const Signal<S>& xi) {
  const Index L = chain.depth();
  if (level < 1 || level > L - 1)
    throw IndexOutOfRange("eval_mixed: split level " + std::to_string(level) +
                          " outside [1, " + std::to_string(L - 1) + "]");
  const Index B = chain.receptive_field();
  const Index kl = chain.kstar(L);
  const Index ksplit = chain.kstar(level);
  if (xi.dim() < B)
    throw LengthError("eval_mixed: signal length " + std::to_string(xi.dim()) +
                      " below receptive field " + std::to_string(B));
  if (!divides(kl, xi.dim() - B + ksplit))
    throw DivisibilityError(
        "eval_mixed: need length B + k_L*'t - k_l*' (k_L* = " +
        std::to_string(kl) + ", k_l* = " + std::to_string(ksplit) +
        "), have " + std::to_string(xi.dim()));
  const Index t = (xi.dim() - B + ksplit) / kl;
  if (t < 1)
    throw LengthError("eval_mixed: signal length " + std::to_string(xi.dim()) +
                      " below minimum " + std::to_string(B + kl - ksplit));
  Signal<S> cur = xi;
  for (Index j = 1; j <= level; ++j) cur = stride_step(chain.layer(j), cur);
  FragmentedSignal<S> frag = FragmentedSignal<S>::from_signal(cur);
  for (Index j = level + 1; j <= L; ++j)
    frag = slide_step(chain.layer(j), frag);
  return frag;
}

// Mixed-mode wrapper for arbitrary lengths >= B. Dispatch on
// r = rem(D - B + k_l*, k_L*): small remainders trim the input, large ones
// stuff it and drop the surplus outputs. The result equals
// downsample(k_l*, exact_scan(chain, xi)) bitwise.
template <class S>
Signal<S> mixed_scan(const ProcessingChain<S>& chain, Index level,
                     const Signal<S>& xi) {
  const Index L = chain.depth();
  if (level < 1 || level > L - 1)
    throw IndexOutOfRange("mixed_scan: split level " + std::to_string(level) +
                          " outside [1, " + std::to_string(L - 1) + "]");
  const Index B = chain.receptive_field();
  if (xi.dim() < B)
    throw LengthError("mixed_scan: signal length " + std::to_string(xi.dim()) +
                      " below receptive field " + std::to_string(B));
  const Index kl = chain.kstar(L);
  const Index ksplit = chain.kstar(level);
  const Index r = euclid_rem(xi.dim() - B + ksplit, kl);
  if (r <= ksplit - 1) {
    const FragmentedSignal<S> frag = eval_mixed(chain, level, trim(r, xi));
    return defragment(kl / ksplit, frag).to_signal();
  }
  const Index stilde = divides(ksplit, xi.dim() - B + 1)
                           ? ksplit
                           : euclid_rem(xi.dim() - B + 1, ksplit);
  if (!divides(ksplit, kl - r + stilde - 1))
    throw std::logic_error("mixed_scan: surplus is not a whole output row");
  const Index surplus = (kl - r + stilde - 1) / ksplit;
  const FragmentedSignal<S> frag =
      eval_mixed(chain, level, stuff(kl - r, chain.dummy(), xi));
  return trim(surplus, defragment(kl / ksplit, frag).to_signal());
}

// --- closed-form shape profiles ----------------------------------------

struct MixedDims {
  Index level = 0;
  bool applicable = false;
  std::string reason;
  Index t = 0;
  std::vector<Index> rows;  // index 0..L; cols(j) = 1 for j <= level
  std::vector<Index> cols;
};

struct DimReport {
  Index D = 0;
  Index B = 0;
  Index kstar_total = 1;
  std::vector<Index> u;  // 0..L, patch-mode lengths

  bool slide_applicable = false;
  std::string slide_reason;
  std::vector<Index> u_row;  // 0..L, samples per fragment
  std::vector<Index> u_col;  // 0..L, fragment count

  std::vector<Index> v;  // 0..L, dilated-mode lengths (always defined)

  bool relax_applicable = false;
  std::string relax_reason;
  std::vector<Index> w;  // 0..L, relaxed-mode lengths

  std::vector<MixedDims> mixed;  // one entry per split level 1..L-1
};

// Closed-form per-layer shapes of every regime at input length D; regimes
// whose divisibility requirement fails are flagged with the reason.
template <class S>
DimReport chain_dims(const ProcessingChain<S>& chain, Index D) {
  const Index L = chain.depth();
  const Index B = chain.receptive_field();
  if (D < B)
    throw LengthError("chain_dims: length " + std::to_string(D) +
                      " below receptive field " + std::to_string(B));
  DimReport rep;
  rep.D = D;
  rep.B = B;
  rep.kstar_total = chain.kstar(L);
  for (Index j = 0; j <= L; ++j) rep.u.push_back(chain.u(j));

  const Index kl = rep.kstar_total;
  rep.slide_applicable = divides(kl, D - B + 1);
  if (rep.slide_applicable) {
    Index rows = D;
    Index cols = 1;
    rep.u_row.push_back(rows);
    rep.u_col.push_back(cols);
    for (Index j = 1; j <= L; ++j) {
      rows = (rows - chain.c(j) + 1 - chain.k(j) + 1) / chain.k(j);
      cols *= chain.k(j);
      rep.u_row.push_back(rows);
      rep.u_col.push_back(cols);
    }
  } else {
    rep.slide_reason = "k_L* = " + std::to_string(kl) +
                       " does not divide D - B + 1 = " +
                       std::to_string(D - B + 1);
  }

  rep.v.push_back(D);
  for (Index j = 1; j <= L; ++j)
    rep.v.push_back(rep.v.back() -
                    chain.kstar(j - 1) * (chain.c(j) + chain.k(j) - 2));

  rep.relax_applicable = divides(kl, D - B);
  if (rep.relax_applicable) {
    for (Index j = 0; j <= L; ++j)
      rep.w.push_back(chain.u(j) + (D - B) / chain.kstar(j));
  } else {
    rep.relax_reason = "k_L* = " + std::to_string(kl) +
                       " does not divide D - B = " + std::to_string(D - B);
  }

  for (Index level = 1; level <= L - 1; ++level) {
    MixedDims md;
    md.level = level;
    const Index ksplit = chain.kstar(level);
    if (!divides(kl, D - B + ksplit)) {
      md.reason = "no t with D = B + " + std::to_string(kl) + "t - " +
                  std::to_string(ksplit);
    } else {
      md.t = (D - B + ksplit) / kl;
      if (md.t < 1) {
        md.reason = "minimum length is B + k_L* - k_l* = " +
                    std::to_string(B + kl - ksplit);
      } else {
        md.applicable = true;
        for (Index j = 0; j <= L; ++j) {
          if (j <= level) {
            md.rows.push_back(chain.u(j) + (D - B) / chain.kstar(j));
            md.cols.push_back(1);
          } else {
            md.rows.push_back((kl / chain.kstar(j)) * md.t + chain.u(j) - 1);
            md.cols.push_back(chain.kstar(j) / ksplit);
          }
        }
      }
    }
    rep.mixed.push_back(std::move(md));
  }
  return rep;
}

}  // namespace densescan
