#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "densescan/error.hpp"
#include "densescan/euclid.hpp"
#include "densescan/signal.hpp"

namespace densescan {

// Row-major grid of samples, 1-based on both axes.
template <class S>
class Image {
 public:
  Image(Index rows, Index cols, std::vector<S> px)
      : rows_(rows), cols_(cols), px_(std::move(px)) {
    if (rows_ < 1 || cols_ < 1)
      throw ShapeError("image: dimensions must be >= 1");
    if (static_cast<Index>(px_.size()) != rows_ * cols_)
      throw ShapeError("image: " + std::to_string(px_.size()) +
                       " pixels for a " + std::to_string(rows_) + "x" +
                       std::to_string(cols_) + " grid");
    for (const S& v : px_) SampleTraits<S>::validate(v);
  }

  static Image filled(Index rows, Index cols, const S& value) {
    if (rows < 1 || cols < 1)
      throw ShapeError("image: dimensions must be >= 1");
    return Image(rows, cols,
                 std::vector<S>(static_cast<std::size_t>(rows * cols), value));
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  const S& at(Index i, Index j) const {
    check(i, j);
    return px_[static_cast<std::size_t>((i - 1) * cols_ + (j - 1))];
  }
  S& at(Index i, Index j) {
    check(i, j);
    return px_[static_cast<std::size_t>((i - 1) * cols_ + (j - 1))];
  }

  const std::vector<S>& pixels() const { return px_; }

  friend bool operator==(const Image& a, const Image& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.px_ == b.px_;
  }

 private:
  void check(Index i, Index j) const {
    if (i < 1 || i > rows_ || j < 1 || j > cols_)
      throw IndexOutOfRange("image: (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") outside " +
                            std::to_string(rows_) + "x" +
                            std::to_string(cols_));
  }

  Index rows_;
  Index cols_;
  std::vector<S> px_;
};

// dr x dc window with top-left corner at (i, j).
template <class S>
Image<S> patch(const Image<S>& xi, Index dr, Index dc, Index i, Index j) {
  if (dr < 1 || dc < 1) throw LengthError("patch: window must be >= 1x1");
  if (dr > xi.rows() || dc > xi.cols())
    throw LengthError("patch: window exceeds the image");
  if (i < 1 || j < 1 || i + dr - 1 > xi.rows() || j + dc - 1 > xi.cols())
    throw IndexOutOfRange("patch: corner (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") outside valid range");
  std::vector<S> px;
  px.reserve(static_cast<std::size_t>(dr * dc));
  for (Index r = 0; r < dr; ++r)
    for (Index c = 0; c < dc; ++c) px.push_back(xi.at(i + r, j + c));
  return Image<S>(dr, dc, std::move(px));
}

template <class In, class Out = In>
struct Kernel2D {
  Index rows = 1;
  Index cols = 1;
  std::function<Out(const Image<In>&)> eval;
  std::string name;

  Kernel2D() = default;
  Kernel2D(Index r, Index c, std::function<Out(const Image<In>&)> fn,
           std::string label = "")
      : rows(r), cols(c), eval(std::move(fn)), name(std::move(label)) {
    if (rows < 1 || cols < 1)
      throw IllFormedChain("kernel2d: window must be >= 1x1");
    if (!eval) throw IllFormedChain("kernel2d: missing function");
  }
};

// Every window position, both axes.
template <class S, class Out>
Image<Out> slide2d(const Kernel2D<S, Out>& f, const Image<S>& xi) {
  if (xi.rows() < f.rows || xi.cols() < f.cols)
    throw LengthError("slide2d: image smaller than the window");
  const Index out_r = xi.rows() - f.rows + 1;
  const Index out_c = xi.cols() - f.cols + 1;
  std::vector<Out> px;
  px.reserve(static_cast<std::size_t>(out_r * out_c));
  for (Index i = 1; i <= out_r; ++i)
    for (Index j = 1; j <= out_c; ++j)
      px.push_back(f.eval(patch(xi, f.rows, f.cols, i, j)));
  return Image<Out>(out_r, out_c, std::move(px));
}

// Non-overlapping blocks; both axes must divide evenly.
template <class S, class Out>
Image<Out> stride2d(const Kernel2D<S, Out>& g, const Image<S>& xi) {
  if (!divides(g.rows, xi.rows()) || !divides(g.cols, xi.cols()))
    throw DivisibilityError("stride2d: window " + std::to_string(g.rows) +
                            "x" + std::to_string(g.cols) +
                            " does not tile " + std::to_string(xi.rows()) +
                            "x" + std::to_string(xi.cols()));
  const Index out_r = xi.rows() / g.rows;
  const Index out_c = xi.cols() / g.cols;
  std::vector<Out> px;
  px.reserve(static_cast<std::size_t>(out_r * out_c));
  for (Index i = 1; i <= out_r; ++i)
    for (Index j = 1; j <= out_c; ++j)
      px.push_back(g.eval(patch(xi, g.rows, g.cols, (i - 1) * g.rows + 1,
                                (j - 1) * g.cols + 1)));
  return Image<Out>(out_r, out_c, std::move(px));
}

template <class S>
struct Layer2D {
  Kernel2D<S, S> f;
  Kernel2D<S, S> g;
};

// Planar layer stack; the receptive field and length profiles are derived
// per axis exactly as in the one-dimensional chain.
template <class S>
class Chain2D {
 public:
  Chain2D(std::vector<Layer2D<S>> layers, S zeta)
      : layers_(std::move(layers)), zeta_(std::move(zeta)) {
    const Index L = depth();
    if (L < 1) throw IllFormedChain("chain2d: needs at least one layer");
    u_r_.assign(static_cast<std::size_t>(L + 1), 1);
    u_c_.assign(static_cast<std::size_t>(L + 1), 1);
    for (Index j = L; j >= 1; --j) {
      u_r_[static_cast<std::size_t>(j - 1)] =
          layer(j).g.rows * u_r_[static_cast<std::size_t>(j)] +
          layer(j).f.rows - 1;
      u_c_[static_cast<std::size_t>(j - 1)] =
          layer(j).g.cols * u_c_[static_cast<std::size_t>(j)] +
          layer(j).f.cols - 1;
    }
    kstar_r_.assign(static_cast<std::size_t>(L + 1), 1);
    kstar_c_.assign(static_cast<std::size_t>(L + 1), 1);
    for (Index j = 1; j <= L; ++j) {
      kstar_r_[static_cast<std::size_t>(j)] =
          kstar_r_[static_cast<std::size_t>(j - 1)] * layer(j).g.rows;
      kstar_c_[static_cast<std::size_t>(j)] =
          kstar_c_[static_cast<std::size_t>(j - 1)] * layer(j).g.cols;
    }
  }

  Index depth() const { return static_cast<Index>(layers_.size()); }

  const Layer2D<S>& layer(Index j) const {
    if (j < 1 || j > depth())
      throw IndexOutOfRange("chain2d: layer index out of range");
    return layers_[static_cast<std::size_t>(j - 1)];
  }

  Index kstar_rows(Index j) const {
    return kstar_r_[static_cast<std::size_t>(j)];
  }
  Index kstar_cols(Index j) const {
    return kstar_c_[static_cast<std::size_t>(j)];
  }
  Index u_rows(Index j) const { return u_r_[static_cast<std::size_t>(j)]; }
  Index u_cols(Index j) const { return u_c_[static_cast<std::size_t>(j)]; }
  Index field_rows() const { return u_r_[0]; }
  Index field_cols() const { return u_c_[0]; }
  const S& dummy() const { return zeta_; }

 private:
  std::vector<Layer2D<S>> layers_;
  S zeta_;
  std::vector<Index> u_r_, u_c_, kstar_r_, kstar_c_;
};

// Patch mode: the input must be exactly one receptive field; output is 1x1.
template <class S>
Image<S> eval_stride2d(const Chain2D<S>& chain, const Image<S>& rho) {
  if (rho.rows() != chain.field_rows() || rho.cols() != chain.field_cols())
    throw LengthError("eval_stride2d: patch must be " +
                      std::to_string(chain.field_rows()) + "x" +
                      std::to_string(chain.field_cols()));
  Image<S> cur = rho;
  for (Index j = 1; j <= chain.depth(); ++j)
    cur = stride2d(chain.layer(j).g, slide2d(chain.layer(j).f, cur));
  return cur;
}

// Grid of interleaved fragments; fragment (gr, gc) sits at linear position
// (gr-1) * grid_cols + gc.
template <class S>
struct Fragmented2D {
  Index grid_rows = 1;
  Index grid_cols = 1;
  std::vector<Image<S>> frags;

  const Image<S>& at(Index gr, Index gc) const {
    if (gr < 1 || gr > grid_rows || gc < 1 || gc > grid_cols)
      throw IndexOutOfRange("fragments: grid index out of range");
    return frags[static_cast<std::size_t>((gr - 1) * grid_cols + (gc - 1))];
  }
};

template <class S>
Image<S> transpose(const Image<S>& xi) {
  std::vector<S> px;
  px.reserve(xi.pixels().size());
  for (Index j = 1; j <= xi.cols(); ++j)
    for (Index i = 1; i <= xi.rows(); ++i) px.push_back(xi.at(i, j));
  return Image<S>(xi.cols(), xi.rows(), std::move(px));
}

template <class S>
Fragmented2D<S> transpose(const Fragmented2D<S>& chi) {
  Fragmented2D<S> out;
  out.grid_rows = chi.grid_cols;
  out.grid_cols = chi.grid_rows;
  out.frags.reserve(chi.frags.size());
  for (Index gr = 1; gr <= out.grid_rows; ++gr)
    for (Index gc = 1; gc <= out.grid_cols; ++gc)
      out.frags.push_back(transpose(chi.at(gc, gr)));
  return out;
}

// Split every fragment into k interleaved fragments along the row axis;
// same index law as the one-dimensional fragmentation, applied to the pair
// (pixel row, grid row).
template <class S>
Fragmented2D<S> fragment2d_rows(Index k, const Fragmented2D<S>& chi) {
  const Index R = chi.frags.front().rows();
  const Index G = chi.grid_rows;
  if (k < 1 || !divides(k, R))
    throw DivisibilityError("fragment2d: factor " + std::to_string(k) +
                            " does not divide " + std::to_string(R) +
                            " rows");
  Fragmented2D<S> out;
  out.grid_rows = G * k;
  out.grid_cols = chi.grid_cols;
  for (Index gr = 1; gr <= out.grid_rows; ++gr) {
    for (Index gc = 1; gc <= out.grid_cols; ++gc) {
      const Image<S>& probe = chi.at(1, gc);
      std::vector<S> px;
      px.reserve(static_cast<std::size_t>((R / k) * probe.cols()));
      for (Index r = 1; r <= R / k; ++r) {
        const Index flat = (r - 1) * k * G + gr - 1;
        const Index src_r = euclid_div(flat, G) + 1;
        const Index src_gr = euclid_rem(flat, G) + 1;
        for (Index c = 1; c <= probe.cols(); ++c)
          px.push_back(chi.at(src_gr, gc).at(src_r, c));
      }
      out.frags.emplace_back(R / k, probe.cols(), std::move(px));
    }
  }
  return out;
}

// Inverse of fragment2d_rows: merge groups of k fragments back along the
// row axis.
template <class S>
Fragmented2D<S> defragment2d_rows(Index k, const Fragmented2D<S>& chi) {
  const Index R = chi.frags.front().rows();
  const Index G = chi.grid_rows;
  if (k < 1 || !divides(k, G))
    throw DivisibilityError("defragment2d: factor " + std::to_string(k) +
                            " does not divide " + std::to_string(G) +
                            " fragments");
  Fragmented2D<S> out;
  out.grid_rows = G / k;
  out.grid_cols = chi.grid_cols;
  for (Index gr = 1; gr <= out.grid_rows; ++gr) {
    for (Index gc = 1; gc <= out.grid_cols; ++gc) {
      const Image<S>& probe = chi.at(1, gc);
      std::vector<S> px;
      px.reserve(static_cast<std::size_t>(R * k * probe.cols()));
      for (Index r = 1; r <= R * k; ++r) {
        const Index flat = (r - 1) * (G / k) + gr - 1;
        const Index src_r = euclid_div(flat, G) + 1;
        const Index src_gr = euclid_rem(flat, G) + 1;
        for (Index c = 1; c <= probe.cols(); ++c)
          px.push_back(chi.at(src_gr, gc).at(src_r, c));
      }
      out.frags.emplace_back(R * k, probe.cols(), std::move(px));
    }
  }
  return out;
}

template <class S>
Fragmented2D<S> fragment2d(Index k_rows, Index k_cols,
                           const Fragmented2D<S>& chi) {
  return transpose(
      fragment2d_rows(k_cols, transpose(fragment2d_rows(k_rows, chi))));
}

template <class S>
Fragmented2D<S> defragment2d(Index k_rows, Index k_cols,
                             const Fragmented2D<S>& chi) {
  return transpose(
      defragment2d_rows(k_cols, transpose(defragment2d_rows(k_rows, chi))));
}

// Sliding mode on the fragment grid: both kernels slide over every
// fragment, then the grid splits by the pooling window on both axes.
template <class S>
Fragmented2D<S> eval_slide2d(const Chain2D<S>& chain, const Image<S>& xi) {
  const Index L = chain.depth();
  if (xi.rows() < chain.field_rows() || xi.cols() < chain.field_cols())
    throw LengthError("eval_slide2d: image smaller than the receptive field");
  if (!divides(chain.kstar_rows(L), xi.rows() - chain.field_rows() + 1) ||
      !divides(chain.kstar_cols(L), xi.cols() - chain.field_cols() + 1))
    throw DivisibilityError(
        "eval_slide2d: stride products " +
        std::to_string(chain.kstar_rows(L)) + "x" +
        std::to_string(chain.kstar_cols(L)) + " must divide " +
        std::to_string(xi.rows() - chain.field_rows() + 1) + "x" +
        std::to_string(xi.cols() - chain.field_cols() + 1));
  Fragmented2D<S> cur;
  cur.frags.push_back(xi);
  for (Index j = 1; j <= L; ++j) {
    const Layer2D<S>& ly = chain.layer(j);
    Fragmented2D<S> next;
    next.grid_rows = cur.grid_rows;
    next.grid_cols = cur.grid_cols;
    next.frags.reserve(cur.frags.size());
    for (const Image<S>& frag : cur.frags)
      next.frags.push_back(slide2d(ly.g, slide2d(ly.f, frag)));
    cur = fragment2d(ly.g.rows, ly.g.cols, next);
  }
  return cur;
}

// Dense planar scan: stuff both axes to divisibility, run sliding mode,
// merge the grid, drop the surplus band at the bottom and right. Pixel
// (i, j) equals eval_stride2d on the patch at (i, j).
template <class S>
Image<S> exact_scan2d(const Chain2D<S>& chain, const Image<S>& xi) {
  const Index L = chain.depth();
  const Index br = chain.field_rows();
  const Index bc = chain.field_cols();
  if (xi.rows() < br || xi.cols() < bc)
    throw LengthError("exact_scan2d: image smaller than the receptive field");
  const Index kr = chain.kstar_rows(L);
  const Index kc = chain.kstar_cols(L);
  const Index rem_r = euclid_rem(xi.rows() - br + 1, kr);
  const Index rem_c = euclid_rem(xi.cols() - bc + 1, kc);
  const Index pad_r = rem_r == 0 ? 0 : kr - rem_r;
  const Index pad_c = rem_c == 0 ? 0 : kc - rem_c;

  std::vector<S> px;
  px.reserve(static_cast<std::size_t>((xi.rows() + pad_r) *
                                      (xi.cols() + pad_c)));
  for (Index i = 1; i <= xi.rows() + pad_r; ++i)
    for (Index j = 1; j <= xi.cols() + pad_c; ++j)
      px.push_back(i <= xi.rows() && j <= xi.cols() ? xi.at(i, j)
                                                    : chain.dummy());
  const Image<S> stuffed(xi.rows() + pad_r, xi.cols() + pad_c, std::move(px));

  const Fragmented2D<S> frag = eval_slide2d(chain, stuffed);
  const Fragmented2D<S> merged = defragment2d(kr, kc, frag);
  if (merged.grid_rows != 1 || merged.grid_cols != 1)
    throw std::logic_error("exact_scan2d: merge left a fragment grid");
  const Image<S>& dense = merged.frags.front();

  const Index out_r = xi.rows() - br + 1;
  const Index out_c = xi.cols() - bc + 1;
  if (dense.rows() != out_r + pad_r || dense.cols() != out_c + pad_c)
    throw std::logic_error("exact_scan2d: unexpected dense shape");
  return patch(dense, out_r, out_c, 1, 1);
}

}  // namespace densescan
