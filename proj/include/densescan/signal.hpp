#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "densescan/error.hpp"
#include "densescan/euclid.hpp"

namespace densescan {

// One sample with m real channels.
using Channels = std::vector<double>;

// Per-sample validation hook, run on construction of every Signal / matrix.
// Numeric instantiations reject NaN; everything else is accepted verbatim.
template <class S>
struct SampleTraits {
  static void validate(const S&) {}
};

template <>
struct SampleTraits<double> {
  static void validate(const double& x) {
    if (std::isnan(x)) throw BadSample("NaN sample rejected");
  }
};

template <>
struct SampleTraits<Channels> {
  static void validate(const Channels& x) {
    for (double v : x)
      if (std::isnan(v)) throw BadSample("NaN sample rejected");
  }
};

// Sample-algebra descriptor. Operators that materialize new samples out of
// thin air (spreading, Dirichlet padding) need a designated zero; sample
// types without a specialization fail at runtime with NoZeroElement.
template <class S>
struct SampleAlgebra {
  static constexpr bool has_zero = false;
  static S zero_like(const S&) {
    throw NoZeroElement("sample algebra of this type has no zero element");
  }
};

template <>
struct SampleAlgebra<double> {
  static constexpr bool has_zero = true;
  static double zero_like(const double&) { return 0.0; }
  static double zero() { return 0.0; }
  static double add(double a, double b) { return a + b; }
  static double mul(double a, double b) { return a * b; }
  static bool less(double a, double b) { return a < b; }
};

template <>
struct SampleAlgebra<Channels> {
  static constexpr bool has_zero = true;
  // Zero is shaped like its neighbors: one 0.0 per channel.
  static Channels zero_like(const Channels& exemplar) {
    return Channels(exemplar.size(), 0.0);
  }
};

template <>
struct SampleAlgebra<std::int64_t> {
  static constexpr bool has_zero = true;
  static std::int64_t zero_like(const std::int64_t&) { return 0; }
  static std::int64_t zero() { return 0; }
  static std::int64_t add(std::int64_t a, std::int64_t b) { return a + b; }
  static std::int64_t mul(std::int64_t a, std::int64_t b) { return a * b; }
  static bool less(std::int64_t a, std::int64_t b) { return a < b; }
};

// Non-empty finite sequence of samples. All indices in the public API are
// 1-based.
template <class S>
class Signal {
 public:
  explicit Signal(std::vector<S> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw LengthError("signal must be non-empty");
    for (const S& s : samples_) SampleTraits<S>::validate(s);
  }

  Index dim() const { return static_cast<Index>(samples_.size()); }

  const S& operator[](Index i) const {
    if (i < 1 || i > dim())
      throw IndexOutOfRange("signal index " + std::to_string(i) +
                            " outside [1, " + std::to_string(dim()) + "]");
    return samples_[static_cast<std::size_t>(i - 1)];
  }

  const std::vector<S>& samples() const { return samples_; }

  friend bool operator==(const Signal& a, const Signal& b) {
    return a.samples_ == b.samples_;
  }

 private:
  std::vector<S> samples_;
};

// Rectangular block of samples: columns are fragments, rows are the sample
// positions inside each fragment. Stored as one contiguous row-major block.
template <class S>
class FragmentedSignal {
 public:
  FragmentedSignal(Index rows, Index cols, std::vector<S> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ < 1 || cols_ < 1)
      throw LengthError("fragmented signal needs rows >= 1 and cols >= 1");
    if (static_cast<Index>(entries_.size()) != rows_ * cols_)
      throw ShapeError("entry count " + std::to_string(entries_.size()) +
                       " does not match " + std::to_string(rows_) + "x" +
                       std::to_string(cols_));
    for (const S& s : entries_) SampleTraits<S>::validate(s);
  }

  static FragmentedSignal from_signal(const Signal<S>& xi) {
    return FragmentedSignal(xi.dim(), 1, xi.samples());
  }

  Index rdim() const { return rows_; }
  Index cdim() const { return cols_; }

  const S& at(Index row, Index col) const {
    check(row, col);
    return entries_[static_cast<std::size_t>((row - 1) * cols_ + (col - 1))];
  }

  S& at(Index row, Index col) {
    check(row, col);
    return entries_[static_cast<std::size_t>((row - 1) * cols_ + (col - 1))];
  }

  // Fragment = one column, viewed as a signal.
  Signal<S> fragment(Index col) const {
    if (col < 1 || col > cols_)
      throw IndexOutOfRange("fragment index " + std::to_string(col) +
                            " outside [1, " + std::to_string(cols_) + "]");
    std::vector<S> out;
    out.reserve(static_cast<std::size_t>(rows_));
    for (Index r = 1; r <= rows_; ++r) out.push_back(at(r, col));
    return Signal<S>(std::move(out));
  }

  Signal<S> to_signal() const {
    if (cols_ != 1)
      throw ShapeError("expected a single fragment, have " +
                       std::to_string(cols_));
    return fragment(1);
  }

  const std::vector<S>& entries() const { return entries_; }

  friend bool operator==(const FragmentedSignal& a, const FragmentedSignal& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  void check(Index row, Index col) const {
    if (row < 1 || row > rows_ || col < 1 || col > cols_)
      throw IndexOutOfRange("entry (" + std::to_string(row) + ", " +
                            std::to_string(col) + ") outside " +
                            std::to_string(rows_) + "x" +
                            std::to_string(cols_));
  }

  Index rows_;
  Index cols_;
  std::vector<S> entries_;
};

// Contiguous run of d samples starting at position i.
// Composition collapses: subsignal(subsignal(xi,d,i),c,j) =
// subsignal(xi,c,i+j-1).
template <class S>
Signal<S> subsignal(const Signal<S>& xi, Index d, Index i) {
  if (d < 1) throw LengthError("subsignal length must be >= 1");
  if (xi.dim() < d)
    throw LengthError("signal of length " + std::to_string(xi.dim()) +
                      " has no subsignal of length " + std::to_string(d));
  if (i < 1 || i > xi.dim() - d + 1)
    throw IndexOutOfRange("subsignal index " + std::to_string(i) +
                          " outside [1, " + std::to_string(xi.dim() - d + 1) +
                          "]");
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(d));
  for (Index nu = 1; nu <= d; ++nu) out.push_back(xi[i + nu - 1]);
  return Signal<S>(std::move(out));
}

// Column stacking: vec(chi)_j = chi_{rem(j-1,a)+1, div(j-1,a)+1}.
template <class S>
Signal<S> vectorize(const FragmentedSignal<S>& chi) {
  const Index a = chi.rdim();
  const Index total = chi.rdim() * chi.cdim();
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(total));
  for (Index j = 1; j <= total; ++j) {
    auto [q, r] = euclid_divmod(j - 1, a);
    out.push_back(chi.at(r + 1, q + 1));
  }
  return Signal<S>(std::move(out));
}

// Inverse of vectorize: result_{i,j} = xi_{(j-1)a + i}.
template <class S>
FragmentedSignal<S> unvectorize(const Signal<S>& xi, Index a, Index b) {
  if (a < 1 || b < 1) throw ShapeError("unvectorize needs a >= 1 and b >= 1");
  if (xi.dim() != a * b)
    throw ShapeError("cannot reshape " + std::to_string(xi.dim()) +
                     " samples into " + std::to_string(a) + "x" +
                     std::to_string(b));
  std::vector<S> entries(static_cast<std::size_t>(a * b), xi[1]);
  FragmentedSignal<S> out(a, b, std::move(entries));
  for (Index i = 1; i <= a; ++i)
    for (Index j = 1; j <= b; ++j) out.at(i, j) = xi[(j - 1) * a + i];
  return out;
}

}  // namespace densescan
