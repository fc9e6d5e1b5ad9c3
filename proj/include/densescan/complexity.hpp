#pragma once

#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "densescan/chain.hpp"
#include "densescan/error.hpp"
#include "densescan/euclid.hpp"
#include "densescan/signal.hpp"

namespace densescan {

// Exact ratio arithmetic for speedups; doubles would blur the comparisons
// the reports are built to check.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw DivisibilityError("rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num * b.num, a.den * b.den);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw DivisibilityError("rational: division by zero");
    return Rational(a.num * b.den, a.den * b.num);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return a.num * b.den <= b.num * a.den;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return b <= a;
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

enum class Regime { stride, slide, dilate, relax, stitch };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::stride: return "stride";
    case Regime::slide: return "slide";
    case Regime::dilate: return "dilate";
    case Regime::relax: return "relax";
    case Regime::stitch: return "stitch";
  }
  return "?";
}

struct LayerCounts {
  std::int64_t f = 0;
  std::int64_t g = 0;
};

// Chain whose kernels tally every invocation into a shared ledger. The
// wrapped kernels call the originals once per invocation and nothing else,
// so the tallies are exact.
template <class S>
struct CountingChain {
  ProcessingChain<S> chain;
  std::shared_ptr<std::vector<LayerCounts>> tallies;
};

template <class S>
CountingChain<S> instrument(const ProcessingChain<S>& chain) {
  auto tallies = std::make_shared<std::vector<LayerCounts>>(
      static_cast<std::size_t>(chain.depth()));
  std::vector<ChainLayer<S>> wrapped;
  wrapped.reserve(static_cast<std::size_t>(chain.depth()));
  for (Index j = 1; j <= chain.depth(); ++j) {
    const ChainLayer<S>& ly = chain.layer(j);
    const std::size_t idx = static_cast<std::size_t>(j - 1);
    ChainLayer<S> w;
    w.f = Kernel<S, S>(ly.f.arity,
                       [tallies, idx, fn = ly.f.eval](std::span<const S> win) {
                         ++(*tallies)[idx].f;
                         return fn(win);
                       },
                       ly.f.name);
    w.g = Kernel<S, S>(ly.g.arity,
                       [tallies, idx, fn = ly.g.eval](std::span<const S> win) {
                         ++(*tallies)[idx].g;
                         return fn(win);
                       },
                       ly.g.name);
    wrapped.push_back(std::move(w));
  }
  return {chain.with_layers(std::move(wrapped)), std::move(tallies)};
}

struct EvalCounts {
  Regime regime = Regime::stride;
  Index D = 0;
  std::vector<LayerCounts> measured;
  std::vector<LayerCounts> predicted;
  bool agree = false;
};

// Closed-form invocation counts per layer for one regime at length D.
template <class S>
std::vector<LayerCounts> predicted_counts(const ProcessingChain<S>& chain,
                                          Regime regime, Index D) {
  const Index L = chain.depth();
  const Index B = chain.receptive_field();
  const Index kl = chain.kstar(L);
  if (D < B)
    throw LengthError("predicted_counts: length " + std::to_string(D) +
                      " below receptive field " + std::to_string(B));
  std::vector<LayerCounts> out(static_cast<std::size_t>(L));
  switch (regime) {
    case Regime::stride: {
      const Index windows = D - B + 1;
      for (Index j = 1; j <= L; ++j) {
        out[static_cast<std::size_t>(j - 1)].f =
            windows * (chain.u(j - 1) - chain.c(j) + 1);
        out[static_cast<std::size_t>(j - 1)].g = windows * chain.u(j);
      }
      break;
    }
    case Regime::slide: {
      const DimReport dims = chain_dims(chain, D);
      if (!dims.slide_applicable)
        throw DivisibilityError("predicted_counts: " + dims.slide_reason);
      for (Index j = 1; j <= L; ++j) {
        const Index rows_prev = dims.u_row[static_cast<std::size_t>(j - 1)];
        const Index cols_prev = dims.u_col[static_cast<std::size_t>(j - 1)];
        out[static_cast<std::size_t>(j - 1)].f =
            cols_prev * (rows_prev - chain.c(j) + 1);
        out[static_cast<std::size_t>(j - 1)].g =
            cols_prev * chain.k(j) * dims.u_row[static_cast<std::size_t>(j)];
      }
      break;
    }
    case Regime::dilate: {
      const DimReport dims = chain_dims(chain, D);
      for (Index j = 1; j <= L; ++j) {
        out[static_cast<std::size_t>(j - 1)].f =
            dims.v[static_cast<std::size_t>(j - 1)] -
            chain.kstar(j - 1) * (chain.c(j) - 1);
        out[static_cast<std::size_t>(j - 1)].g =
            dims.v[static_cast<std::size_t>(j)];
      }
      break;
    }
    case Regime::relax: {
      const DimReport dims = chain_dims(chain, D);
      if (!dims.relax_applicable)
        throw DivisibilityError("predicted_counts: " + dims.relax_reason);
      for (Index j = 1; j <= L; ++j) {
        out[static_cast<std::size_t>(j - 1)].f =
            dims.w[static_cast<std::size_t>(j - 1)] - chain.c(j) + 1;
        out[static_cast<std::size_t>(j - 1)].g =
            dims.w[static_cast<std::size_t>(j)];
      }
      break;
    }
    case Regime::stitch: {
      if (!divides(kl, D - B + 1))
        throw DivisibilityError("predicted_counts: stride product k_L* = " +
                                std::to_string(kl) +
                                " does not divide D - B + 1 = " +
                                std::to_string(D - B + 1));
      const std::vector<LayerCounts> per_pass =
          predicted_counts(chain, Regime::relax, D - kl + 1);
      for (Index j = 1; j <= L; ++j) {
        out[static_cast<std::size_t>(j - 1)].f =
            kl * per_pass[static_cast<std::size_t>(j - 1)].f;
        out[static_cast<std::size_t>(j - 1)].g =
            kl * per_pass[static_cast<std::size_t>(j - 1)].g;
      }
      break;
    }
  }
  return out;
}

// Run one regime on the given signal with instrumented kernels and compare
// the tallies with the closed forms. Counts depend only on shapes, never on
// sample values.
template <class S>
EvalCounts count_eval(Regime regime, const ProcessingChain<S>& chain,
                      const Signal<S>& xi) {
  CountingChain<S> counting = instrument(chain);
  const Index B = chain.receptive_field();
  switch (regime) {
    case Regime::stride:
      if (xi.dim() < B)
        throw LengthError("count_eval: signal length " +
                          std::to_string(xi.dim()) +
                          " below receptive field " + std::to_string(B));
      for (Index i = 1; i <= xi.dim() - B + 1; ++i)
        eval_stride(counting.chain, subsignal(xi, B, i));
      break;
    case Regime::slide:
      eval_slide(counting.chain, xi);
      break;
    case Regime::dilate:
      eval_dilate(counting.chain, xi);
      break;
    case Regime::relax:
      eval_relax(counting.chain, xi);
      break;
    case Regime::stitch:
      shift_and_stitch(counting.chain, xi);
      break;
  }
  EvalCounts out;
  out.regime = regime;
  out.D = xi.dim();
  out.measured = *counting.tallies;
  out.predicted = predicted_counts(chain, regime, xi.dim());
  out.agree = true;
  for (std::size_t j = 0; j < out.measured.size(); ++j)
    if (out.measured[j].f != out.predicted[j].f ||
        out.measured[j].g != out.predicted[j].g)
      out.agree = false;
  return out;
}

// Same, on a probe signal of D copies of the dummy sample.
template <class S>
EvalCounts count_eval(Regime regime, const ProcessingChain<S>& chain,
                      Index D) {
  if (D < chain.receptive_field())
    throw LengthError("count_eval: length " + std::to_string(D) +
                      " below receptive field " +
                      std::to_string(chain.receptive_field()));
  return count_eval(regime, chain,
                    Signal<S>(std::vector<S>(static_cast<std::size_t>(D),
                                             chain.dummy())));
}

struct Speedups {
  Rational f;
  Rational g;
};

// Per-window cost over sliding cost at layer j; exact, and >= 1 whenever
// both regimes apply.
template <class S>
Speedups speedup(const ProcessingChain<S>& chain, Index D, Index j) {
  if (j < 1 || j > chain.depth())
    throw IndexOutOfRange("speedup: layer out of range");
  const std::vector<LayerCounts> naive =
      predicted_counts(chain, Regime::stride, D);
  const std::vector<LayerCounts> fast =
      predicted_counts(chain, Regime::slide, D);
  const std::size_t idx = static_cast<std::size_t>(j - 1);
  return {Rational(naive[idx].f, fast[idx].f),
          Rational(naive[idx].g, fast[idx].g)};
}

// Limits of the sliding-mode speedups as D grows.
template <class S>
Speedups speedup_limit(const ProcessingChain<S>& chain, Index j) {
  if (j < 1 || j > chain.depth())
    throw IndexOutOfRange("speedup_limit: layer out of range");
  return {Rational(chain.u(j - 1) - chain.c(j) + 1), Rational(chain.u(j))};
}

enum class Passes { one, full };

// Cost of the multipass stitched scan over the sliding cost at layer j;
// Passes::one prices a single pass instead of all k_L* of them.
template <class S>
Speedups speedup_stitch(const ProcessingChain<S>& chain, Index D, Index j,
                        Passes passes) {
  if (j < 1 || j > chain.depth())
    throw IndexOutOfRange("speedup_stitch: layer out of range");
  const Index kl = chain.kstar(chain.depth());
  const std::vector<LayerCounts> stitched =
      predicted_counts(chain, Regime::stitch, D);
  const std::vector<LayerCounts> fast =
      predicted_counts(chain, Regime::slide, D);
  const std::size_t idx = static_cast<std::size_t>(j - 1);
  Rational sf(stitched[idx].f, fast[idx].f);
  Rational sg(stitched[idx].g, fast[idx].g);
  if (passes == Passes::one) {
    sf = sf / Rational(kl);
    sg = sg / Rational(kl);
  }
  return {sf, sg};
}

// Limits of the stitched-scan cost ratios as D grows.
template <class S>
Speedups speedup_stitch_limit(const ProcessingChain<S>& chain, Index j,
                              Passes passes) {
  if (j < 1 || j > chain.depth())
    throw IndexOutOfRange("speedup_stitch_limit: layer out of range");
  const Index kl = chain.kstar(chain.depth());
  Rational sf(kl, chain.kstar(j - 1));
  Rational sg(kl, chain.kstar(j));
  if (passes == Passes::one) {
    sf = sf / Rational(kl);
    sg = sg / Rational(kl);
  }
  return {sf, sg};
}

struct ReportRow {
  Index D = 0;
  Index layer = 0;
  Regime regime = Regime::stride;
  std::int64_t f_measured = 0;
  std::int64_t f_predicted = 0;
  std::int64_t g_measured = 0;
  std::int64_t g_predicted = 0;
  Rational s_f{1};
  Rational s_g{1};
  Rational limit_f{1};
  Rational limit_g{1};
  bool monotone_f = true;  // vs previous row of same layer and regime
  bool monotone_g = true;
};

// Measured-vs-predicted counts and cost ratios for every regime, layer and
// length in [d_from, d_to]; lengths where a regime's divisibility fails get
// no rows for that regime. Ratios compare against the sliding regime, so
// stride rows carry the slide speedup and dilate/stitch rows their own
// cost ratios.
template <class S>
std::vector<ReportRow> emit_report(const ProcessingChain<S>& chain,
                                   Index d_from, Index d_to, Index d_step) {
  const Index B = chain.receptive_field();
  const Index L = chain.depth();
  if (d_step < 1) throw LengthError("emit_report: step must be >= 1");
  if (d_from < B)
    throw LengthError("emit_report: range starts below the receptive field " +
                      std::to_string(B));
  std::vector<ReportRow> rows;
  // last seen ratios, keyed by (regime, layer)
  std::vector<std::vector<Rational>> prev_f(5), prev_g(5);
  std::vector<std::vector<bool>> seen(5);
  for (auto* v : {&prev_f, &prev_g})
    for (auto& per : *v) per.assign(static_cast<std::size_t>(L), Rational(0));
  for (auto& per : seen) per.assign(static_cast<std::size_t>(L), false);

  for (Index D = d_from; D <= d_to; D += d_step) {
    const bool slide_ok = divides(chain.kstar(L), D - B + 1);
    for (Regime regime : {Regime::stride, Regime::slide, Regime::dilate,
                          Regime::stitch}) {
      if ((regime == Regime::slide || regime == Regime::stitch) && !slide_ok)
        continue;
      const EvalCounts counts = count_eval<S>(regime, chain, D);
      for (Index j = 1; j <= L; ++j) {
        const std::size_t idx = static_cast<std::size_t>(j - 1);
        ReportRow row;
        row.D = D;
        row.layer = j;
        row.regime = regime;
        row.f_measured = counts.measured[idx].f;
        row.f_predicted = counts.predicted[idx].f;
        row.g_measured = counts.measured[idx].g;
        row.g_predicted = counts.predicted[idx].g;
        switch (regime) {
          case Regime::stride:
          case Regime::slide:
          case Regime::dilate:
            if (slide_ok) {
              const Speedups s = speedup(chain, D, j);
              row.s_f = s.f;
              row.s_g = s.g;
            } else {
              row.s_f = Rational(1);
              row.s_g = Rational(1);
            }
            {
              const Speedups lim = speedup_limit(chain, j);
              row.limit_f = lim.f;
              row.limit_g = lim.g;
            }
            break;
          case Regime::stitch: {
            const Speedups s = speedup_stitch(chain, D, j, Passes::full);
            const Speedups lim =
                speedup_stitch_limit(chain, j, Passes::full);
            row.s_f = s.f;
            row.s_g = s.g;
            row.limit_f = lim.f;
            row.limit_g = lim.g;
            break;
          }
          case Regime::relax:
            break;
        }
        if (slide_ok) {  // placeholder ratios stay out of the bookkeeping
          const std::size_t rix = static_cast<std::size_t>(regime);
          if (seen[rix][idx]) {
            row.monotone_f = !(row.s_f < prev_f[rix][idx]);
            row.monotone_g = !(row.s_g < prev_g[rix][idx]);
          }
          seen[rix][idx] = true;
          prev_f[rix][idx] = row.s_f;
          prev_g[rix][idx] = row.s_g;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

inline void write_report_csv(std::ostream& os,
                             const std::vector<ReportRow>& rows) {
  os << "D,layer,regime,f_measured,f_predicted,g_measured,g_predicted,"
        "S_f_num,S_f_den,S_g_num,S_g_den,limit_f,limit_g\n";
  for (const ReportRow& row : rows) {
    os << row.D << ',' << row.layer << ',' << regime_name(row.regime) << ','
       << row.f_measured << ',' << row.f_predicted << ',' << row.g_measured
       << ',' << row.g_predicted << ',' << row.s_f.num << ',' << row.s_f.den
       << ',' << row.s_g.num << ',' << row.s_g.den << ',' << row.limit_f.str()
       << ',' << row.limit_g.str() << '\n';
  }
}

}  // namespace densescan
