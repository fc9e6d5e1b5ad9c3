#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "densescan/chain.hpp"
#include "densescan/complexity.hpp"
#include "densescan/error.hpp"
#include "densescan/euclid.hpp"
#include "densescan/multiscale.hpp"
#include "densescan/nsf.hpp"
#include "densescan/numeric.hpp"
#include "densescan/resample.hpp"
#include "densescan/signal.hpp"
#include "densescan/splitmix64.hpp"
#include "densescan/windowed.hpp"

namespace densescan {

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::int64_t trials = 200;
  Index max_l = 3;  // layers per random chain
  Index max_c = 3;  // window width per layer
  Index max_k = 3;  // pool width per layer
  Index max_d = 64; // signal length
};

struct SuiteResult {
  std::string name;
  std::int64_t checks = 0;
  std::int64_t failures = 0;
  std::string first_failure;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<SuiteResult> suites;
  std::int64_t mixed_trim = 0;   // trimming-branch dispatches seen
  std::int64_t mixed_stuff = 0;  // stuffing-branch dispatches seen

  bool pass() const {
    for (const SuiteResult& s : suites)
      if (s.failures > 0) return false;
    return true;
  }

  std::string to_text() const {
    std::string out = "dense-scan self-check\n";
    out += "seed=" + std::to_string(options.seed) +
           " trials=" + std::to_string(options.trials) +
           " max-l=" + std::to_string(options.max_l) +
           " max-c=" + std::to_string(options.max_c) +
           " max-k=" + std::to_string(options.max_k) +
           " max-d=" + std::to_string(options.max_d) + "\n";
    for (const SuiteResult& s : suites) {
      out += "suite " + s.name + ": checks=" + std::to_string(s.checks) +
             " failures=" + std::to_string(s.failures);
      if (s.name == "mixed-vs-downsample")
        out += " (trim-branch=" + std::to_string(mixed_trim) +
               ", stuff-branch=" + std::to_string(mixed_stuff) + ")";
      out += "\n";
      if (s.failures > 0) out += "  first failure: " + s.first_failure + "\n";
    }
    for (const SuiteResult& s : suites)
      if (s.checks == 0)
        out += "warning: suite " + s.name +
               " ran 0 checks; size caps leave it nothing to do\n";
    out += pass() ? "result: PASS\n" : "result: FAIL\n";
    return out;
  }
};

namespace detail {

enum class SuiteId {
  exact_scan,
  dilated,
  relaxed,
  stitched,
  mixed,
  dummy_independence,
  placement,
  fragments,
  dims,
  counts,
  multiscale,
  upsampling,
  kSuiteCount
};

inline const char* suite_name(SuiteId id) {
  switch (id) {
    case SuiteId::exact_scan: return "exact-scan-vs-per-window";
    case SuiteId::dilated: return "dilated-vs-exact-scan";
    case SuiteId::relaxed: return "relaxed-vs-downsample";
    case SuiteId::stitched: return "stitched-passes-vs-sliding";
    case SuiteId::mixed: return "mixed-vs-downsample";
    case SuiteId::dummy_independence: return "dummy-value-independence";
    case SuiteId::placement: return "fragment-placement-law";
    case SuiteId::fragments: return "fragment-algebra";
    case SuiteId::dims: return "dimension-report";
    case SuiteId::counts: return "counts-and-ratios";
    case SuiteId::multiscale: return "multiscale-pairing";
    case SuiteId::upsampling: return "upsampling-theorems";
    default: return "?";
  }
}

struct Suite {
  SuiteResult result;

  template <class Fn>
  void check(bool ok, Fn&& why) {
    ++result.checks;
    if (!ok) {
      ++result.failures;
      if (result.failures == 1) result.first_failure = why();
    }
  }
};

struct VerifyState {
  std::vector<Suite> suites;
  std::int64_t mixed_trim = 0;
  std::int64_t mixed_stuff = 0;

  VerifyState() : suites(static_cast<std::size_t>(SuiteId::kSuiteCount)) {
    for (std::size_t n = 0; n < suites.size(); ++n)
      suites[n].result.name = suite_name(static_cast<SuiteId>(n));
  }

  Suite& at(SuiteId id) { return suites[static_cast<std::size_t>(id)]; }
};

// --- random material ----------------------------------------------------
// Doubles live on the quarter grid so every kernel result is exact and
// signed zeros and infinities never appear.

template <class S>
S random_sample(SplitMix64& rng) {
  if constexpr (std::is_same_v<S, double>)
    return static_cast<double>(rng.range(-32, 32)) / 4.0;
  else
    return rng.range(-9, 9);
}

template <class S>
Signal<S> random_signal(SplitMix64& rng, Index d) {
  std::vector<S> values;
  values.reserve(static_cast<std::size_t>(d));
  for (Index n = 0; n < d; ++n) values.push_back(random_sample<S>(rng));
  return Signal<S>(std::move(values));
}

inline Signal<Channels> random_channel_signal(SplitMix64& rng, Index d,
                                              Index m) {
  std::vector<Channels> values;
  values.reserve(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    Channels ch;
    ch.reserve(static_cast<std::size_t>(m));
    for (Index l = 0; l < m; ++l) ch.push_back(random_sample<double>(rng));
    values.push_back(std::move(ch));
  }
  return Signal<Channels>(std::move(values));
}

template <class S>
Kernel<S, S> pool_kernel(SplitMix64& rng, Index arity) {
  const Index picks = std::is_same_v<S, double> ? 6 : 5;
  switch (rng.range(0, picks - 1)) {
    case 0:
      return Kernel<S, S>(arity,
                          [](std::span<const S> w) {
                            S acc = w[0];
                            for (std::size_t n = 1; n < w.size(); ++n)
                              acc = acc + w[n];
                            return acc;
                          },
                          "sum");
    case 1:
      return Kernel<S, S>(arity,
                          [](std::span<const S> w) {
                            S acc = w[0];
                            for (std::size_t n = 1; n < w.size(); ++n)
                              if (w[n] > acc) acc = w[n];
                            return acc;
                          },
                          "max");
    case 2:
      return Kernel<S, S>(arity,
                          [](std::span<const S> w) {
                            S acc = w[0];
                            for (std::size_t n = 1; n < w.size(); ++n)
                              if (w[n] < acc) acc = w[n];
                            return acc;
                          },
                          "min");
    case 3:
      return Kernel<S, S>(arity, [](std::span<const S> w) { return w[0]; },
                          "first");
    case 4:
      return Kernel<S, S>(arity,
                          [](std::span<const S> w) { return w[w.size() - 1]; },
                          "last");
    default: {
      std::vector<S> weights;
      for (Index n = 0; n < arity; ++n)
        weights.push_back(random_sample<S>(rng));
      return Kernel<S, S>(arity,
                          [weights](std::span<const S> w) {
                            S acc = weights[0] * w[0];
                            for (std::size_t n = 1; n < w.size(); ++n)
                              acc = acc + weights[n] * w[n];
                            return acc;
                          },
                          "weighted");
    }
  }
}

inline Kernel<double, double> weighted_kernel(SplitMix64& rng, Index arity,
                                              std::string label) {
  std::vector<double> weights;
  for (Index n = 0; n < arity; ++n)
    weights.push_back(random_sample<double>(rng));
  return Kernel<double, double>(arity,
                                [weights](std::span<const double> w) {
                                  double acc = weights[0] * w[0];
                                  for (std::size_t n = 1; n < w.size(); ++n)
                                    acc = acc + weights[n] * w[n];
                                  return acc;
                                },
                                std::move(label));
}

// --- comparison and description ------------------------------------------

inline bool same_value(std::int64_t a, std::int64_t b) { return a == b; }
inline bool same_value(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}
inline bool same_value(const Channels& a, const Channels& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (!same_value(a[n], b[n])) return false;
  return true;
}

template <class S>
bool same_signal(const Signal<S>& a, const Signal<S>& b) {
  if (a.dim() != b.dim()) return false;
  for (Index i = 1; i <= a.dim(); ++i)
    if (!same_value(a[i], b[i])) return false;
  return true;
}

inline std::string show_value(std::int64_t v) { return std::to_string(v); }
inline std::string show_value(double v) { return format_sample(v); }

template <class S>
std::string show_signal(const Signal<S>& xi) {
  std::string out = "[";
  for (Index i = 1; i <= xi.dim(); ++i) {
    if (i > 1) out += ", ";
    out += show_value(xi[i]);
  }
  return out + "]";
}

template <class S>
std::string describe_chain(const ProcessingChain<S>& chain) {
  std::string out = "chain B=" + std::to_string(chain.receptive_field()) +
                    " zeta=" + show_value(chain.dummy());
  for (Index j = 1; j <= chain.depth(); ++j)
    out += " [c=" + std::to_string(chain.c(j)) + " " +
           chain.layer(j).f.name + ", k=" + std::to_string(chain.k(j)) + " " +
           chain.layer(j).g.name + "]";
  return out;
}

// --- chain-law trial ------------------------------------------------------

template <class S>
void run_chain_trial(std::uint64_t seed, const VerifyOptions& opt,
                     VerifyState& st) {
  SplitMix64 rng(seed);
  const Index L = rng.range(1, opt.max_l);
  std::vector<ChainLayer<S>> layers;
  for (Index j = 0; j < L; ++j) {
    const Index c = rng.range(1, opt.max_c);
    const Index k = rng.range(1, opt.max_k);
    layers.push_back({pool_kernel<S>(rng, c), pool_kernel<S>(rng, k)});
  }
  const S zeta = random_sample<S>(rng);
  const ProcessingChain<S> chain = build_chain(layers, zeta);
  const Index B = chain.receptive_field();
  const Index kl = chain.kstar(L);
  if (B > opt.max_d) return;

  const auto where = [&](Index d, const Signal<S>& xi,
                         const std::string& what) {
    return describe_chain(chain) + " D=" + std::to_string(d) + " " + what +
           " on " + show_signal(xi);
  };

  // Random length and signal for the unconditioned regimes.
  const Index d0 = rng.range(B, opt.max_d);
  const Signal<S> xi0 = random_signal<S>(rng, d0);
  const Signal<S> dense = exact_scan(chain, xi0);

  {  // dense scan vs per-window brute force
    bool ok = dense.dim() == d0 - B + 1;
    Index bad = 0;
    for (Index i = 1; ok && i <= dense.dim(); ++i) {
      const Signal<S> one = eval_stride(chain, subsignal(xi0, B, i));
      if (!same_value(one[1], dense[i])) {
        ok = false;
        bad = i;
      }
    }
    st.at(SuiteId::exact_scan).check(ok, [&] {
      return where(d0, xi0, "window " + std::to_string(bad));
    });
  }

  {  // dilated evaluation vs dense scan
    const Signal<S> dil = eval_dilate(chain, xi0);
    st.at(SuiteId::dilated).check(same_signal(dil, dense), [&] {
      return where(d0, xi0, "dilated output " + show_signal(dil) + " vs " +
                               show_signal(dense));
    });
  }

  {  // relaxed wrapper on an arbitrary length
    const Signal<S> rel = relaxed_scan(chain, xi0);
    const Signal<S> oracle = downsample(kl, dense);
    st.at(SuiteId::relaxed).check(same_signal(rel, oracle), [&] {
      return where(d0, xi0, "relaxed output " + show_signal(rel) + " vs " +
                               show_signal(oracle));
    });
    // direct relaxed evaluation at an exactly-divisible length
    const Index d2 = B + kl * rng.range(0, (opt.max_d - B) / kl);
    const Signal<S> xi2 = random_signal<S>(rng, d2);
    const Signal<S> rel2 = eval_relax(chain, xi2);
    const Signal<S> oracle2 = downsample(kl, exact_scan(chain, xi2));
    st.at(SuiteId::relaxed).check(same_signal(rel2, oracle2), [&] {
      return where(d2, xi2, "relaxed output " + show_signal(rel2) + " vs " +
                               show_signal(oracle2));
    });

    // sliding-feasible lengths exist iff B - 1 + k_L* fits the cap
    if (B - 1 + kl <= opt.max_d) {
      const Index t = rng.range(1, (opt.max_d - B + 1) / kl);
      const Index d3 = B - 1 + kl * t;
      const Signal<S> xi3 = random_signal<S>(rng, d3);
      const FragmentedSignal<S> frag = eval_slide(chain, xi3);

      {  // every relaxed pass lands in its fragment column
        bool ok = frag.rdim() == t && frag.cdim() == kl;
        Index bad = 0;
        for (Index gamma = 1; ok && gamma <= kl; ++gamma) {
          const Signal<S> pass =
              eval_relax(chain, subsignal(xi3, d3 - kl + 1, gamma));
          if (!same_signal(pass, frag.fragment(gamma))) {
            ok = false;
            bad = gamma;
          }
        }
        const Signal<S> stitched = shift_and_stitch(chain, xi3);
        const Signal<S> dense3 = exact_scan(chain, xi3);
        const bool stitched_ok = same_signal(stitched, dense3);
        st.at(SuiteId::stitched).check(ok && stitched_ok, [&] {
          return where(d3, xi3,
                       ok ? "stitched " + show_signal(stitched) + " vs " +
                                show_signal(dense3)
                          : "pass " + std::to_string(bad));
        });
      }

      {  // placement: window i sits at (div(i-1,kl)+1, rem(i-1,kl)+1)
        bool ok = true;
        Index bad = 0;
        for (Index i = 1; ok && i <= d3 - B + 1; ++i) {
          const Signal<S> one = eval_stride(chain, subsignal(xi3, B, i));
          const S& cell = frag.at(euclid_div(i - 1, kl) + 1,
                                  euclid_rem(i - 1, kl) + 1);
          if (!same_value(one[1], cell)) {
            ok = false;
            bad = i;
          }
        }
        st.at(SuiteId::placement).check(ok, [&] {
          return where(d3, xi3, "window " + std::to_string(bad));
        });
      }

      {  // measured sliding shapes match the closed forms
        const DimReport rep = chain_dims(chain, d3);
        bool ok = rep.slide_applicable;
        FragmentedSignal<S> cur = FragmentedSignal<S>::from_signal(xi3);
        for (Index j = 1; ok && j <= L; ++j) {
          cur = slide_step(chain.layer(j), cur);
          ok = cur.rdim() == rep.u_row[static_cast<std::size_t>(j)] &&
               cur.cdim() == rep.u_col[static_cast<std::size_t>(j)];
        }
        for (Index j = 0; ok && j <= L; ++j)
          ok = rep.v[static_cast<std::size_t>(j)] ==
               rep.u_row[static_cast<std::size_t>(j)] *
                   rep.u_col[static_cast<std::size_t>(j)];
        st.at(SuiteId::dims).check(ok, [&] {
          return where(d3, xi3, "sliding shape profile");
        });
      }

      {  // measured counts and cost ratios at the sliding length
        const EvalCounts cs = count_eval(Regime::slide, chain, d3);
        const EvalCounts ct = count_eval(Regime::stitch, chain, d3);
        st.at(SuiteId::counts).check(cs.agree && ct.agree, [&] {
          return where(d3, xi3, "slide/stitch tallies vs closed forms");
        });
        const DimReport rep = chain_dims(chain, d3);
        const std::vector<Index> wprime = chain_dims(chain, d3 - kl + 1).w;
        bool ok = true;
        std::string detail_msg;
        for (Index j = 1; ok && j <= L; ++j) {
          const Index urow_prev = rep.u_row[static_cast<std::size_t>(j - 1)];
          const Index urow = rep.u_row[static_cast<std::size_t>(j)];
          const Index uprev = chain.u(j - 1);
          const Index uj = chain.u(j);
          const Speedups s = speedup(chain, d3, j);
          const Speedups lim = speedup_limit(chain, j);
          const Rational sf_form =
              Rational(1) + Rational((urow_prev - uprev) *
                                         (uprev - chain.c(j)),
                                     urow_prev - chain.c(j) + 1);
          const Rational sg_form =
              Rational(1) + Rational((urow - uj) * (uj - 1), urow);
          const Speedups stitch = speedup_stitch(chain, d3, j, Passes::full);
          const Rational kappa_f(kl, chain.kstar(j - 1));
          const Rational kappa_g(kl, chain.kstar(j));
          const Rational stf_form =
              kappa_f * (Rational(1) -
                         (kappa_f - Rational(1)) /
                             Rational(urow_prev - chain.c(j) + 1));
          const Rational stg_form =
              kappa_g * (Rational(1) - (kappa_g - Rational(1)) / Rational(urow));
          ok = s.f == sf_form && s.g == sg_form && s.f >= Rational(1) &&
               s.g >= Rational(1) && s.f <= lim.f && s.g <= lim.g &&
               stitch.f == stf_form && stitch.g == stg_form &&
               stitch.f >= Rational(1) && stitch.g >= Rational(1) &&
               wprime[static_cast<std::size_t>(j)] ==
                   urow - kl / chain.kstar(j) + 1;
          if (!ok)
            detail_msg = "layer " + std::to_string(j) + ": S_f=" + s.f.str() +
                         " S_g=" + s.g.str() + " stitch_f=" + stitch.f.str() +
                         " stitch_g=" + stitch.g.str();
        }
        st.at(SuiteId::counts).check(ok, [&] {
          return where(d3, xi3, "ratio forms; " + detail_msg);
        });
      }
    }
  }

  if (L >= 2) {  // mixed wrapper vs downsampled dense scan
    const Index ell = rng.range(1, L - 1);
    const Index ksplit = chain.kstar(ell);
    const Index d4 = rng.range(B, opt.max_d);
    const Signal<S> xi4 = random_signal<S>(rng, d4);
    const Signal<S> mixed = mixed_scan(chain, ell, xi4);
    const Signal<S> oracle = downsample(ksplit, exact_scan(chain, xi4));
    const Index r = euclid_rem(d4 - B + ksplit, kl);
    if (r <= ksplit - 1)
      ++st.mixed_trim;
    else
      ++st.mixed_stuff;
    st.at(SuiteId::mixed)
        .check(same_signal(mixed, oracle) &&
                   mixed.dim() == ceil_div(d4 - B + 1, ksplit),
               [&] {
                 return where(d4, xi4,
                              "split " + std::to_string(ell) + " output " +
                                  show_signal(mixed) + " vs " +
                                  show_signal(oracle));
               });

    // mixed dims at a directly-feasible length
    const Index lead = B + kl - ksplit;
    if (lead <= opt.max_d) {
      const Index t = rng.range(1, (opt.max_d - B + ksplit) / kl);
      const Index d5 = B + kl * t - ksplit;
      const Signal<S> xi5 = random_signal<S>(rng, d5);
      const DimReport rep = chain_dims(chain, d5);
      const MixedDims& md = rep.mixed[static_cast<std::size_t>(ell - 1)];
      bool ok = md.applicable && md.t == t;
      Signal<S> cur = xi5;
      for (Index j = 1; ok && j <= ell; ++j) {
        cur = stride_step(chain.layer(j), cur);
        ok = cur.dim() == md.rows[static_cast<std::size_t>(j)];
      }
      if (ok) {
        FragmentedSignal<S> frag = FragmentedSignal<S>::from_signal(cur);
        for (Index j = ell + 1; ok && j <= L; ++j) {
          frag = slide_step(chain.layer(j), frag);
          ok = frag.rdim() == md.rows[static_cast<std::size_t>(j)] &&
               frag.cdim() == md.cols[static_cast<std::size_t>(j)];
        }
      }
      st.at(SuiteId::dims).check(ok, [&] {
        return where(d5, xi5, "mixed shape profile, split " +
                                  std::to_string(ell));
      });
    }
  }

  {  // dummy independence where stuffing actually happens
    std::vector<Index> with_stuffing;
    for (Index d = B; d <= opt.max_d; ++d)
      if (euclid_rem(d - B + 1, kl) != 0) with_stuffing.push_back(d);
    if (!with_stuffing.empty()) {
      const Index d6 = with_stuffing[static_cast<std::size_t>(rng.range(
          0, static_cast<Index>(with_stuffing.size()) - 1))];
      const Signal<S> xi6 = random_signal<S>(rng, d6);
      S zeta2 = random_sample<S>(rng);
      if (same_value(zeta2, chain.dummy()))
        zeta2 = zeta2 + static_cast<S>(1);
      const ProcessingChain<S> other = chain.with_dummy(zeta2);
      const bool ok =
          same_signal(exact_scan(chain, xi6), exact_scan(other, xi6));
      st.at(SuiteId::dummy_independence).check(ok, [&] {
        return where(d6, xi6,
                     "dummies " + show_value(chain.dummy()) + " vs " +
                         show_value(zeta2));
      });
    }
  }

  {  // patch profile and dilated profile against the report
    const DimReport rep = chain_dims(chain, d0);
    bool ok = true;
    Signal<S> patch_cur = subsignal(xi0, B, 1);
    for (Index j = 1; ok && j <= L; ++j) {
      patch_cur = stride_step(chain.layer(j), patch_cur);
      ok = patch_cur.dim() == rep.u[static_cast<std::size_t>(j)];
    }
    Signal<S> dil_cur = xi0;
    for (Index j = 1; ok && j <= L; ++j) {
      dil_cur = dilate_step(chain.layer(j), chain.kstar(j - 1), dil_cur);
      ok = dil_cur.dim() == rep.v[static_cast<std::size_t>(j)];
    }
    st.at(SuiteId::dims).check(ok, [&] {
      return where(d0, xi0, "patch/dilated length profile");
    });
  }

  {  // stride and dilate tallies at the unconditioned length
    const EvalCounts ca = count_eval(Regime::stride, chain, d0);
    const EvalCounts cb = count_eval(Regime::dilate, chain, d0);
    const Index d2r = B + kl * rng.range(0, (opt.max_d - B) / kl);
    const EvalCounts cc = count_eval(Regime::relax, chain, d2r);
    st.at(SuiteId::counts).check(ca.agree && cb.agree && cc.agree, [&] {
      return where(d0, xi0, "stride/dilate/relax tallies vs closed forms");
    });
  }

  {  // interleaving round trips on random fragment stacks
    const Index k1 = rng.range(1, 3);
    const Index k2 = rng.range(1, 3);
    const Index q = rng.range(1, 3);
    const Index s = rng.range(1, 3);
    const Index rows = k1 * k2 * q;
    std::vector<S> entries;
    for (Index n = 0; n < rows * s; ++n)
      entries.push_back(random_sample<S>(rng));
    const FragmentedSignal<S> chi(rows, s, entries);
    bool ok = defragment(k1, fragment(k1, chi)) == chi;
    ok = ok && fragment(k2, fragment(k1, chi)) == fragment(k1 * k2, chi);
    ok = ok && fragment(k1, fragment(k2, chi)) == fragment(k2, fragment(k1, chi));
    // merge law in closed form, on a stack with k1*s fragments
    const FragmentedSignal<S> wide(q * k2, k1 * s, entries);
    const FragmentedSignal<S> merged = defragment(k1, wide);
    for (Index mu = 1; ok && mu <= merged.rdim(); ++mu)
      for (Index nu = 1; nu <= merged.cdim(); ++nu)
        if (!same_value(merged.at(mu, nu),
                        wide.at(euclid_div(mu - 1, k1) + 1,
                                euclid_rem(mu - 1, k1) * s + nu))) {
          ok = false;
          break;
        }
    // flattening round trip
    const Signal<S> flat = vectorize(chi);
    ok = ok && unvectorize(flat, chi.rdim(), chi.cdim()) == chi;
    ok = ok && vectorize(unvectorize(flat, rows, s)) == flat;
    st.at(SuiteId::fragments).check(ok, [&] {
      return describe_chain(chain) + " fragment stack " +
             std::to_string(rows) + "x" + std::to_string(s);
    });
  }
}

// --- multiscale trial ------------------------------------------------------

inline void run_multiscale_trial(std::uint64_t seed, const VerifyOptions& opt,
                                 VerifyState& st) {
  SplitMix64 rng(seed);
  const Index B = rng.range(1, 6);
  const Index k = rng.range(2, 3);
  const Index h = k + rng.range(0, 2);
  const Index dmax = std::min<Index>(opt.max_d, 40);
  if (B > dmax) return;
  const BoundaryRule<double> theta = rng.range(0, 1) == 0
                                         ? dirichlet_rule<double>()
                                         : neumann_rule<double>();
  const MultiScaleConfig<double> cfg(k, h, B,
                                     weighted_kernel(rng, h, "lowpass"),
                                     theta);
  const Index D = rng.range(B, dmax);
  const Signal<double> xi = random_signal<double>(rng, D);
  const Index raw = cfg.boundary_raw();
  const Index R = cfg.boundary();

  const auto where = [&](const std::string& what) {
    return std::string("multiscale B=") + std::to_string(B) +
           " k=" + std::to_string(k) + " h=" + std::to_string(h) +
           " theta=" + theta.name + " D=" + std::to_string(D) + " " + what +
           " on " + show_signal(xi);
  };

  {  // padded window keeps the original samples centered
    const Index i = rng.range(1, D - B + 1);
    const Signal<double> padded = padded_subsignal(xi, B, R, theta, i);
    bool ok = padded.dim() == B + 2 * R;
    for (Index mu = 1; ok && mu <= B; ++mu)
      ok = same_value(padded[R + mu], xi[i + mu - 1]);
    st.at(SuiteId::multiscale).check(ok, [&] { return where("padding"); });
  }

  const Signal<double> pi = ms_downscale(cfg, xi);
  {  // downscaled companion length
    const Index want =
        ceil_div(D - B + 1 + euclid_rem(raw, 2), k) + B - 1;
    st.at(SuiteId::multiscale).check(pi.dim() == want, [&] {
      return where("companion length");
    });
  }

  {  // windows of the companion pair with snapped window starts
    bool ok = true;
    Index bad = 0;
    for (Index i = 1; ok && i <= D - B + 1; ++i) {
      const Index snapped = ms_index(k, i);
      ok = snapped <= i && i - snapped < k &&
           euclid_rem(snapped - 1, k) == 0 &&
           ms_index(k, snapped) == snapped;
      if (ok)
        ok = same_signal(subsignal(pi, B, euclid_div(i - 1, k) + 1),
                         ms_subsignal(cfg, xi, snapped));
      if (!ok) bad = i;
    }
    st.at(SuiteId::multiscale).check(ok, [&] {
      return where("pairing at window " + std::to_string(bad));
    });
  }

  {  // single-pass scan vs the per-window definition
    const Kernel<double, double> fine = weighted_kernel(rng, B, "fine");
    const Kernel<double, double> coarse = weighted_kernel(rng, B, "coarse");
    const auto combine = [](double p, double q) { return p * 8.0 + q; };
    const Signal<double> fast = ms_scan(cfg, xi, fine, coarse, combine);
    const Signal<double> slow =
        ms_scan_reference(cfg, xi, fine, coarse, combine);
    st.at(SuiteId::multiscale).check(same_signal(fast, slow), [&] {
      return where("fast " + show_signal(fast) + " vs " + show_signal(slow));
    });
  }
}

// --- upsampling trial -------------------------------------------------------

inline void run_upsampling_trial(std::uint64_t seed, const VerifyOptions&,
                                 VerifyState& st) {
  SplitMix64 rng(seed);
  const Index D = rng.range(1, 8);
  const Index k = rng.range(1, 3);
  const Index c = rng.range(1, 5);
  const Index m = rng.range(1, 3);
  const Index n = rng.range(1, 3);
  const Index pmax = std::min<Index>(2, (k * (D - 1) + c - 1) / 2);
  const Index P = pmax > 0 ? rng.range(0, pmax) : 0;

  const auto bank = [&rng](Index spatial, Index in, Index out) {
    std::vector<double> values;
    for (Index v = 0; v < spatial * in * out; ++v)
      values.push_back(random_sample<double>(rng));
    return FilterBank(spatial, in, out, std::move(values));
  };

  {  // transposed convolution output length
    const FilterBank w = bank(c, m, n);
    const Signal<Channels> xi = random_channel_signal(rng, D, m);
    const Signal<Channels> out = transposed_conv(xi, w, k, P);
    st.at(SuiteId::upsampling)
        .check(out.dim() == k * (D - 1) + c - 2 * P, [&] {
          return "trconv D=" + std::to_string(D) + " k=" + std::to_string(k) +
                 " c=" + std::to_string(c) + " P=" + std::to_string(P) +
                 " gave length " + std::to_string(out.dim());
        });
  }

  {  // sample-repeat bank reproduces the zero-order hold, bit for bit
    const Index u = 2 * rng.range(1, 2);
    const Signal<Channels> xi = random_channel_signal(rng, D, m);
    const Signal<Channels> held =
        transposed_conv(xi, zoh_filter_bank(u, m), u, u / 2);
    const Signal<Channels> want = upsample_zoh(u, xi);
    st.at(SuiteId::upsampling).check(same_signal(held, want), [&] {
      return "zoh u=" + std::to_string(u) + " m=" + std::to_string(m) +
             " D=" + std::to_string(D);
    });
  }

  {  // dense-then-shuffle equals the strided transposed convolution
    const Index u = rng.range(1, 3);
    const FilterBank w = bank(u, m, n);
    const Signal<Channels> xi = random_channel_signal(rng, D, m);
    const Signal<Channels> direct = transposed_conv(xi, w, u, 0);
    const Signal<Channels> shuffled = duc(xi, duc_reorder(w), u);
    st.at(SuiteId::upsampling).check(same_signal(shuffled, direct), [&] {
      return "duc u=" + std::to_string(u) + " m=" + std::to_string(m) +
             " n=" + std::to_string(n) + " D=" + std::to_string(D);
    });
  }
}

}  // namespace detail

// Seeded randomized self-check across every module; deterministic for a
// given option set. Suites that the size caps squeeze to nothing report
// zero checks and a warning, not a failure.
inline VerifyReport run_verification(const VerifyOptions& opt) {
  if (opt.trials < 0) throw BadConfig("verify: trials must be >= 0");
  if (opt.max_l < 1 || opt.max_c < 1 || opt.max_k < 1 || opt.max_d < 1)
    throw BadConfig("verify: size caps must be >= 1");
  detail::VerifyState st;
  SplitMix64 master(opt.seed);
  for (std::int64_t t = 0; t < opt.trials; ++t) {
    const std::uint64_t chain_seed = master.next();
    const std::uint64_t ms_seed = master.next();
    const std::uint64_t up_seed = master.next();
    if (t % 2 == 0)
      detail::run_chain_trial<std::int64_t>(chain_seed, opt, st);
    else
      detail::run_chain_trial<double>(chain_seed, opt, st);
    detail::run_multiscale_trial(ms_seed, opt, st);
    detail::run_upsampling_trial(up_seed, opt, st);
  }
  VerifyReport rep;
  rep.options = opt;
  for (const detail::Suite& s : st.suites) rep.suites.push_back(s.result);
  rep.mixed_trim = st.mixed_trim;
  rep.mixed_stuff = st.mixed_stuff;
  return rep;
}

}  // namespace densescan
