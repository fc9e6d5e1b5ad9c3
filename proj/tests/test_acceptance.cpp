// Acceptance gate for the dense-scanning library. Prints one line per
// criterion and exits nonzero if any of them fails. Each criterion keeps its
// own oracle: closed forms are recomputed here from layer arities, never
// taken from the code under test.

#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "densescan/chain.hpp"
#include "densescan/chain_config.hpp"
#include "densescan/complexity.hpp"
#include "densescan/error.hpp"
#include "densescan/euclid.hpp"
#include "densescan/kernel.hpp"
#include "densescan/multiscale.hpp"
#include "densescan/nsf.hpp"
#include "densescan/numeric.hpp"
#include "densescan/planar2d.hpp"
#include "densescan/resample.hpp"
#include "densescan/signal.hpp"
#include "densescan/splitmix64.hpp"
#include "densescan/verify.hpp"
#include "densescan/windowed.hpp"

#ifndef SCAN_CLI_PATH
#define SCAN_CLI_PATH ""
#endif

namespace ds = densescan;
namespace dd = densescan::detail;
using ds::Index;
using ds::Rational;
using I64 = std::int64_t;

namespace {

// One obligation: stays ok until the first violated check, which is recorded.
struct Area {
  bool ok = true;
  std::string note;

  void require(bool cond, const char* what, long long trial = -1,
               long long d = -1) {
    if (cond || !ok) return;
    ok = false;
    note = what;
    if (trial >= 0) note += " trial=" + std::to_string(trial);
    if (d >= 0) note += " D=" + std::to_string(d);
  }
};

int g_failures = 0;

void report(int n, const char* label, const Area& area) {
  std::printf("criterion %02d %-32s %s\n", n, label,
              area.ok ? "PASS" : "FAIL");
  if (!area.ok) {
    ++g_failures;
    std::fprintf(stderr, "  criterion %02d first failure: %s\n", n,
                 area.note.c_str());
  }
}

template <class S>
S bump(const S& zeta, int delta) {
  return zeta + static_cast<S>(delta);
}

// ---------------------------------------------------------------------------
// Criteria 1, 2, 3, 5, 6 share one corpus of random chains. For every chain,
// every length from the receptive field up to 64 is evaluated.

struct CorpusResult {
  Area windows;   // criterion 1
  Area equiv;     // criterion 2
  Area zeta;      // criterion 3
  Area dims;      // criterion 5
  Area counts;    // criterion 6
  long long chains = 0;
  long long lengths = 0;
  long long trim_hits = 0;
  long long stuff_hits = 0;
  long long zeta_checks = 0;
};

template <class S>
void run_corpus(std::uint64_t base_seed, long long trials, CorpusResult& cr) {
  for (long long trial = 0; trial < trials; ++trial) {
    ds::SplitMix64 rng(base_seed +
                       0x9E3779B97F4A7C15ULL *
                           static_cast<std::uint64_t>(trial + 1));
    const Index L = rng.range(1, 3);
    std::vector<ds::ChainLayer<S>> layers;
    std::vector<Index> myc(static_cast<std::size_t>(L + 1), 0);
    std::vector<Index> myk(static_cast<std::size_t>(L + 1), 0);
    for (Index j = 1; j <= L; ++j) {
      myc[static_cast<std::size_t>(j)] = rng.range(1, 3);
      myk[static_cast<std::size_t>(j)] = rng.range(1, 3);
      layers.push_back(
          {dd::pool_kernel<S>(rng, myc[static_cast<std::size_t>(j)]),
           dd::pool_kernel<S>(rng, myk[static_cast<std::size_t>(j)])});
    }
    const S zeta = dd::random_sample<S>(rng);
    const ds::ProcessingChain<S> chain = ds::build_chain(layers, zeta);
    ++cr.chains;

    // Patch profile recomputed from the arities alone.
    std::vector<Index> myu(static_cast<std::size_t>(L + 1), 1);
    std::vector<Index> myks(static_cast<std::size_t>(L + 1), 1);
    for (Index j = L; j >= 1; --j)
      myu[static_cast<std::size_t>(j - 1)] =
          myk[static_cast<std::size_t>(j)] * myu[static_cast<std::size_t>(j)] +
          myc[static_cast<std::size_t>(j)] - 1;
    for (Index j = 1; j <= L; ++j)
      myks[static_cast<std::size_t>(j)] =
          myks[static_cast<std::size_t>(j - 1)] *
          myk[static_cast<std::size_t>(j)];
    const Index B = myu[0];
    const Index kl = myks[static_cast<std::size_t>(L)];
    cr.counts.require(
        B == chain.receptive_field() && kl == chain.kstar(L), "profile",
        trial);

    const auto u = [&](Index j) { return myu[static_cast<std::size_t>(j)]; };
    const auto c = [&](Index j) { return myc[static_cast<std::size_t>(j)]; };
    const auto ks = [&](Index j) { return myks[static_cast<std::size_t>(j)]; };

    // Closed forms for the per-layer invocation counts of each regime,
    // evaluated at an arbitrary length q (caller checks applicability).
    const auto stride_f = [&](Index q, Index j) {
      return (q - B + 1) * (u(j - 1) - c(j) + 1);
    };
    const auto stride_g = [&](Index q, Index j) { return (q - B + 1) * u(j); };
    const auto urow = [&](Index q, Index j) {
      return u(j) + (q - B + 1) / ks(j) - 1;
    };
    const auto slide_f = [&](Index q, Index j) {
      return ks(j - 1) * (urow(q, j - 1) - c(j) + 1);
    };
    const auto slide_g = [&](Index q, Index j) { return ks(j) * urow(q, j); };
    const auto relax_w = [&](Index q, Index j) {
      return u(j) + (q - B) / ks(j);
    };
    const auto stitch_f = [&](Index q, Index j) {
      return kl * (relax_w(q - kl + 1, j - 1) - c(j) + 1);
    };
    const auto stitch_g = [&](Index q, Index j) {
      return kl * relax_w(q - kl + 1, j);
    };

    // Ratio bookkeeping for the monotonicity requirement.
    std::vector<Rational> prev_sf(static_cast<std::size_t>(L + 1));
    std::vector<Rational> prev_sg(static_cast<std::size_t>(L + 1));
    std::vector<Rational> prev_tf(static_cast<std::size_t>(L + 1));
    std::vector<Rational> prev_tg(static_cast<std::size_t>(L + 1));
    std::vector<bool> seen(static_cast<std::size_t>(L + 1), false);

    for (Index D = B; D <= 64; ++D) {
      ++cr.lengths;
      const ds::Signal<S> xi = dd::random_signal<S>(rng, D);
      const ds::Signal<S> dense = ds::exact_scan(chain, xi);

      // --- criterion 1: dense scan equals the per-window brute force
      bool win_ok = dense.dim() == D - B + 1;
      for (Index i = 1; win_ok && i <= dense.dim(); ++i) {
        const ds::Signal<S> one =
            ds::eval_stride(chain, ds::subsignal(xi, B, i));
        win_ok = one.dim() == 1 && dd::same_value(one[1], dense[i]);
      }
      cr.windows.require(win_ok, "per-window mismatch", trial, D);

      // --- criterion 2: the other regimes reproduce the dense result
      cr.equiv.require(dd::same_signal(ds::eval_dilate(chain, xi), dense),
                       "dilated", trial, D);
      cr.equiv.require(dd::same_signal(ds::relaxed_scan(chain, xi),
                                       ds::downsample(kl, dense)),
                       "relaxed wrapper", trial, D);

      const bool slide_ok = ds::divides(kl, D - B + 1);
      if (slide_ok) {
        const ds::FragmentedSignal<S> frag = ds::eval_slide(chain, xi);
        bool cols_ok = frag.cdim() == kl && frag.rdim() == (D - B + 1) / kl;
        for (Index gamma = 1; cols_ok && gamma <= kl; ++gamma)
          cols_ok = dd::same_signal(
              ds::eval_relax(chain, ds::subsignal(xi, D - kl + 1, gamma)),
              frag.fragment(gamma));
        cr.equiv.require(cols_ok, "pass columns", trial, D);
        cr.equiv.require(
            dd::same_signal(ds::shift_and_stitch(chain, xi), dense),
            "stitched", trial, D);
      }

      for (Index lev = 1; lev <= L - 1; ++lev) {
        const ds::Signal<S> split = ds::mixed_scan(chain, lev, xi);
        const ds::Signal<S> oracle = ds::downsample(ks(lev), dense);
        cr.equiv.require(split.dim() == ds::ceil_div(D - B + 1, ks(lev)) &&
                             dd::same_signal(split, oracle),
                         "mixed split", trial, D);
        const Index r = ds::euclid_rem(D - B + ks(lev), kl);
        const bool stuffed = r > ks(lev) - 1;
        if (stuffed)
          ++cr.stuff_hits;
        else
          ++cr.trim_hits;
        if (stuffed) {
          // --- criterion 3 on the mixed wrapper
          for (int delta = 1; delta <= 2; ++delta) {
            const ds::ProcessingChain<S> other =
                chain.with_dummy(bump(zeta, delta));
            cr.zeta.require(
                dd::same_signal(ds::mixed_scan(other, lev, xi), oracle),
                "mixed dummy sensitivity", trial, D);
            ++cr.zeta_checks;
          }
        }
      }

      // --- criterion 3 on the dense scan
      if (ds::stuff_count(chain, D) > 0) {
        for (int delta = 1; delta <= 2; ++delta) {
          const ds::ProcessingChain<S> other =
              chain.with_dummy(bump(zeta, delta));
          cr.zeta.require(dd::same_signal(ds::exact_scan(other, xi), dense),
                          "dense dummy sensitivity", trial, D);
          ++cr.zeta_checks;
        }
      }

      // --- criterion 5: the shape report against measured shapes
      const ds::DimReport rep = ds::chain_dims(chain, D);
      bool dims_ok = rep.D == D && rep.B == B && rep.kstar_total == kl &&
                     static_cast<Index>(rep.u.size()) == L + 1;
      for (Index j = 0; dims_ok && j <= L; ++j)
        dims_ok = rep.u[static_cast<std::size_t>(j)] == u(j);
      {
        ds::Signal<S> cur = ds::subsignal(xi, B, 1);
        for (Index j = 1; dims_ok && j <= L; ++j) {
          cur = ds::stride_step(chain.layer(j), cur);
          dims_ok = cur.dim() == rep.u[static_cast<std::size_t>(j)];
        }
      }
      {
        dims_ok = dims_ok && rep.v.size() == rep.u.size() && rep.v[0] == D;
        ds::Signal<S> cur = xi;
        for (Index j = 1; dims_ok && j <= L; ++j) {
          cur = ds::dilate_step(chain.layer(j), chain.kstar(j - 1), cur);
          dims_ok = cur.dim() == rep.v[static_cast<std::size_t>(j)];
        }
      }
      dims_ok = dims_ok && rep.slide_applicable == slide_ok;
      if (dims_ok && slide_ok) {
        ds::FragmentedSignal<S> cur = ds::FragmentedSignal<S>::from_signal(xi);
        dims_ok = rep.u_row[0] == cur.rdim() && rep.u_col[0] == cur.cdim();
        for (Index j = 1; dims_ok && j <= L; ++j) {
          cur = ds::slide_step(chain.layer(j), cur);
          dims_ok = cur.rdim() == rep.u_row[static_cast<std::size_t>(j)] &&
                    cur.cdim() == rep.u_col[static_cast<std::size_t>(j)];
        }
        // dilated length = fragment grid, cell by cell
        for (Index j = 0; dims_ok && j <= L; ++j)
          dims_ok = rep.v[static_cast<std::size_t>(j)] ==
                    rep.u_row[static_cast<std::size_t>(j)] *
                        rep.u_col[static_cast<std::size_t>(j)];
      }
      const bool relax_ok = ds::divides(kl, D - B);
      dims_ok = dims_ok && rep.relax_applicable == relax_ok;
      if (dims_ok && relax_ok) {
        dims_ok = rep.w[0] == D;
        ds::Signal<S> cur = xi;
        for (Index j = 1; dims_ok && j <= L; ++j) {
          cur = ds::stride_step(chain.layer(j), cur);
          dims_ok = cur.dim() == rep.w[static_cast<std::size_t>(j)] &&
                    rep.w[static_cast<std::size_t>(j)] == relax_w(D, j);
        }
      }
      dims_ok = dims_ok && static_cast<Index>(rep.mixed.size()) == L - 1;
      for (Index lev = 1; dims_ok && lev <= L - 1; ++lev) {
        const ds::MixedDims& md = rep.mixed[static_cast<std::size_t>(lev - 1)];
        const bool feasible = ds::divides(kl, D - B + ks(lev)) &&
                              (D - B + ks(lev)) / kl >= 1;
        dims_ok = md.level == lev && md.applicable == feasible;
        if (!dims_ok) break;
        if (!feasible) {
          bool threw = false;
          try {
            ds::eval_mixed(chain, lev, xi);
          } catch (const ds::Error&) {
            threw = true;
          }
          dims_ok = threw;
          continue;
        }
        dims_ok = md.t == (D - B + ks(lev)) / kl;
        ds::Signal<S> cur = xi;
        for (Index j = 1; dims_ok && j <= lev; ++j) {
          cur = ds::stride_step(chain.layer(j), cur);
          dims_ok = cur.dim() == md.rows[static_cast<std::size_t>(j)] &&
                    md.cols[static_cast<std::size_t>(j)] == 1;
        }
        if (!dims_ok) break;
        ds::FragmentedSignal<S> frag =
            ds::FragmentedSignal<S>::from_signal(cur);
        for (Index j = lev + 1; dims_ok && j <= L; ++j) {
          frag = ds::slide_step(chain.layer(j), frag);
          dims_ok = frag.rdim() == md.rows[static_cast<std::size_t>(j)] &&
                    frag.cdim() == md.cols[static_cast<std::size_t>(j)];
        }
      }
      cr.dims.require(dims_ok, "shape report", trial, D);

      // --- criterion 6: measured work equals the closed forms
      bool cnt_ok = true;
      {
        const ds::EvalCounts sc = ds::count_eval(ds::Regime::stride, chain, xi);
        cnt_ok = sc.agree;
        for (Index j = 1; cnt_ok && j <= L; ++j)
          cnt_ok = sc.measured[static_cast<std::size_t>(j - 1)].f ==
                       stride_f(D, j) &&
                   sc.measured[static_cast<std::size_t>(j - 1)].g ==
                       stride_g(D, j);
        cr.counts.require(cnt_ok, "per-window counts", trial, D);
      }
      {
        const ds::EvalCounts dc = ds::count_eval(ds::Regime::dilate, chain, xi);
        cnt_ok = dc.agree;
        std::vector<Index> v(static_cast<std::size_t>(L + 1), D);
        for (Index j = 1; cnt_ok && j <= L; ++j) {
          v[static_cast<std::size_t>(j)] =
              v[static_cast<std::size_t>(j - 1)] -
              ks(j - 1) * (c(j) + myk[static_cast<std::size_t>(j)] - 2);
          cnt_ok = dc.measured[static_cast<std::size_t>(j - 1)].f ==
                       v[static_cast<std::size_t>(j - 1)] -
                           ks(j - 1) * (c(j) - 1) &&
                   dc.measured[static_cast<std::size_t>(j - 1)].g ==
                       v[static_cast<std::size_t>(j)];
        }
        cr.counts.require(cnt_ok, "dilated counts", trial, D);
      }
      if (relax_ok) {
        const ds::EvalCounts rc = ds::count_eval(ds::Regime::relax, chain, xi);
        cnt_ok = rc.agree;
        for (Index j = 1; cnt_ok && j <= L; ++j)
          cnt_ok = rc.measured[static_cast<std::size_t>(j - 1)].f ==
                       relax_w(D, j - 1) - c(j) + 1 &&
                   rc.measured[static_cast<std::size_t>(j - 1)].g ==
                       relax_w(D, j);
        cr.counts.require(cnt_ok, "relaxed counts", trial, D);
      }
      if (slide_ok) {
        const ds::EvalCounts lc = ds::count_eval(ds::Regime::slide, chain, xi);
        const ds::EvalCounts tc = ds::count_eval(ds::Regime::stitch, chain, xi);
        cnt_ok = lc.agree && tc.agree;
        for (Index j = 1; cnt_ok && j <= L; ++j)
          cnt_ok = lc.measured[static_cast<std::size_t>(j - 1)].f ==
                       slide_f(D, j) &&
                   lc.measured[static_cast<std::size_t>(j - 1)].g ==
                       slide_g(D, j) &&
                   tc.measured[static_cast<std::size_t>(j - 1)].f ==
                       stitch_f(D, j) &&
                   tc.measured[static_cast<std::size_t>(j - 1)].g ==
                       stitch_g(D, j);
        cr.counts.require(cnt_ok, "sliding and stitched counts", trial, D);

        cnt_ok = true;
        for (Index j = 1; cnt_ok && j <= L; ++j) {
          const ds::Speedups s = ds::speedup(chain, D, j);
          const ds::Speedups lim = ds::speedup_limit(chain, j);
          // ratio of the measured tallies, in exact arithmetic
          cnt_ok = s.f == Rational(stride_f(D, j), slide_f(D, j)) &&
                   s.g == Rational(stride_g(D, j), slide_g(D, j));
          // the same ratio through the per-fragment form
          const Index t_prev = (D - B + 1) / ks(j - 1);
          const Index t_here = (D - B + 1) / ks(j);
          cnt_ok = cnt_ok &&
                   s.f == Rational(t_prev * (u(j - 1) - c(j) + 1),
                                   t_prev + u(j - 1) - c(j)) &&
                   s.g == Rational(t_here * u(j), t_here + u(j) - 1);
          cnt_ok = cnt_ok && lim.f == Rational(u(j - 1) - c(j) + 1) &&
                   lim.g == Rational(u(j));
          cnt_ok = cnt_ok && s.f >= Rational(1) && s.g >= Rational(1) &&
                   s.f <= lim.f && s.g <= lim.g;

          const ds::Speedups st =
              ds::speedup_stitch(chain, D, j, ds::Passes::full);
          const ds::Speedups stl =
              ds::speedup_stitch_limit(chain, j, ds::Passes::full);
          cnt_ok = cnt_ok &&
                   st.f == Rational(stitch_f(D, j), slide_f(D, j)) &&
                   st.g == Rational(stitch_g(D, j), slide_g(D, j)) &&
                   stl.f == Rational(kl, ks(j - 1)) &&
                   stl.g == Rational(kl, ks(j)) && st.f >= Rational(1) &&
                   st.g >= Rational(1) && st.f <= stl.f && st.g <= stl.g;
          const ds::Speedups s1 =
              ds::speedup_stitch(chain, D, j, ds::Passes::one);
          const ds::Speedups sl1 =
              ds::speedup_stitch_limit(chain, j, ds::Passes::one);
          cnt_ok = cnt_ok && s1.f == st.f / Rational(kl) &&
                   s1.g == st.g / Rational(kl) &&
                   sl1.f == stl.f / Rational(kl) &&
                   sl1.g == stl.g / Rational(kl);

          if (seen[static_cast<std::size_t>(j)]) {
            cnt_ok = cnt_ok && !(s.f < prev_sf[static_cast<std::size_t>(j)]) &&
                     !(s.g < prev_sg[static_cast<std::size_t>(j)]) &&
                     !(st.f < prev_tf[static_cast<std::size_t>(j)]) &&
                     !(st.g < prev_tg[static_cast<std::size_t>(j)]);
          }
          seen[static_cast<std::size_t>(j)] = true;
          prev_sf[static_cast<std::size_t>(j)] = s.f;
          prev_sg[static_cast<std::size_t>(j)] = s.g;
          prev_tf[static_cast<std::size_t>(j)] = st.f;
          prev_tg[static_cast<std::size_t>(j)] = st.g;
        }
        cr.counts.require(cnt_ok, "cost ratios", trial, D);
      }
    }

    // --- criterion 6, tail: the ratios approach their limits. Checked with
    // closed forms only, at the first sliding-feasible length past 10 k_L* B.
    {
      Index t_min = ds::ceil_div(10 * kl * B - (B - 1), kl);
      if (t_min < 1) t_min = 1;
      const Index Ds = B - 1 + kl * t_min;
      bool gap_ok = true;
      for (Index j = 1; gap_ok && j <= L; ++j) {
        const Rational sf(stride_f(Ds, j), slide_f(Ds, j));
        const Rational sg(stride_g(Ds, j), slide_g(Ds, j));
        const Rational lf(u(j - 1) - c(j) + 1);
        const Rational lg(u(j));
        gap_ok = lf - sf >= Rational(0) &&
                 lf - sf <= Rational(2 * ks(j - 1) * (u(j - 1) - c(j)) *
                                         (u(j - 1) - c(j) + 1),
                                     Ds) &&
                 lg - sg >= Rational(0) &&
                 lg - sg <= Rational(2 * ks(j) * u(j) * (u(j) - 1), Ds);
        const Rational tf(stitch_f(Ds, j), slide_f(Ds, j));
        const Rational tg(stitch_g(Ds, j), slide_g(Ds, j));
        const Rational kf(kl, ks(j - 1));
        const Rational kg(kl, ks(j));
        gap_ok = gap_ok && kf - tf >= Rational(0) &&
                 kf - tf <= Rational(2 * kl * (kl / ks(j - 1) - 1), Ds) &&
                 kg - tg >= Rational(0) &&
                 kg - tg <= Rational(2 * kl * (kl / ks(j) - 1), Ds);
      }
      cr.counts.require(gap_ok, "limit gap", trial);
    }
  }
}

// ---------------------------------------------------------------------------
// Criterion 4: fragmentation algebra, exhaustively over small matrices.

Area fragment_algebra() {
  Area a;
  for (Index q = 1; q <= 12; ++q) {
    for (Index s = 1; s <= 6; ++s) {
      std::vector<I64> entries;
      for (Index n = 1; n <= q * s; ++n) entries.push_back(n);
      const ds::FragmentedSignal<I64> chi(q, s, entries);
      for (Index k : {2, 3, 6}) {
        if (ds::divides(k, q)) {
          const ds::FragmentedSignal<I64> split = ds::fragment(k, chi);
          a.require(split.rdim() == q / k && split.cdim() == s * k,
                    "split shape", q, s);
          a.require(ds::defragment(k, split) == chi, "merge undoes split", q,
                    s);
        } else {
          bool threw = false;
          try {
            ds::fragment(k, chi);
          } catch (const ds::DivisibilityError&) {
            threw = true;
          }
          a.require(threw, "split divisibility", q, s);
        }
        if (ds::divides(k, s)) {
          const ds::FragmentedSignal<I64> merged = ds::defragment(k, chi);
          a.require(merged.rdim() == q * k && merged.cdim() == s / k,
                    "merge shape", q, s);
          a.require(ds::fragment(k, merged) == chi, "split undoes merge", q,
                    s);
        }
      }
      if (ds::divides(6, q)) {
        const auto six = ds::fragment(6, chi);
        a.require(ds::fragment(3, ds::fragment(2, chi)) == six,
                  "split composition 2*3", q, s);
        a.require(ds::fragment(2, ds::fragment(3, chi)) == six,
                  "split composition 3*2", q, s);
      }
      if (ds::divides(6, s)) {
        const auto six = ds::defragment(6, chi);
        a.require(ds::defragment(3, ds::defragment(2, chi)) == six,
                  "merge composition 2*3", q, s);
        a.require(ds::defragment(2, ds::defragment(3, chi)) == six,
                  "merge composition 3*2", q, s);
      }
      // full merge lines the entries up row-major
      const ds::FragmentedSignal<I64> column = ds::defragment(s, chi);
      a.require(column.rdim() == q * s && column.cdim() == 1 &&
                    column.entries() == chi.entries(),
                "full merge", q, s);
      a.require(ds::unvectorize(ds::vectorize(chi), q, s) == chi,
                "column stacking round trip", q, s);
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// Criterion 6, anchor: the worked two-kernel example.

void counts_anchor(Area& a) {
  std::vector<ds::ChainLayer<I64>> layers;
  layers.push_back(
      {ds::Kernel<I64, I64>(2,
                            [](std::span<const I64> w) { return w[0] + w[1]; },
                            "sum"),
       ds::Kernel<I64, I64>(
           2, [](std::span<const I64> w) { return w[0] > w[1] ? w[0] : w[1]; },
           "max")});
  const ds::ProcessingChain<I64> chain = ds::build_chain(layers, I64{0});
  a.require(chain.receptive_field() == 3, "anchor field");
  const ds::EvalCounts naive = ds::count_eval<I64>(ds::Regime::stride, chain, 6);
  const ds::EvalCounts fast = ds::count_eval<I64>(ds::Regime::slide, chain, 6);
  a.require(naive.agree && naive.measured[0].f == 8, "anchor per-window f");
  a.require(fast.agree && fast.measured[0].f == 5, "anchor sliding f");
  a.require(ds::speedup(chain, 6, 1).f == Rational(8, 5), "anchor ratio");
}

// ---------------------------------------------------------------------------
// Criterion 7: two-scale scanning.

Area two_scale() {
  Area a;
  {
    const auto [raw, half] = ds::ms_boundary(5, 2, 3);
    a.require(raw == 6 && half == 3, "anchor boundary");
    const ds::MultiScaleConfig<double> cfg(2, 3, 5, ds::binomial3_kernel(),
                                           ds::dirichlet_rule<double>());
    ds::SplitMix64 rng(0xF16A11);
    const ds::Signal<double> xi = dd::random_signal<double>(rng, 9);
    a.require(ds::ms_downscale(cfg, xi).dim() == 7,
              "anchor companion length");
  }
  ds::SplitMix64 rng(0x5CA1E5);
  long long configs = 0;
  for (long long trial = 0; trial < 120; ++trial) {
    const Index k = rng.range(2, 4);
    const Index h = rng.range(k, k + 2);
    const Index B = rng.range(1, 6);
    const ds::BoundaryRule<double> theta = trial % 2 == 0
                                               ? ds::dirichlet_rule<double>()
                                               : ds::neumann_rule<double>();
    const ds::MultiScaleConfig<double> cfg(
        k, h, B, dd::weighted_kernel(rng, h, "lowpass"), theta);
    const Index D = rng.range(B, B + 24);
    const ds::Signal<double> xi = dd::random_signal<double>(rng, D);

    const Index raw = (k - 1) * B + h - k;
    a.require(cfg.boundary_raw() == raw &&
                  cfg.boundary() == ds::ceil_div(raw, 2),
              "boundary closed form", trial);

    const ds::Signal<double> pi = ds::ms_downscale(cfg, xi);
    const Index span = D - B + 1;
    const Index parity = ds::euclid_rem(raw, 2);
    a.require(pi.dim() == ds::ceil_div(span + parity, k) + B - 1,
              "companion length law", trial);

    bool pair_ok = true;
    for (Index i = 1; pair_ok && i <= span; ++i) {
      const Index snapped = ds::ms_index(k, i);
      pair_ok = snapped <= i && ds::euclid_rem(snapped - 1, k) == 0 &&
                dd::same_signal(
                    ds::ms_subsignal(cfg, xi, snapped),
                    ds::subsignal(pi, B, ds::euclid_div(i - 1, k) + 1));
    }
    a.require(pair_ok, "pairing law", trial);

    const ds::Kernel<double, double> fine = dd::pool_kernel<double>(rng, B);
    const ds::Kernel<double, double> coarse = dd::pool_kernel<double>(rng, B);
    const auto combine = [](const double& p, const double& q) {
      return p - 2.0 * q;
    };
    a.require(
        dd::same_signal(ds::ms_scan(cfg, xi, fine, coarse, combine),
                        ds::ms_scan_reference(cfg, xi, fine, coarse, combine)),
        "single pass equals per-window", trial);
    ++configs;
  }
  a.require(configs >= 100, "config count");
  return a;
}

// ---------------------------------------------------------------------------
// Criterion 8: fractionally strided convolution and its packagings.

Area upsampling() {
  Area a;
  ds::SplitMix64 rng(0x0DDBA11);
  for (Index D = 1; D <= 8; ++D)
    for (Index k = 1; k <= 3; ++k)
      for (Index c = 1; c <= 5; ++c)
        for (Index P = 0; P <= 2; ++P) {
          const ds::Signal<ds::Channels> xi =
              dd::random_channel_signal(rng, D, 1);
          std::vector<double> taps;
          for (Index n = 0; n < c; ++n)
            taps.push_back(dd::random_sample<double>(rng));
          const ds::FilterBank w(c, 1, 1, taps);
          const Index out_len = k * (D - 1) + c - 2 * P;
          if (out_len >= 1) {
            a.require(ds::transposed_conv(xi, w, k, P).dim() == out_len,
                      "length law", D, k);
          } else {
            bool threw = false;
            try {
              ds::transposed_conv(xi, w, k, P);
            } catch (const ds::LengthError&) {
              threw = true;
            }
            a.require(threw, "short-signal rejection", D, k);
          }
        }
  for (Index u : {2, 4})
    for (Index m = 1; m <= 3; ++m)
      for (int t = 0; t < 10; ++t) {
        const Index D = rng.range(1, 9);
        const ds::Signal<ds::Channels> xi = dd::random_channel_signal(rng, D, m);
        a.require(
            dd::same_signal(
                ds::transposed_conv(xi, ds::zoh_filter_bank(u, m), u, u / 2),
                ds::upsample_zoh(u, xi)),
            "hold equivalence", u, m);
      }
  for (Index u = 1; u <= 4; ++u)
    for (Index m = 1; m <= 2; ++m)
      for (Index n = 1; n <= 2; ++n)
        for (int t = 0; t < 10; ++t) {
          const Index D = rng.range(1, 8);
          const ds::Signal<ds::Channels> xi =
              dd::random_channel_signal(rng, D, m);
          std::vector<double> vals;
          for (Index x = 0; x < u * m * n; ++x)
            vals.push_back(dd::random_sample<double>(rng));
          const ds::FilterBank w(u, m, n, vals);
          a.require(dd::same_signal(ds::duc(xi, ds::duc_reorder(w), u),
                                    ds::transposed_conv(xi, w, u, 0)),
                    "reorder equivalence", u, m);
        }
  return a;
}

// ---------------------------------------------------------------------------
// Criterion 9: the planar scan against its per-patch oracle.

ds::Kernel2D<I64, I64> kernel2d(ds::SplitMix64& rng, Index r, Index c) {
  switch (rng.range(0, 3)) {
    case 0:
      return ds::Kernel2D<I64, I64>(
          r, c,
          [](const ds::Image<I64>& w) {
            I64 acc = 0;
            for (Index i = 1; i <= w.rows(); ++i)
              for (Index j = 1; j <= w.cols(); ++j) acc += w.at(i, j);
            return acc;
          },
          "sum");
    case 1:
      return ds::Kernel2D<I64, I64>(
          r, c,
          [](const ds::Image<I64>& w) {
            I64 acc = w.at(1, 1);
            for (Index i = 1; i <= w.rows(); ++i)
              for (Index j = 1; j <= w.cols(); ++j)
                if (w.at(i, j) > acc) acc = w.at(i, j);
            return acc;
          },
          "max");
    case 2:
      return ds::Kernel2D<I64, I64>(
          r, c,
          [](const ds::Image<I64>& w) {
            I64 acc = w.at(1, 1);
            for (Index i = 1; i <= w.rows(); ++i)
              for (Index j = 1; j <= w.cols(); ++j)
                if (w.at(i, j) < acc) acc = w.at(i, j);
            return acc;
          },
          "min");
    default: {
      std::vector<I64> weights;
      for (Index n = 0; n < r * c; ++n) weights.push_back(rng.range(-3, 3));
      return ds::Kernel2D<I64, I64>(
          r, c,
          [weights](const ds::Image<I64>& w) {
            I64 acc = 0;
            std::size_t n = 0;
            for (Index i = 1; i <= w.rows(); ++i)
              for (Index j = 1; j <= w.cols(); ++j) acc += weights[n++] * w.at(i, j);
            return acc;
          },
          "weighted");
    }
  }
}

Area planar() {
  Area a;
  ds::SplitMix64 rng(0x91A4A8);
  for (long long trial = 0; trial < 200; ++trial) {
    const Index L = rng.range(1, 2);
    std::vector<ds::Layer2D<I64>> layers;
    for (Index j = 0; j < L; ++j) {
      const Index fr = rng.range(1, 3);
      const Index fc = rng.range(1, 3);
      const Index gr = rng.range(1, 2);
      const Index gc = rng.range(1, 2);
      layers.push_back({kernel2d(rng, fr, fc), kernel2d(rng, gr, gc)});
    }
    const ds::Chain2D<I64> chain(layers, rng.range(-9, 9));
    const Index br = chain.field_rows();
    const Index bc = chain.field_cols();
    const Index rows = rng.range(br, 12);
    const Index cols = rng.range(bc, 12);
    std::vector<I64> px;
    for (Index n = 0; n < rows * cols; ++n) px.push_back(rng.range(-9, 9));
    const ds::Image<I64> xi(rows, cols, px);

    const ds::Image<I64> dense = ds::exact_scan2d(chain, xi);
    bool ok = dense.rows() == rows - br + 1 && dense.cols() == cols - bc + 1;
    for (Index i = 1; ok && i <= dense.rows(); ++i)
      for (Index j = 1; ok && j <= dense.cols(); ++j)
        ok = ds::eval_stride2d(chain, ds::patch(xi, br, bc, i, j)).at(1, 1) ==
             dense.at(i, j);
    a.require(ok, "planar per-patch oracle", trial);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Criterion 10: the command-line front end.

std::string slurp(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream text;
  text << file.rdbuf();
  return text.str();
}

Area cli_round_trips() {
  Area a;
  std::string bin = SCAN_CLI_PATH;
  if (const char* env = std::getenv("SCAN_CLI")) bin = env;
  a.require(!bin.empty() && access(bin.c_str(), X_OK) == 0,
            "scan binary not reachable");
  if (!a.ok) return a;

  const std::string dir =
      "/tmp/densescan_accept_" + std::to_string(getpid());
  mkdir(dir.c_str(), 0755);
  const auto file = [&](const std::string& name) { return dir + "/" + name; };
  {
    std::ofstream chain(file("chain.json"));
    chain << R"({"layers": [
      {"kind": "conv",
       "weights": {"spatial": 2, "in": 1, "out": 1, "values": [1, 1]}},
      {"kind": "pool-max", "k": 2}]})";
    std::ofstream bypass(file("bypass.json"));
    bypass << R"({"layers": [{"kind": "bypass"}]})";
  }
  const auto mono = [](std::vector<double> xs) {
    std::vector<ds::Channels> samples;
    for (double x : xs) samples.push_back({x});
    return ds::Signal<ds::Channels>(std::move(samples));
  };
  ds::write_signal_file(file("six.nsf"), mono({1, 2, 3, 4, 5, 6}));
  ds::write_signal_file(file("seven.nsf"), mono({1, 2, 3, 4, 5, 6, 7}));
  ds::write_signal_file(file("tricky.nsf"),
                        mono({0.1, 1.0 / 3.0, 1e-300, -0.0, 12345.678}));

  const auto run = [&](const std::string& args, const std::string& tag) {
    const std::string cmd = bin + " " + args + " > " + file(tag + ".out") +
                            " 2> " + file(tag + ".err");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };

  // The self-check passes on its defaults, and its output is a pure
  // function of the seed.
  a.require(run("verify", "v1") == 0, "self-check exit status");
  a.require(run("verify", "v2") == 0, "self-check exit status, second run");
  const std::string v1 = slurp(file("v1.out"));
  a.require(!v1.empty() && v1 == slurp(file("v2.out")),
            "self-check reproducibility");

  // Where the regimes are proved equal, the output files agree byte for
  // byte. D=6 satisfies the sliding divisibility, D=7 the relaxed one.
  const auto scan = [&](const char* mode, const char* input,
                        const std::string& tag) {
    return run(std::string("scan --chain ") + file("chain.json") +
                   " --input " + file(input) + " --mode " + mode +
                   " --output " + file(tag + ".nsf"),
               tag);
  };
  a.require(scan("exact", "six.nsf", "m_exact") == 0, "scan exact");
  a.require(scan("stride", "six.nsf", "m_stride") == 0, "scan stride");
  a.require(scan("dilate", "six.nsf", "m_dilate") == 0, "scan dilate");
  a.require(scan("stitch", "six.nsf", "m_stitch") == 0, "scan stitch");
  a.require(scan("mixed:1", "six.nsf", "m_mixed") == 0, "scan mixed");
  const std::string exact6 = slurp(file("m_exact.nsf"));
  a.require(!exact6.empty() && exact6 == slurp(file("m_stride.nsf")),
            "brute-force bytes");
  a.require(exact6 == slurp(file("m_dilate.nsf")), "dilate bytes");
  a.require(exact6 == slurp(file("m_stitch.nsf")), "stitch bytes");
  a.require(exact6 == slurp(file("m_mixed.nsf")), "mixed bytes");
  a.require(scan("relax", "seven.nsf", "m_relax") == 0, "scan relax");
  a.require(scan("relaxed-scan", "seven.nsf", "m_rscan") == 0,
            "scan relaxed-scan");
  const std::string relax7 = slurp(file("m_relax.nsf"));
  a.require(!relax7.empty() && relax7 == slurp(file("m_rscan.nsf")),
            "relaxed bytes");

  // A bypass chain turns scanning into the identity, so the output file
  // must reproduce the input byte for byte.
  a.require(run("scan --chain " + file("bypass.json") + " --input " +
                    file("tricky.nsf") + " --output " + file("copy.nsf"),
                "copy") == 0,
            "bypass scan");
  const std::string original = slurp(file("tricky.nsf"));
  a.require(!original.empty() && slurp(file("copy.nsf")) == original,
            "lossless round trip");
  return a;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  CorpusResult cr;
  run_corpus<I64>(0x51A7ED00, 120, cr);
  run_corpus<double>(0xD0B1E500, 120, cr);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  cr.windows.require(cr.chains >= 200, "corpus too small");
  cr.windows.require(seconds < 60.0, "corpus too slow");
  cr.equiv.require(cr.trim_hits >= 20, "too few trimming dispatches");
  cr.equiv.require(cr.stuff_hits >= 20, "too few stuffing dispatches");
  cr.zeta.require(cr.zeta_checks >= 20, "too few dummy substitutions");

  Area counts = cr.counts;
  counts_anchor(counts);

  report(1, "dense-scan-equals-per-window", cr.windows);
  report(2, "regime-equivalences", cr.equiv);
  report(3, "dummy-independence", cr.zeta);
  report(4, "fragment-algebra", fragment_algebra());
  report(5, "shape-profiles", cr.dims);
  report(6, "work-counts-and-ratios", counts);
  report(7, "two-scale-pairing", two_scale());
  report(8, "upsampling-theorems", upsampling());
  report(9, "planar-scan", planar());
  report(10, "cli-round-trips", cli_round_trips());

  std::fprintf(stderr,
               "corpus: %lld chains, %lld lengths, %.1fs; mixed dispatch "
               "trim=%lld stuff=%lld; dummy substitutions=%lld\n",
               cr.chains, cr.lengths, seconds, cr.trim_hits, cr.stuff_hits,
               cr.zeta_checks);
  return g_failures == 0 ? 0 : 1;
}
