// Command-line front end: scan signals with configured chains, run the
// randomized self-check, and emit shape/count reports.
//
// Exit codes: 0 success, 1 self-check failure or internal error, 2 bad
// usage or unparsable input, 3 violated precondition, 4 file I/O trouble.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "densescan/chain.hpp"
#include "densescan/chain_config.hpp"
#include "densescan/complexity.hpp"
#include "densescan/error.hpp"
#include "densescan/nsf.hpp"
#include "densescan/verify.hpp"

namespace {

using namespace densescan;

struct Options {
  std::string chain_path;
  std::string input_path;
  std::string output_path;
  std::string mode = "exact";
  Index level = 0;
  std::uint64_t seed = 1;
  std::int64_t trials = 200;
  Index max_l = 3;
  Index max_c = 3;
  Index max_k = 3;
  Index max_d = 64;
  Index d_from = 0;
  Index d_to = 0;
  Index d_step = 1;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw IoError("failed writing '" + path + "'");
}

int cmd_scan(const Options& opt) {
  const ChainConfig cfg = ChainConfig::parse_file(opt.chain_path);
  const Signal<Channels> xi = read_signal_file(opt.input_path);
  const ProcessingChain<Channels> chain =
      cfg.instantiate(static_cast<Index>(xi[1].size()));

  std::string mode = opt.mode;
  Index level = opt.level;
  if (mode.rfind("mixed", 0) == 0 && mode.size() > 5) {
    if (mode[5] != ':')
      throw ParseError("bad mode '" + mode + "'; use mixed:<level>");
    level = std::stoll(mode.substr(6));
    mode = "mixed";
  }

  if (mode == "slide") {
    const FragmentedSignal<Channels> out = eval_slide(chain, xi);
    write_fragmented_file(opt.output_path, out);
    std::cout << "slide: " << out.rdim() << " samples x " << out.cdim()
              << " fragments -> " << opt.output_path << "\n";
    return 0;
  }

  Signal<Channels> out = xi;
  if (mode == "stride") {
    // per-window brute force; the oracle the fast modes are held to
    const Index B = chain.receptive_field();
    if (xi.dim() < B)
      throw LengthError("scan: signal length " + std::to_string(xi.dim()) +
                        " below receptive field " + std::to_string(B));
    std::vector<Channels> samples;
    for (Index i = 1; i <= xi.dim() - B + 1; ++i)
      samples.push_back(eval_stride(chain, subsignal(xi, B, i))[1]);
    out = Signal<Channels>(std::move(samples));
  } else if (mode == "exact")
    out = exact_scan(chain, xi);
  else if (mode == "dilate")
    out = eval_dilate(chain, xi);
  else if (mode == "relax")
    out = eval_relax(chain, xi);
  else if (mode == "relaxed-scan")
    out = relaxed_scan(chain, xi);
  else if (mode == "stitch")
    out = shift_and_stitch(chain, xi);
  else if (mode == "mixed")
    out = mixed_scan(chain, level, xi);
  else
    throw ParseError("unknown mode '" + mode + "'");
  write_signal_file(opt.output_path, out);
  std::cout << mode << ": " << out.dim() << " samples -> " << opt.output_path
            << "\n";
  return 0;
}

int cmd_verify(const Options& opt) {
  VerifyOptions vo;
  vo.seed = opt.seed;
  vo.trials = opt.trials;
  vo.max_l = opt.max_l;
  vo.max_c = opt.max_c;
  vo.max_k = opt.max_k;
  vo.max_d = opt.max_d;
  const VerifyReport rep = run_verification(vo);
  std::cout << rep.to_text();
  return rep.pass() ? 0 : 1;
}

int cmd_count(const Options& opt) {
  const ChainConfig cfg = ChainConfig::parse_file(opt.chain_path);
  const ProcessingChain<Channels> chain = cfg.instantiate();
  const Index d_to = opt.d_to == 0 ? opt.d_from : opt.d_to;
  const std::vector<ReportRow> rows =
      emit_report(chain, opt.d_from, d_to, opt.d_step);
  std::ostringstream csv;
  write_report_csv(csv, rows);
  write_text(opt.output_path, csv.str());
  return 0;
}

std::string join_indices(const std::vector<Index>& v) {
  std::string out;
  for (std::size_t n = 0; n < v.size(); ++n) {
    if (n > 0) out += ' ';
    out += std::to_string(v[n]);
  }
  return out;
}

int cmd_dims(const Options& opt) {
  const ChainConfig cfg = ChainConfig::parse_file(opt.chain_path);
  const ProcessingChain<Channels> chain = cfg.instantiate();
  const DimReport rep = chain_dims(chain, opt.d_from);
  std::ostringstream os;
  os << "D=" << rep.D << " B=" << rep.B << " kstar=" << rep.kstar_total
     << "\n";
  os << "patch lengths u_j: " << join_indices(rep.u) << "\n";
  if (rep.slide_applicable)
    os << "sliding rows: " << join_indices(rep.u_row)
       << "\nsliding fragments: " << join_indices(rep.u_col) << "\n";
  else
    os << "sliding: not applicable (" << rep.slide_reason << ")\n";
  os << "dilated lengths v_j: " << join_indices(rep.v) << "\n";
  if (rep.relax_applicable)
    os << "relaxed lengths w_j: " << join_indices(rep.w) << "\n";
  else
    os << "relaxed: not applicable (" << rep.relax_reason << ")\n";
  for (const MixedDims& md : rep.mixed) {
    if (md.applicable)
      os << "mixed split " << md.level << ": t=" << md.t << " rows: "
         << join_indices(md.rows) << " fragments: " << join_indices(md.cols)
         << "\n";
    else
      os << "mixed split " << md.level << ": not applicable (" << md.reason
         << ")\n";
  }
  write_text(opt.output_path, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"exact dense scanning of processing chains over signals"};
  app.require_subcommand(1);

  CLI::App* scan = app.add_subcommand("scan", "evaluate a chain over a signal");
  scan->add_option("--chain", opt.chain_path, "chain config (JSON)")
      ->required();
  scan->add_option("--input", opt.input_path, "input signal (NSF)")
      ->required();
  scan->add_option("--output", opt.output_path, "output file (NSF)")
      ->required();
  scan->add_option("--mode", opt.mode,
                   "stride | slide | exact | dilate | relax | relaxed-scan | "
                   "stitch | mixed:<level>");
  scan->add_option("--level", opt.level, "split level for mixed mode");

  CLI::App* verify =
      app.add_subcommand("verify", "run the randomized self-check");
  verify->add_option("--seed", opt.seed, "base seed (default 1)");
  verify->add_option("--trials", opt.trials, "trial count (default 200)");
  verify->add_option("--max-l", opt.max_l, "layer cap per random chain");
  verify->add_option("--max-c", opt.max_c, "window-width cap");
  verify->add_option("--max-k", opt.max_k, "pool-width cap");
  verify->add_option("--max-d", opt.max_d, "signal-length cap");

  CLI::App* count = app.add_subcommand(
      "count", "emit measured vs predicted invocation counts as CSV");
  count->add_option("--chain", opt.chain_path, "chain config (JSON)")
      ->required();
  count->add_option("--d-from", opt.d_from, "first signal length")->required();
  count->add_option("--d-to", opt.d_to, "last signal length (default d-from)");
  count->add_option("--d-step", opt.d_step, "length step (default 1)");
  count->add_option("--output", opt.output_path, "CSV file (default stdout)");

  CLI::App* dims =
      app.add_subcommand("dims", "print the closed-form shape profile");
  dims->add_option("--chain", opt.chain_path, "chain config (JSON)")
      ->required();
  dims->add_option("--d-from", opt.d_from, "signal length D")->required();
  dims->add_option("--output", opt.output_path, "file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (scan->parsed()) return cmd_scan(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (count->parsed()) return cmd_count(opt);
    if (dims->parsed()) return cmd_dims(opt);
    std::cerr << "error: no command\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
