#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "densescan/error.hpp"
#include "densescan/euclid.hpp"
#include "densescan/numeric.hpp"
#include "densescan/planar2d.hpp"
#include "densescan/signal.hpp"

namespace densescan {

// Text container for signals, fragment stacks, images and filter banks.
//
//   line 1:  nsf <rank> <extent...> <channels>
//   then:    one sample per line, <channels> numbers separated by single
//            spaces; lines starting with '#' are skipped
//
// Encodings: rank 1 = signal (extent D), rank 2 = fragment stack or image
// (extents rows cols, samples row-major), rank 3 = filter bank (extents
// spatial in out, channels 1, innermost index fastest: out, then in, then
// spatial). LF line endings; numbers are shortest round-trip decimals.

inline std::string format_sample(double v) {
  char buf[64];
  const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc())
    throw IoError("cannot format sample value");
  return std::string(buf, res.ptr);
}

inline double parse_sample(std::string_view token, Index line_no) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const std::from_chars_result res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" +
                     std::string(token) + "'");
  return v;
}

namespace detail {

struct NsfPayload {
  Index rank = 0;
  std::vector<Index> extents;
  Index channels = 0;
  std::vector<std::vector<double>> lines;  // one entry per sample line
};

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t next = line.find(' ', pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

inline Index parse_extent(std::string_view token, Index line_no) {
  Index v = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const std::from_chars_result res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || v < 1)
    throw ParseError("line " + std::to_string(line_no) +
                     ": bad extent '" + std::string(token) + "'");
  return v;
}

inline NsfPayload read_payload(std::istream& is, Index expected_rank) {
  NsfPayload payload;
  std::string line;
  Index line_no = 0;

  if (!std::getline(is, line))
    throw ParseError("line 1: missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r')
    throw ParseError("line 1: CR line ending; the format uses LF");
  const std::vector<std::string_view> head = split_fields(line);
  if (head.size() < 3 || head[0] != "nsf")
    throw ParseError("line 1: expected 'nsf <rank> <extent...> <channels>'");
  payload.rank = parse_extent(head[1], 1);
  if (payload.rank != expected_rank)
    throw ParseError("line 1: rank " + std::to_string(payload.rank) +
                     ", expected " + std::to_string(expected_rank));
  if (static_cast<Index>(head.size()) != payload.rank + 3)
    throw ParseError("line 1: expected " + std::to_string(payload.rank) +
                     " extents plus a channel count");
  Index total = 1;
  for (Index n = 0; n < payload.rank; ++n) {
    payload.extents.push_back(
        parse_extent(head[static_cast<std::size_t>(2 + n)], 1));
    total *= payload.extents.back();
  }
  payload.channels = parse_extent(head.back(), 1);

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      throw ParseError("line " + std::to_string(line_no) +
                       ": CR line ending; the format uses LF");
    if (!line.empty() && line[0] == '#') continue;
    if (line.empty())
      throw ParseError("line " + std::to_string(line_no) + ": blank line");
    if (static_cast<Index>(payload.lines.size()) == total)
      throw ParseError("line " + std::to_string(line_no) +
                       ": more than " + std::to_string(total) +
                       " sample lines");
    const std::vector<std::string_view> fields = split_fields(line);
    if (static_cast<Index>(fields.size()) != payload.channels)
      throw ParseError("line " + std::to_string(line_no) + ": " +
                       std::to_string(fields.size()) + " values, expected " +
                       std::to_string(payload.channels));
    std::vector<double> values;
    values.reserve(fields.size());
    for (const std::string_view tok : fields)
      values.push_back(parse_sample(tok, line_no));
    payload.lines.push_back(std::move(values));
  }
  if (static_cast<Index>(payload.lines.size()) != total)
    throw ParseError("line " + std::to_string(line_no) + ": " +
                     std::to_string(payload.lines.size()) +
                     " sample lines, expected " + std::to_string(total));
  return payload;
}

inline void write_line(std::ostream& os, const std::vector<double>& values) {
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (n > 0) os << ' ';
    os << format_sample(values[n]);
  }
  os << '\n';
}

}  // namespace detail

inline void write_signal(std::ostream& os, const Signal<Channels>& xi) {
  const Index m = static_cast<Index>(xi[1].size());
  os << "nsf 1 " << xi.dim() << ' ' << m << '\n';
  for (Index i = 1; i <= xi.dim(); ++i) {
    if (static_cast<Index>(xi[i].size()) != m)
      throw ChannelMismatch("write_signal: ragged channel counts");
    detail::write_line(os, xi[i]);
  }
}

inline Signal<Channels> read_signal(std::istream& is) {
  detail::NsfPayload payload = detail::read_payload(is, 1);
  return Signal<Channels>(std::move(payload.lines));
}

inline void write_fragmented(std::ostream& os,
                             const FragmentedSignal<Channels>& chi) {
  const Index m = static_cast<Index>(chi.at(1, 1).size());
  os << "nsf 2 " << chi.rdim() << ' ' << chi.cdim() << ' ' << m << '\n';
  os << "# fragments=" << chi.cdim() << '\n';
  for (Index row = 1; row <= chi.rdim(); ++row)
    for (Index col = 1; col <= chi.cdim(); ++col) {
      if (static_cast<Index>(chi.at(row, col).size()) != m)
        throw ChannelMismatch("write_fragmented: ragged channel counts");
      detail::write_line(os, chi.at(row, col));
    }
}

inline FragmentedSignal<Channels> read_fragmented(std::istream& is) {
  detail::NsfPayload payload = detail::read_payload(is, 2);
  return FragmentedSignal<Channels>(payload.extents[0], payload.extents[1],
                                    std::move(payload.lines));
}

inline void write_image(std::ostream& os, const Image<double>& xi) {
  os << "nsf 2 " << xi.rows() << ' ' << xi.cols() << " 1\n";
  for (Index i = 1; i <= xi.rows(); ++i)
    for (Index j = 1; j <= xi.cols(); ++j)
      os << format_sample(xi.at(i, j)) << '\n';
}

inline Image<double> read_image(std::istream& is) {
  detail::NsfPayload payload = detail::read_payload(is, 2);
  if (payload.channels != 1)
    throw ParseError("image payload must have one channel per line");
  std::vector<double> px;
  px.reserve(payload.lines.size());
  for (const std::vector<double>& ln : payload.lines) px.push_back(ln[0]);
  return Image<double>(payload.extents[0], payload.extents[1], std::move(px));
}

inline void write_bank(std::ostream& os, const FilterBank& w) {
  os << "nsf 3 " << w.spatial() << ' ' << w.in_channels() << ' '
     << w.out_channels() << " 1\n";
  for (Index mu = 1; mu <= w.spatial(); ++mu)
    for (Index lambda = 1; lambda <= w.in_channels(); ++lambda)
      for (Index kappa = 1; kappa <= w.out_channels(); ++kappa)
        os << format_sample(w.at(mu, lambda, kappa)) << '\n';
}

inline FilterBank read_bank(std::istream& is) {
  detail::NsfPayload payload = detail::read_payload(is, 3);
  if (payload.channels != 1)
    throw ParseError("filter bank payload must have one value per line");
  std::vector<double> values;
  values.reserve(payload.lines.size());
  for (const std::vector<double>& ln : payload.lines)
    values.push_back(ln[0]);
  return FilterBank(payload.extents[0], payload.extents[1],
                    payload.extents[2], std::move(values));
}

namespace detail {

template <class Fn>
auto with_input_file(const std::string& path, Fn&& fn) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open '" + path + "' for reading");
  return fn(file);
}

template <class Fn>
void with_output_file(const std::string& path, Fn&& fn) {
  std::ofstream file(path);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  fn(file);
  file.flush();
  if (!file) throw IoError("failed writing '" + path + "'");
}

}  // namespace detail

inline Signal<Channels> read_signal_file(const std::string& path) {
  return detail::with_input_file(path,
                                 [](std::istream& is) { return read_signal(is); });
}
inline void write_signal_file(const std::string& path,
                              const Signal<Channels>& xi) {
  detail::with_output_file(path,
                           [&](std::ostream& os) { write_signal(os, xi); });
}
inline FragmentedSignal<Channels> read_fragmented_file(
    const std::string& path) {
  return detail::with_input_file(
      path, [](std::istream& is) { return read_fragmented(is); });
}
inline void write_fragmented_file(const std::string& path,
                                  const FragmentedSignal<Channels>& chi) {
  detail::with_output_file(
      path, [&](std::ostream& os) { write_fragmented(os, chi); });
}
inline Image<double> read_image_file(const std::string& path) {
  return detail::with_input_file(path,
                                 [](std::istream& is) { return read_image(is); });
}
inline void write_image_file(const std::string& path, const Image<double>& xi) {
  detail::with_output_file(path,
                           [&](std::ostream& os) { write_image(os, xi); });
}
inline FilterBank read_bank_file(const std::string& path) {
  return detail::with_input_file(path,
                                 [](std::istream& is) { return read_bank(is); });
}
inline void write_bank_file(const std::string& path, const FilterBank& w) {
  detail::with_output_file(path,
                           [&](std::ostream& os) { write_bank(os, w); });
}

}  // namespace densescan
