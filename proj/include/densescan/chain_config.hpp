#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "densescan/chain.hpp"
#include "densescan/error.hpp"
#include "densescan/nsf.hpp"
#include "densescan/numeric.hpp"
#include "densescan/signal.hpp"

namespace densescan {

// JSON chain description:
//
//   {
//     "dummy": 0.0,                       // scalar or per-channel array
//     "declared_b": 5,                    // optional cross-check
//     "layers": [
//       {"kind": "conv", "weights": "bank.nsf"},
//       {"kind": "conv", "weights": {"spatial": 2, "in": 1, "out": 3,
//                                    "values": [ ... ]}},
//       {"kind": "pointwise", "fn": "relu"},   // relu | abs | identity
//       {"kind": "bias", "values": [ ... ]},
//       {"kind": "pool-max", "k": 2},
//       {"kind": "pool-avg", "k": 2},
//       {"kind": "bypass"}
//     ]
//   }
//
// Relative weight paths resolve against the config file's directory.
struct ChainConfig {
  struct Layer {
    std::string kind;
    std::optional<FilterBank> bank;  // conv
    std::string fn;                  // pointwise
    Channels values;                 // bias
    Index k = 1;                     // pools
  };

  double dummy_scalar = 0.0;
  std::optional<Channels> dummy_channels;
  std::optional<Index> declared_b;
  std::vector<Layer> layers;

  static ChainConfig parse(const std::string& text,
                           const std::string& base_dir);
  static ChainConfig parse_file(const std::string& path);

  // Channel count the chain expects: the first convolution pins it; chains
  // without one run on single-channel samples unless told otherwise.
  Index input_channels() const {
    for (const Layer& ly : layers)
      if (ly.kind == "conv") return ly.bank->in_channels();
    return 1;
  }

  ProcessingChain<Channels> instantiate(Index m) const;
  ProcessingChain<Channels> instantiate() const {
    return instantiate(input_channels());
  }
};

namespace detail {

inline Index json_index(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ParseError(std::string("chain config: missing integer '") + key +
                     "'");
  return j[key].get<Index>();
}

inline std::vector<double> json_doubles(const nlohmann::json& j,
                                        const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    throw ParseError(std::string("chain config: missing array '") + key + "'");
  std::vector<double> out;
  for (const nlohmann::json& v : j[key]) {
    if (!v.is_number())
      throw ParseError(std::string("chain config: non-numeric entry in '") +
                       key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

inline FilterBank parse_bank(const nlohmann::json& weights,
                             const std::string& base_dir) {
  if (weights.is_string()) {
    std::string path = weights.get<std::string>();
    if (!path.empty() && path.front() != '/' && !base_dir.empty())
      path = base_dir + "/" + path;
    return read_bank_file(path);
  }
  if (!weights.is_object())
    throw ParseError("chain config: conv weights must be a file name or an "
                     "inline object");
  return FilterBank(json_index(weights, "spatial"), json_index(weights, "in"),
                    json_index(weights, "out"),
                    json_doubles(weights, "values"));
}

}  // namespace detail

inline ChainConfig ChainConfig::parse(const std::string& text,
                                      const std::string& base_dir) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("chain config: ") + e.what());
  }
  if (!root.is_object())
    throw ParseError("chain config: top level must be an object");

  ChainConfig cfg;
  if (root.contains("dummy")) {
    const nlohmann::json& d = root["dummy"];
    if (d.is_number())
      cfg.dummy_scalar = d.get<double>();
    else if (d.is_array())
      cfg.dummy_channels = detail::json_doubles(root, "dummy");
    else
      throw ParseError("chain config: 'dummy' must be a number or an array");
  }
  if (root.contains("declared_b")) {
    if (!root["declared_b"].is_number_integer())
      throw ParseError("chain config: 'declared_b' must be an integer");
    cfg.declared_b = root["declared_b"].get<Index>();
  }
  if (!root.contains("layers") || !root["layers"].is_array() ||
      root["layers"].empty())
    throw ParseError("chain config: 'layers' must be a non-empty array");

  for (const nlohmann::json& jl : root["layers"]) {
    if (!jl.is_object() || !jl.contains("kind") || !jl["kind"].is_string())
      throw ParseError("chain config: every layer needs a string 'kind'");
    Layer ly;
    ly.kind = jl["kind"].get<std::string>();
    if (ly.kind == "conv") {
      if (!jl.contains("weights"))
        throw ParseError("chain config: conv layer needs 'weights'");
      ly.bank = detail::parse_bank(jl["weights"], base_dir);
    } else if (ly.kind == "pointwise") {
      if (!jl.contains("fn") || !jl["fn"].is_string())
        throw ParseError("chain config: pointwise layer needs string 'fn'");
      ly.fn = jl["fn"].get<std::string>();
      if (ly.fn != "relu" && ly.fn != "abs" && ly.fn != "identity")
        throw ParseError("chain config: unknown pointwise fn '" + ly.fn + "'");
    } else if (ly.kind == "bias") {
      ly.values = detail::json_doubles(jl, "values");
      if (ly.values.empty())
        throw ParseError("chain config: bias layer needs values");
    } else if (ly.kind == "pool-max" || ly.kind == "pool-avg") {
      ly.k = detail::json_index(jl, "k");
      if (ly.k < 1)
        throw ParseError("chain config: pool width must be >= 1");
    } else if (ly.kind != "bypass") {
      throw ParseError("chain config: unknown layer kind '" + ly.kind + "'");
    }
    cfg.layers.push_back(std::move(ly));
  }
  return cfg;
}

inline ChainConfig ChainConfig::parse_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream text;
  text << file.rdbuf();
  const std::size_t slash = path.find_last_of('/');
  const std::string base_dir =
      slash == std::string::npos ? std::string() : path.substr(0, slash);
  return parse(text.str(), base_dir);
}

inline ProcessingChain<Channels> ChainConfig::instantiate(Index m) const {
  if (m < 1) throw BadConfig("chain config: channel count must be >= 1");
  const Index m_input = m;
  std::vector<ChainLayer<Channels>> built;
  for (std::size_t n = 0; n < layers.size(); ++n) {
    const Layer& ly = layers[n];
    ChainLayer<Channels> out;
    out.f = identity_kernel<Channels>();
    out.g = identity_kernel<Channels>();
    if (ly.kind == "conv") {
      if (ly.bank->in_channels() != m)
        throw ChannelMismatch("layer " + std::to_string(n + 1) +
                              ": conv expects " +
                              std::to_string(ly.bank->in_channels()) +
                              " channels, gets " + std::to_string(m));
      out.f = conv_kernel(*ly.bank);
      m = ly.bank->out_channels();
    } else if (ly.kind == "pointwise") {
      if (ly.fn == "relu")
        out.f = pointwise_kernel([](double v) { return v < 0.0 ? 0.0 : v; },
                                 m, "relu");
      else if (ly.fn == "abs")
        out.f = pointwise_kernel([](double v) { return std::fabs(v); }, m,
                                 "abs");
      else
        out.f = pointwise_kernel([](double v) { return v; }, m, "identity");
    } else if (ly.kind == "bias") {
      if (static_cast<Index>(ly.values.size()) != m)
        throw ChannelMismatch("layer " + std::to_string(n + 1) + ": bias has " +
                              std::to_string(ly.values.size()) +
                              " values, chain carries " + std::to_string(m) +
                              " channels");
      out.f = bias_kernel(ly.values);
    } else if (ly.kind == "pool-max") {
      out.g = max_pool_kernel(ly.k, m);
    } else if (ly.kind == "pool-avg") {
      out.g = avg_pool_kernel(ly.k, m);
    }
    built.push_back(std::move(out));
  }
  Channels zeta;
  if (dummy_channels) {
    if (static_cast<Index>(dummy_channels->size()) != m_input)
      throw ChannelMismatch("chain config: dummy has " +
                            std::to_string(dummy_channels->size()) +
                            " channels, input carries " +
                            std::to_string(m_input));
    zeta = *dummy_channels;
  } else {
    zeta = Channels(static_cast<std::size_t>(m_input), dummy_scalar);
  }
  if (declared_b)
    return ProcessingChain<Channels>(std::move(built), std::move(zeta),
                                     *declared_b);
  return ProcessingChain<Channels>(std::move(built), std::move(zeta));
}

}  // namespace densescan
