#pragma once

#include <stdexcept>
#include <string>

namespace densescan {

// Base of everything this library throws on contract violations.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

struct LengthError : Error {
  using Error::Error;
};

struct DivisibilityError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct ChannelMismatch : Error {
  using Error::Error;
};

// Sample type has no designated zero element (needed by spreading and
// Dirichlet padding).
struct NoZeroElement : Error {
  using Error::Error;
};

struct OddFactor : Error {
  using Error::Error;
};

struct IllFormedChain : Error {
  using Error::Error;
};

struct BadConfig : Error {
  using Error::Error;
};

// Rejected sample values (NaN in numeric signals).
struct BadSample : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace densescan
