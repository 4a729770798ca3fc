#pragma once

#include <stdexcept>
#include <string>

namespace qtorus {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A product or sum produced modes beyond the hard mode cap.
class TruncationOverflow : public Error {
 public:
  using Error::Error;
};

class AxisOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Sampling grid too coarse for the requested spectral operation.
class UnderResolvedGrid : public Error {
 public:
  using Error::Error;
};

/// A truncating spectral step discarded more mass than allowed.
class SpectralUnderresolution : public Error {
 public:
  using Error::Error;
};

class SeriesDivergence : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Fewer usable samples than a fit or scan requires.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace qtorus
