#ifndef STYLECODEC_ERRORS_HPP_
#define STYLECODEC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace stylecodec {

/// Base class for every error raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or unparseable configuration / manifest text.
struct ConfigError : Error {
  using Error::Error;
};

/// A value violates a documented invariant or precondition.
struct ValidationError : Error {
  using Error::Error;
};

/// Tensor or parameter shapes do not line up.
struct ShapeError : Error {
  using Error::Error;
};

/// Filesystem or decoding failure; message carries the failing path.
struct IoError : Error {
  using Error::Error;
};

/// Serialized container has an unsupported schema version.
struct SchemaError : Error {
  using Error::Error;
};

}  // namespace stylecodec

#endif  // STYLECODEC_ERRORS_HPP_
