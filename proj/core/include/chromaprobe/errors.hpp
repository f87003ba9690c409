#pragma once

#include <stdexcept>
#include <string>

namespace chromaprobe {

/// Bad argument or malformed user input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scene spec that cannot be rasterized as requested.
class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file that does not follow its exchange format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chromaprobe
