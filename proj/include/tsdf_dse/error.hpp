#pragma once

#include <stdexcept>
#include <string>

namespace tsdf {

// Precondition and configuration violations use std::invalid_argument.
// File-level problems use the two types below so callers (the CLI in
// particular) can tell a bad flag from a bad file.

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsdf
