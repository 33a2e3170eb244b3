#pragma once

#include <stdexcept>
#include <string>

namespace roeforge {

// Raised when inputs have the wrong shape: mismatched dimensions, maps between
// the wrong spaces, non-bijective reindexings, empty families.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a label or point is not part of the space it is looked up in.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Raised by the JSON readers; the message carries the file and field path.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace roeforge
