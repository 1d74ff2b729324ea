#pragma once

#include <stdexcept>
#include <string>

namespace infotriage {

// Base class for every error the engine raises on bad input or a failed
// collaborator. Anything else escaping the library is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace infotriage
