#pragma once

#include <stdexcept>
#include <string>

namespace souvlaki {

/// A violated precondition of a library operation (bad input graph, missing
/// mark, out-of-range index, resource cap). The CLI maps it to exit code 1.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace souvlaki
