#ifndef SPECDEP_ERRORS_HPP
#define SPECDEP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace specdep {

// Malformed or unreadable input data (files, configs).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input with parameters the method cannot run on
// (too few observations per block, infeasible quantile level, ...).
class InfeasibleError : public std::invalid_argument {
 public:
  explicit InfeasibleError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace specdep

#endif  // SPECDEP_ERRORS_HPP
