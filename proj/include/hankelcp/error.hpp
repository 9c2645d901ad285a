#pragma once

#include <stdexcept>
#include <string>

namespace hankelcp {

/// Argument outside the mathematical domain of a function (e.g. Γ_m(a) with a <= (m-1)/2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent input data: files, configs, matrices.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hankelcp
