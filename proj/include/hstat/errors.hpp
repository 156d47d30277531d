/// @file errors.hpp
/// @brief Exception types shared by every module.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hstat {

enum class ErrorKind {
  Domain,       // point or region outside the admissible domain
  Validity,     // background metric not symmetric positive definite
  Degeneracy,   // induced metric not positive definite
  Stencil,      // finite-difference stencil leaves the grid
  Support,      // test function support touches the clamped band
  Parameter,    // invalid scalar parameter
  Shape,        // array or matrix of the wrong shape
  Ellipticity,  // constant tensor fails the Legendre condition
  Assembly,     // discrete system could not be factored
  Hypothesis,   // decay-lemma hypothesis violated on a sample pair
  Steepness,    // optimizer iterate exceeds the Hessian cap
  Io,           // file or format problem
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace hstat
