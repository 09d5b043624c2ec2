#pragma once

#include <stdexcept>
#include <string>

namespace rwsa {

/// Addition of two nonzero scalars carrying different powers of sqrt(pi).
class exponent_mismatch : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal invariant of the computation was violated. Always a bug
/// upstream of the point where it is raised.
class invariant_violation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A coefficient that must be real rational carries an imaginary part or a
/// residual power of sqrt(pi).
class rationality_violation : public invariant_violation {
 public:
  using invariant_violation::invariant_violation;
};

class cache_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rwsa
