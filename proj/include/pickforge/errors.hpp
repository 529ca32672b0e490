#ifndef PICKFORGE_ERRORS_HPP
#define PICKFORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pickforge {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : Error {
  using Error::Error;
};

/// Stein operator P -> P - TPT* is singular (some eigenvalue product
/// lambda_i * conj(lambda_j) sits on 1), so the solution is non-unique.
struct SteinSingularError : Error {
  using Error::Error;
};

struct NotPsdError : Error {
  using Error::Error;
};

struct SingularResolventError : Error {
  using Error::Error;
};

/// P is too close to singular for the P^{-1}-based Theta construction;
/// callers should switch to the Redheffer route.
struct DegeneratePickError : Error {
  using Error::Error;
};

struct UnsolvableError : Error {
  using Error::Error;
};

struct NotSchurError : Error {
  using Error::Error;
};

struct SpectralRadiusError : Error {
  using Error::Error;
};

struct TruncationCapError : Error {
  using Error::Error;
};

}  // namespace pickforge

#endif
