#ifndef SOL1D_TRIDIAG_HPP
#define SOL1D_TRIDIAG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "sol1d/errors.hpp"

namespace sol1d::detail {

/// Tridiagonal system: lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i].
/// lower[0] and upper[n-1] are ignored.
struct Tridiagonal {
  std::vector<double> lower, diag, upper, rhs;

  explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0) {}
  std::size_t size() const { return diag.size(); }
};

/// Thomas algorithm. For the M-matrices assembled by the solver this is
/// stable without pivoting and, with a nonnegative right-hand side, yields a
/// nonnegative solution (all eliminations add same-signed terms).
/// Falls back to banded partial-pivot Gaussian elimination when a pivot
/// degenerates.
std::vector<double> solve_tridiagonal(Tridiagonal sys);

}  // namespace sol1d::detail

#endif
