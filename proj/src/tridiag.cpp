#include "tridiag.hpp"

#include <algorithm>
#include <limits>

namespace sol1d::detail {

namespace {

// Banded Gaussian elimination with partial pivoting. Row swaps between
// adjacent rows widen the upper band to two superdiagonals.
std::vector<double> solve_banded_pivot(Tridiagonal sys) {
  const std::size_t n = sys.size();
  std::vector<double> u2(n, 0.0);  // second superdiagonal fill-in
  auto& a = sys.lower;
  auto& b = sys.diag;
  auto& c = sys.upper;
  auto& d = sys.rhs;

  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::abs(a[k + 1]) > std::abs(b[k])) {
      std::swap(b[k], a[k + 1]);
      std::swap(c[k], b[k + 1]);
      std::swap(u2[k], c[k + 1]);
      std::swap(d[k], d[k + 1]);
    }
    if (b[k] == 0.0) throw Error("tridiagonal solve: singular matrix");
    const double m = a[k + 1] / b[k];
    b[k + 1] -= m * c[k];
    c[k + 1] -= m * u2[k];
    d[k + 1] -= m * d[k];
  }
  std::vector<double> x(n);
  if (b[n - 1] == 0.0) throw Error("tridiagonal solve: singular matrix");
  x[n - 1] = d[n - 1] / b[n - 1];
  if (n >= 2) x[n - 2] = (d[n - 2] - c[n - 2] * x[n - 1]) / b[n - 2];
  for (std::size_t i = n; i-- > 2;) {
    const std::size_t k = i - 2;
    x[k] = (d[k] - c[k] * x[k + 1] - u2[k] * x[k + 2]) / b[k];
  }
  return x;
}

}  // namespace

std::vector<double> solve_tridiagonal(Tridiagonal sys) {
  const std::size_t n = sys.size();
  if (n == 0) return {};
  if (n == 1) {
    if (sys.diag[0] == 0.0) throw Error("tridiagonal solve: singular matrix");
    return {sys.rhs[0] / sys.diag[0]};
  }
  Tridiagonal work = sys;
  auto& a = work.lower;
  auto& b = work.diag;
  auto& c = work.upper;
  auto& d = work.rhs;

  bool ok = true;
  for (std::size_t k = 1; k < n; ++k) {
    const double denom = b[k - 1];
    if (!(std::abs(denom) > std::numeric_limits<double>::min())) {
      ok = false;
      break;
    }
    const double m = a[k] / denom;
    b[k] -= m * c[k - 1];
    d[k] -= m * d[k - 1];
  }
  if (!ok) return solve_banded_pivot(std::move(sys));

  std::vector<double> x(n);
  if (!(std::abs(b[n - 1]) > std::numeric_limits<double>::min()))
    return solve_banded_pivot(std::move(sys));
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

}  // namespace sol1d::detail
