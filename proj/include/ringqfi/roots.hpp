#pragma once

#include <boost/math/tools/roots.hpp>
#include <cstdint>
#include <utility>

#include "ringqfi/errors.hpp"

namespace ringqfi {

// Root of f on [lo, hi]; f(lo) and f(hi) must differ in sign.
template <typename F>
double bracketed_root(F&& f, double lo, double hi, double abs_tol = 0.0) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw BracketError("no sign change on bracket");
  std::uintmax_t max_iter = 200;
  auto tol = [abs_tol](double x, double y) {
    return std::abs(x - y) <= abs_tol || boost::math::tools::eps_tolerance<double>(52)(x, y);
  };
  const std::pair<double, double> r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
  return 0.5 * (r.first + r.second);
}

}  // namespace ringqfi
