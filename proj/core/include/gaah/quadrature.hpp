#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gaah/errors.hpp"

namespace gaah::quadrature {

/// Result of an adaptive integral: value and the achieved error estimate.
template <typename T>
struct Estimate {
  T value{};
  double error = 0.0;
};

namespace detail {

template <typename F, typename Value>
void bisect(F& f, double a, double b, double tol, unsigned depth, Value& sum, double& err,
            double& l1) {
  using boost::math::quadrature::gauss_kronrod;
  double e = 0.0;
  double l = 0.0;
  const Value v = gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &e, &l);
  if (e <= tol || depth == 0 || !(b - a > 1e-15 * (std::abs(a) + std::abs(b)))) {
    sum += v;
    err += e;
    l1 += l;
    return;
  }
  const double m = 0.5 * (a + b);
  bisect(f, a, m, 0.5 * tol, depth - 1, sum, err, l1);
  bisect(f, m, b, 0.5 * tol, depth - 1, sum, err, l1);
}

}  // namespace detail

/// Adaptive bisection over the 15-point Gauss-Kronrod rule with an absolute
/// tolerance. Throws NumericFailure when the accumulated error estimate
/// exceeds `abs_tol` (relaxed to a 1e-13 relative floor for large integrals,
/// where the absolute target is below roundoff).
template <typename F>
auto integrate(F&& f, double a, double b, double abs_tol, const std::string& module,
               unsigned max_depth = 40) {
  using Value = std::invoke_result_t<F&, double>;
  Value v{};
  double err = 0.0;
  double l1 = 0.0;
  detail::bisect(f, a, b, abs_tol, max_depth, v, err, l1);
  const double target = std::max(abs_tol, 1e-13 * l1);
  if (!(err <= target) || !std::isfinite(std::abs(v))) {
    throw NumericFailure(module,
                         "adaptive quadrature on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "] did not converge; error estimate " +
                             std::to_string(err),
                         err);
  }
  return Estimate<Value>{v, err};
}

}  // namespace gaah::quadrature
