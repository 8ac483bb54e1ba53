#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace cqipred::specfun {

/// Raised when an iterative numerical routine fails to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bessel function of the first kind, order zero.
///
/// Power series for |x| <= 8, Miller backward recurrence up to |x| < 25 and
/// the Hankel asymptotic expansion beyond. Absolute error stays below 1e-13
/// on the whole real line. Throws std::domain_error for non-finite x.
double bessel_j0(double x);

/// Complete elliptic integral of the first kind in the parameter convention,
/// K(m) = int_0^{pi/2} (1 - m sin^2 t)^{-1/2} dt.
///
/// Valid for every m < 1, including large negative m. Throws
/// std::domain_error for m >= 1 or non-finite m.
double elliptic_k(double m);

/// (1/T) int_0^inf f(t) exp(-t/T) dt by adaptive Gauss-Kronrod quadrature.
///
/// The integration range is truncated at 40*T, where the weight is below
/// e^-40. `f` must be bounded on [0, inf). Throws std::domain_error when
/// mean_interval is not a positive finite number and NumericalError when the
/// estimated relative error exceeds `rel_tol`.
double exp_weighted_mean(const std::function<double(double)>& f, double mean_interval,
                         double rel_tol = 1e-8);

} // namespace cqipred::specfun
