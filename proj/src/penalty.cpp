#include "pobs/penalty.hpp"

#include <cmath>

#include "pobs/errors.hpp"

namespace pobs {

namespace {

void check_width(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("penalty width eps must be positive");
}

}  // namespace

double chi_eps(double s, double eps) {
  check_width(eps);
  if (s <= 0.0) return 0.0;
  if (s >= eps) return 1.0;
  const double t = s / eps;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double phi_eps(double s, double eps) {
  check_width(eps);
  if (s <= 0.0) return 0.0;
  if (s >= eps) return s - 0.5 * eps;
  const double t = s / eps;
  const double t4 = t * t * t * t;
  return eps * t4 * (2.5 + t * (-3.0 + t));
}

double chi_eps_prime(double s, double eps) {
  check_width(eps);
  if (s <= 0.0 || s >= eps) return 0.0;
  const double t = s / eps;
  const double omt = 1.0 - t;
  return 30.0 * t * t * omt * omt / eps;
}

PenaltyFn::PenaltyFn(double width) : eps(width) { check_width(width); }
double PenaltyFn::chi(double s) const { return chi_eps(s, eps); }
double PenaltyFn::phi(double s) const { return phi_eps(s, eps); }
double PenaltyFn::chi_prime(double s) const { return chi_eps_prime(s, eps); }

}  // namespace pobs
