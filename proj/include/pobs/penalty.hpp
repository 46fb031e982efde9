#pragma once

// Smooth monotone Heaviside approximation built on the quintic smoothstep
// q(t) = 6t⁵ − 15t⁴ + 10t³, t = clamp(s/ε, 0, 1). χ_ε is C² with χ_ε = 0 on
// s ≤ 0 and χ_ε = 1 on s ≥ ε.

namespace pobs {

/// χ_ε(s) ∈ [0, 1]. Throws ParameterError when eps ≤ 0.
double chi_eps(double s, double eps);

/// Φ_ε(s) = ∫_{-∞}^s χ_ε, in closed form: 0, ε·Q(s/ε) with Q(t) = t⁶ − 3t⁵ + 2.5t⁴, or s − ε/2.
double phi_eps(double s, double eps);

/// χ_ε'(s) = q'(s/ε)/ε, zero outside (0, ε).
double chi_eps_prime(double s, double eps);

/// Bundles the three functions for a fixed width.
struct PenaltyFn {
  double eps;

  explicit PenaltyFn(double width);
  double chi(double s) const;
  double phi(double s) const;
  double chi_prime(double s) const;
};

}  // namespace pobs
