#include "sbtrans/stabilization.hpp"

#include <cmath>
#include <stdexcept>

namespace sbtrans {

std::array<double, 3> compute_taus(const CoefficientSet& coeffs, double h, StabilizationMode mode,
                                   const StabilizationConstants& k) {
  if (!(h > 0.0)) throw std::invalid_argument("compute_taus: h must be positive");

  double tau1, tau2, tau3;
  if (mode == StabilizationMode::Section5) {
    tau1 = 1.0 / (4.0 * coeffs.mu_l / (h * h) + coeffs.sigma);
    tau2 = 4.0 * coeffs.mu_l * h;
    tau3 = k.tau3_scale / (9.0 / (4.0 * h * h) + 3.0 / (2.0 * h) + coeffs.alpha);
  } else {
    tau1 = 1.0 / (k.c1_u * coeffs.mu_u / (h * h) + k.c2_u * coeffs.sigma);
    tau2 = k.c1_p * coeffs.mu_u;
    tau3 = 1.0 / (9.0 * k.diffusive_scale_D / (4.0 * h * h) +
                  3.0 * k.advective_scale_U / (2.0 * h) + coeffs.alpha);
  }
  return {tau1, tau2, tau3};
}

double compute_tau_prime(double tau3, double dt, double phi) {
  if (!(dt > 0.0)) throw std::invalid_argument("compute_tau_prime: dt must be positive");
  if (!(tau3 > 0.0)) throw std::invalid_argument("compute_tau_prime: tau3 must be positive");
  if (!(phi > 0.0)) throw std::invalid_argument("compute_tau_prime: phi must be positive");
  return 1.0 / (phi / dt + 1.0 / tau3);
}

double subscale_series_factor(double tau3_prime, double dt, double phi, int n_terms) {
  const double r = phi * tau3_prime / dt;
  if (r < 0.0 || r >= 1.0)
    throw std::invalid_argument("subscale_series_factor: series ratio must lie in [0,1)");
  if (n_terms < 0) return r / (1.0 - r);
  double sum = 0.0, term = 1.0;
  for (int i = 1; i <= n_terms + 1; ++i) {
    term *= r;
    sum += term;
  }
  return sum;
}

StabilizationParams make_stabilization(const CoefficientSet& coeffs, double h, double dt,
                                       StabilizationMode mode, const StabilizationConstants& k,
                                       int series_terms) {
  StabilizationParams p;
  const auto taus = compute_taus(coeffs, h, mode, k);
  p.tau1 = taus[0];
  p.tau2 = taus[1];
  p.tau3 = taus[2];
  p.tau3_prime = compute_tau_prime(p.tau3, dt, coeffs.phi);
  p.series_factor = subscale_series_factor(p.tau3_prime, dt, coeffs.phi, series_terms);
  p.mode = mode;
  if (series_terms < 0) {
    // 1 + r/(1-r) = 1/(1-r) turns tau3' back into tau3 exactly.
    p.transport_adjoint_coef = p.tau3;
    p.transport_plain_coef = 0.0;
  } else {
    p.transport_adjoint_coef = p.tau3_prime * (1.0 + p.series_factor);
    p.transport_plain_coef = 1.0 - p.transport_adjoint_coef / p.tau3;
  }
  return p;
}

StabilizationSet make_stabilization_set(const ProblemCase& pc, double h, double dt,
                                        StabilizationMode mode, const StabilizationConstants& k,
                                        int series_terms) {
  StabilizationSet s;
  s.stokes = make_stabilization(pc.coeff_stokes, h, dt, mode, k, series_terms);
  s.brinkman = pc.has_interface
                   ? make_stabilization(pc.coeff_brinkman, h, dt, mode, k, series_terms)
                   : s.stokes;
  return s;
}

}  // namespace sbtrans
