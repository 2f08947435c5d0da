#pragma once

#include <array>

#include "sbtrans/mesh.hpp"
#include "sbtrans/problem.hpp"

namespace sbtrans {

enum class StabilizationMode { Section5, Eq9 };

struct StabilizationConstants {
  double c1_u = 4.0;
  double c2_u = 1.0;
  double c1_p = 4.0;
  double tau3_scale = 19.0;         // Section5 prefactor of tau3
  double advective_scale_U = 1.0;   // U in the Eq9 form of tau3
  double diffusive_scale_D = 1.0;   // D in the Eq9 form of tau3
};

/// Per-mesh subgrid stabilization parameters. tau3_prime is the time-modified
/// transport parameter (phi/dt + 1/tau3)^-1 and series_factor the geometric
/// sum defining the subscale correction d4 = series_factor * R4. The two
/// derived coefficients are what element assembly actually applies to the
/// transport residual:
///   adjoint coefficient  tau3' (1 + s)   against the adjoint test operator,
///   plain coefficient    1 - tau3'(1+s)/tau3  against the plain test value.
/// With the closed-form series these reduce exactly to tau3 and 0.
struct StabilizationParams {
  double tau1 = 0.0, tau2 = 0.0, tau3 = 0.0;
  double tau3_prime = 0.0;
  double series_factor = 0.0;
  double transport_adjoint_coef = 0.0;
  double transport_plain_coef = 0.0;
  StabilizationMode mode = StabilizationMode::Section5;

  static StabilizationParams zero() { return {}; }
};

/// (tau1, tau2, tau3) for mesh size h. Throws for h <= 0.
std::array<double, 3> compute_taus(const CoefficientSet& coeffs, double h, StabilizationMode mode,
                                   const StabilizationConstants& k = {});

/// tau3' = (phi/dt + 1/tau3)^-1; safe for dt = infinity (stationary solves).
double compute_tau_prime(double tau3, double dt, double phi);

/// Sum of the subscale series with ratio r = phi tau3' / dt. A negative
/// n_terms selects the closed form r/(1-r); otherwise the partial sum
/// r(1-r^(n+1))/(1-r) over i = 1..n+1 is returned. Throws if r >= 1.
double subscale_series_factor(double tau3_prime, double dt, double phi, int n_terms = -1);

StabilizationParams make_stabilization(const CoefficientSet& coeffs, double h, double dt,
                                       StabilizationMode mode = StabilizationMode::Section5,
                                       const StabilizationConstants& k = {},
                                       int series_terms = -1);

/// Stabilization parameters for each subdomain of a (possibly partitioned)
/// problem. Unified cases use the Stokes slot everywhere.
struct StabilizationSet {
  StabilizationParams stokes;
  StabilizationParams brinkman;

  const StabilizationParams& for_subdomain(Subdomain s) const {
    return s == Subdomain::Brinkman ? brinkman : stokes;
  }

  static StabilizationSet zero() { return {}; }
};

StabilizationSet make_stabilization_set(const ProblemCase& pc, double h, double dt,
                                        StabilizationMode mode = StabilizationMode::Section5,
                                        const StabilizationConstants& k = {},
                                        int series_terms = -1);

}  // namespace sbtrans
