#pragma once

#include "rcmap/fock.hpp"
#include "rcmap/spectral.hpp"

namespace rcmap::set_oracle {

/// Lorentzian lead: J(w) = gamma width^2 / ((w - center)^2 + width^2).
struct Lead {
  double gamma;
  double width;
  double center;
  double beta;
  double mu;

  double sd(double w) const;
};

struct SetParams {
  double dot_energy;
  Lead left;
  Lead right;
  double cutoff = 50.0;      ///< Lorentzian window center +- cutoff * width
  double tolerance = 1e-10;  ///< relative quadrature tolerance
};

/// Single dot at eps = 1 between identical leads with width 0.1, center 1,
/// beta = 1, mu_L = 1 = -mu_R, and gamma = beta_gamma / beta.
SetParams benchmark_params(double beta_gamma);

/// PV int dw'/2pi J(w') / (w - w') for the Lorentzian lead.
double lamb_shift(const Lead& lead, double w);

struct Currents {
  double matter;
  double energy;
  double matter_error;
  double energy_error;
};

/// Integrand of the exact matter current (energy current with an extra w).
double matter_integrand(const SetParams& p, double w);

spectral::Interval integration_window(const SetParams& p);

/// Exact currents from L into R by adaptive quadrature over
/// integration_window(p). Throws QuadratureError when the tolerance is missed.
Currents exact_currents(const SetParams& p);

/// The dot with both leads attached as reservoirs "L" and "R". With
/// `with_rc` each lead is first mapped onto a reaction coordinate and the
/// residual flat density is attached instead.
fock::ImpurityModel build_set_model(const SetParams& p, bool with_rc);

}  // namespace rcmap::set_oracle
