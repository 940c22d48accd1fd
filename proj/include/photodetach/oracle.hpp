#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "photodetach/model.hpp"
#include "photodetach/quadrature.hpp"

// Brute-force numerical counterparts of the closed forms in model.hpp. Each
// oracle integrates a flux pointwise instead of using the antiderivative
// behind A_1, so agreement checks the algebra end to end.

namespace photodetach::oracle {

/// (2 pi E_ph / c) 2 pi int_0^{pi/2} j_r r^2 sin(theta) d theta.
quadrature::Estimate oracle_sigma1(const IonModel& ion, const SurfaceModel& surface,
                                   double electron_energy, const quadrature::QuadratureSpec& spec = {});

/// Same over the wall-facing hemisphere with the absorbed flux.
quadrature::Estimate oracle_sigma2(const IonModel& ion, const SurfaceModel& surface,
                                   double electron_energy, const quadrature::QuadratureSpec& spec = {});

struct ScreenTotal {
  quadrature::Estimate integral;  // (2 pi E_ph / c) int_0^rho_max j_z 2 pi rho d rho
  double rho_max;                 // bohr
  double tail_bound;              // analytic bound on the truncated tail
};

/// Integrates the screen flux in rho. The cutoff starts at 50 L and doubles
/// until the envelope bound on the tail is below rel_tol / 10 of the estimate.
ScreenTotal oracle_screen_total(const IonModel& ion, const SurfaceModel& surface,
                                double electron_energy, const ScreenGeometry& geometry,
                                const quadrature::QuadratureSpec& spec = {});

struct FluxEstimate {
  double value;
  double truncation_estimate;  // relative
  double roundoff_estimate;    // relative
  std::optional<std::string> diagnostic;
};

/// Radial component of j = (i/2)(Psi grad Psi* - Psi* grad Psi) = Im(Psi* dPsi/dr),
/// with dPsi/dr from a five-point central difference of outgoing_wave.
/// A step of 0 selects the default r * 1e-6.
FluxEstimate oracle_flux_from_wave(const IonModel& ion, const SurfaceModel& surface,
                                   double electron_energy, double r, Angle direction,
                                   double step = 0.0);

/// Number of local maxima of j_z(rho) on [0, inf), counting rho = 0 when j_z
/// decreases away from the axis. Found from sign changes of d j_z / d t in the
/// direction cosine t = L / sqrt(rho^2 + L^2), resolved at a fraction of the
/// fringe period 2 pi / (2 k d).
std::size_t fringe_count(const IonModel& ion, const SurfaceModel& surface, double electron_energy,
                         const ScreenGeometry& geometry);

// Validation grid -----------------------------------------------------------

enum class ValidationGrid { small, full };

struct ValidationTolerances {
  double sigma1 = 1e-8;
  double sigma2 = 1e-10;
  double screen_total = 1e-8;
  double identity = 1e-12;

  static ValidationTolerances uniform(double tol) { return {tol, tol, tol, tol}; }
};

struct ValidationRow {
  std::string check;  // sigma1 | sigma2 | screen_total | identity
  double photon_energy_ev;
  double reflection;
  double phase_index;
  double wall_distance;
  double analytic;
  double reference;
  double relative_difference;
  double tolerance;
  bool pass;
};

struct ValidationOptions {
  ValidationGrid grid = ValidationGrid::full;
  ValidationTolerances tolerances{};
  double screen_distance = 1e4;
  unsigned threads = 0;
  IonModel ion{};
};

/// Runs every oracle check on the grid; rows come back in grid order regardless
/// of the thread count.
std::vector<ValidationRow> run_validation(const ValidationOptions& options);

}  // namespace photodetach::oracle
