#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "photodetach/units.hpp"

// Closed-form model of H- photodetachment near a partially reflecting wall.
//
// The ion sits on the z axis a distance d in front of the wall (the x-y plane).
// A z-polarized laser detaches a p-wave electron; the half of the wave heading
// into the wall is reflected with amplitude K and phase -mu*pi/2 and appears to
// come from an image source behind the wall. The remainder, with amplitude
// T = sqrt(1 - K^2), is absorbed. Everything here is in Hartree atomic units.

namespace photodetach {

/// Thrown when an argument lies outside the domain of a physical formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The negative-ion source: binding energy, p-wave normalization and c.
class IonModel {
 public:
  static constexpr double default_binding_energy_ev = 0.7542;
  static constexpr double default_normalization = 0.31552;
  static constexpr double default_light_speed = 137.035999084;

  IonModel() : IonModel(units::ev_to_hartree(default_binding_energy_ev)) {}
  explicit IonModel(double binding_energy,
                    double normalization = default_normalization,
                    double light_speed = default_light_speed);

  double binding_energy() const { return binding_energy_; }
  /// k_b = sqrt(2 E_b)
  double binding_wavenumber() const { return binding_wavenumber_; }
  double normalization() const { return normalization_; }
  double light_speed() const { return light_speed_; }

 private:
  double binding_energy_;
  double binding_wavenumber_;
  double normalization_;
  double light_speed_;
};

/// Wall description: reflection amplitude K, phase index mu, ion-wall distance d.
class SurfaceModel {
 public:
  /// Below this distance (bohr) the asymptotic two-path picture is not trusted.
  static constexpr double asymptotic_min_distance = 50.0;

  SurfaceModel(double reflection, double phase_index, double wall_distance);

  double reflection() const { return reflection_; }
  double phase_index() const { return phase_index_; }
  double wall_distance() const { return wall_distance_; }

  /// T = sqrt(1 - K^2).
  double absorption() const;
  /// T^2 = 1 - K^2, formed without the square root.
  double absorption_squared() const;

  /// Set when d <= 50 bohr.
  std::optional<std::string> validity_warning() const;

 private:
  double reflection_;
  double phase_index_;
  double wall_distance_;
};

/// One detached-electron energy together with the quantities derived from it.
struct DetachmentPoint {
  double electron_energy;  // E, hartree
  double wavenumber;       // k = sqrt(2E)
  double photon_energy;    // E_ph = E + E_b
  double action;           // u = 2 d k

  static DetachmentPoint from_electron_energy(const IonModel& ion, const SurfaceModel& surface,
                                              double electron_energy);
  /// Throws DomainError("below detachment threshold") when E_ph <= E_b.
  static DetachmentPoint from_photon_energy(const IonModel& ion, const SurfaceModel& surface,
                                            double photon_energy);
};

/// Direction of the detached electron, theta in [0, pi], phi in [0, 2 pi).
class Angle {
 public:
  explicit Angle(double theta, double phi = 0.0);

  double theta() const { return theta_; }
  double phi() const { return phi_; }

 private:
  double theta_;
  double phi_;
};

/// Detector screen perpendicular to z at distance L from the wall.
class ScreenGeometry {
 public:
  explicit ScreenGeometry(double screen_distance, std::vector<double> radial_samples = {});

  double screen_distance() const { return screen_distance_; }
  const std::vector<double>& radial_samples() const { return radial_samples_; }

 private:
  double screen_distance_;
  std::vector<double> radial_samples_;
};

/// Free-space cross section sigma_0(E) = 16 sqrt(2) pi^2 B^2 E^{3/2} / (3 c (E_b + E)^3).
double sigma0(const IonModel& ion, double electron_energy);

/// A_1(u) = int_0^1 t^2 cos(u t - mu pi/2) dt, evaluated in closed form for
/// u >= a1_series_threshold and by its Maclaurin series below.
double a1(double u, double mu);
inline constexpr double a1_series_threshold = 1.0;
double a1_closed_form(double u, double mu);
double a1_series(double u, double mu);

/// A(u) = 1 - 3 K A_1(u); the ratio sigma / sigma_0.
double modulation(double u, const SurfaceModel& surface);

/// Outgoing-hemisphere part (theta in [0, pi/2]).
double sigma1(const IonModel& ion, const SurfaceModel& surface, double electron_energy);
/// Part absorbed by the wall: sigma_0 (1 - K^2) / 2.
double sigma2(const IonModel& ion, const SurfaceModel& surface, double electron_energy);
/// sigma(E, K) = sigma_0(E) A(2 d sqrt(2E)).
double sigma_total(const IonModel& ion, const SurfaceModel& surface, double electron_energy);

struct CrossSections {
  double action;
  double sigma0;
  double sigma1;
  double sigma2;
  double sigma_total;
  double modulation;
};
CrossSections cross_sections(const IonModel& ion, const SurfaceModel& surface,
                             double electron_energy);

/// 16 k^3 B^2 / (k_b^2 + k^2)^4, the single-source flux scale.
double flux_prefactor(const IonModel& ion, double electron_energy);

/// Radial flux of the two-path wave for theta in [0, pi/2].
double radial_flux(const IonModel& ion, const SurfaceModel& surface, double electron_energy,
                   double r, Angle direction);

/// Radial flux of the absorbed wave T * Psi_1 for theta in [pi/2, pi].
double absorbed_flux(const IonModel& ion, const SurfaceModel& surface, double electron_energy,
                     double r, Angle direction);

/// d sigma / ds = (2 pi E_ph / c) j_r on the enclosing sphere, with r^2 absorbed
/// into the area element. theta <= pi/2 selects the two-path flux, theta > pi/2
/// the absorbed flux, so the full-sphere integral is sigma_total.
double differential_cross_section(const IonModel& ion, const SurfaceModel& surface,
                                  double electron_energy, Angle direction);

/// Flux through the screen at radius rho from the z axis.
double screen_flux(const IonModel& ion, const SurfaceModel& surface, double electron_energy,
                   const ScreenGeometry& geometry, double rho);

/// Asymptotic outgoing wave Psi+ = Psi_1 + Psi_2 at (r, theta), theta in [0, pi/2].
std::complex<double> outgoing_wave(const IonModel& ion, const SurfaceModel& surface,
                                   double electron_energy, double r, Angle direction);

/// 2 pi E_ph / c, converting flux into cross section.
double flux_to_cross_section(const IonModel& ion, double electron_energy);

}  // namespace photodetach
