#include "photodetach/model.hpp"

#include <cmath>
#include <numbers>

namespace photodetach {

namespace {

using std::numbers::pi;

void require_positive_energy(double electron_energy) {
  if (!std::isfinite(electron_energy) || electron_energy <= 0.0)
    throw DomainError("electron energy must be positive and finite (got " +
                      std::to_string(electron_energy) + " hartree)");
}

void require_positive_radius(double r) {
  if (!std::isfinite(r) || r <= 0.0)
    throw DomainError("radius must be positive (got " + std::to_string(r) + " bohr)");
}

double reflection_phase(double mu) { return mu * pi / 2.0; }

// Two-path bracket 1 + K^2 + 2K cos(2 k d cos(theta) + pi - mu pi/2).
double interference_bracket(const SurfaceModel& surface, double k, double cos_theta) {
  const double K = surface.reflection();
  const double phase =
      2.0 * k * surface.wall_distance() * cos_theta + pi - reflection_phase(surface.phase_index());
  return 1.0 + K * K + 2.0 * K * std::cos(phase);
}

}  // namespace

IonModel::IonModel(double binding_energy, double normalization, double light_speed)
    : binding_energy_(binding_energy),
      binding_wavenumber_(std::sqrt(2.0 * binding_energy)),
      normalization_(normalization),
      light_speed_(light_speed) {
  if (!(binding_energy > 0.0) || !std::isfinite(binding_energy))
    throw DomainError("binding energy must be positive");
  if (!(normalization > 0.0) || !std::isfinite(normalization))
    throw DomainError("normalization constant must be positive");
  if (!(light_speed > 0.0) || !std::isfinite(light_speed))
    throw DomainError("speed of light must be positive");
}

SurfaceModel::SurfaceModel(double reflection, double phase_index, double wall_distance)
    : reflection_(reflection), phase_index_(phase_index), wall_distance_(wall_distance) {
  if (!(reflection >= 0.0 && reflection <= 1.0))
    throw DomainError("reflection parameter K must lie in [0, 1] (got " +
                      std::to_string(reflection) + ")");
  if (!std::isfinite(phase_index)) throw DomainError("phase index mu must be finite");
  if (!(wall_distance > 0.0) || !std::isfinite(wall_distance))
    throw DomainError("wall distance must be positive (got " + std::to_string(wall_distance) +
                      " bohr)");
}

double SurfaceModel::absorption_squared() const {
  return (1.0 - reflection_) * (1.0 + reflection_);
}

double SurfaceModel::absorption() const { return std::sqrt(absorption_squared()); }

std::optional<std::string> SurfaceModel::validity_warning() const {
  if (wall_distance_ > asymptotic_min_distance) return std::nullopt;
  return "wall distance " + std::to_string(wall_distance_) +
         " bohr is not above 50 bohr; the asymptotic two-path model may be inaccurate";
}

DetachmentPoint DetachmentPoint::from_electron_energy(const IonModel& ion,
                                                      const SurfaceModel& surface,
                                                      double electron_energy) {
  require_positive_energy(electron_energy);
  const double k = std::sqrt(2.0 * electron_energy);
  return {electron_energy, k, electron_energy + ion.binding_energy(),
          2.0 * surface.wall_distance() * k};
}

DetachmentPoint DetachmentPoint::from_photon_energy(const IonModel& ion,
                                                    const SurfaceModel& surface,
                                                    double photon_energy) {
  const double electron_energy = photon_energy - ion.binding_energy();
  if (!std::isfinite(photon_energy) || !(electron_energy > 0.0))
    throw DomainError("photon energy " + std::to_string(units::hartree_to_ev(photon_energy)) +
                      " eV is below detachment threshold " +
                      std::to_string(units::hartree_to_ev(ion.binding_energy())) + " eV");
  return from_electron_energy(ion, surface, electron_energy);
}

Angle::Angle(double theta, double phi) : theta_(theta), phi_(phi) {
  if (!(theta >= 0.0 && theta <= pi))
    throw DomainError("polar angle must lie in [0, pi] (got " + std::to_string(theta) + ")");
  if (!(phi >= 0.0 && phi < 2.0 * pi))
    throw DomainError("azimuth must lie in [0, 2 pi) (got " + std::to_string(phi) + ")");
}

ScreenGeometry::ScreenGeometry(double screen_distance, std::vector<double> radial_samples)
    : screen_distance_(screen_distance), radial_samples_(std::move(radial_samples)) {
  if (!(screen_distance > 0.0) || !std::isfinite(screen_distance))
    throw DomainError("screen distance L must be positive");
  for (double rho : radial_samples_)
    if (!(rho >= 0.0)) throw DomainError("screen radius samples must be nonnegative");
}

double sigma0(const IonModel& ion, double electron_energy) {
  require_positive_energy(electron_energy);
  const double E = electron_energy;
  const double B = ion.normalization();
  const double total = ion.binding_energy() + E;
  return 16.0 * std::numbers::sqrt2 * pi * pi * B * B * E * std::sqrt(E) /
         (3.0 * ion.light_speed() * total * total * total);
}

double a1_closed_form(double u, double mu) {
  const double phase = reflection_phase(mu);
  const double s = std::sin(u - phase);
  const double c = std::cos(u - phase);
  const double u2 = u * u;
  const double u3 = u2 * u;
  return s / u + 2.0 * c / u2 - 2.0 * s / u3 - 2.0 * std::sin(phase) / u3;
}

double a1_series(double u, double mu) {
  // Re[e^{-i phase} sum_n (i u)^n / (n! (n + 3))]; cos(n pi/2 - phase) cycles
  // through cos, sin, -cos, -sin.
  const double phase = reflection_phase(mu);
  const double cycle[4] = {std::cos(phase), std::sin(phase), -std::cos(phase), -std::sin(phase)};
  constexpr int terms = 24;
  double power = 1.0;  // u^n / n!
  double sum = 0.0;
  for (int n = 0; n < terms; ++n) {
    sum += power / (n + 3) * cycle[n % 4];
    power *= u / (n + 1);
  }
  return sum;
}

double a1(double u, double mu) {
  if (!(u >= 0.0)) throw DomainError("action u must be nonnegative (got " + std::to_string(u) + ")");
  if (!std::isfinite(mu)) throw DomainError("phase index mu must be finite");
  if (std::isinf(u)) return 0.0;
  return u < a1_series_threshold ? a1_series(u, mu) : a1_closed_form(u, mu);
}

double modulation(double u, const SurfaceModel& surface) {
  const double K = surface.reflection();
  const double value = a1(u, surface.phase_index());
  if (K == 0.0) return 1.0;
  return 1.0 - 3.0 * K * value;
}

double sigma1(const IonModel& ion, const SurfaceModel& surface, double electron_energy) {
  const auto point = DetachmentPoint::from_electron_energy(ion, surface, electron_energy);
  const double K = surface.reflection();
  return 0.5 * sigma0(ion, electron_energy) *
         (1.0 + K * K - 6.0 * K * a1(point.action, surface.phase_index()));
}

double sigma2(const IonModel& ion, const SurfaceModel& surface, double electron_energy) {
#ifdef PHOTODETACH_SIGMA2_PRINTED_SIGN
  // Mutation build: the sign as typeset, (K^2 - 1) / 2.
  const double K = surface.reflection();
  return sigma0(ion, electron_energy) * (K * K - 1.0) / 2.0;
#else
  return 0.5 * sigma0(ion, electron_energy) * surface.absorption_squared();
#endif
}

double sigma_total(const IonModel& ion, const SurfaceModel& surface, double electron_energy) {
  const auto point = DetachmentPoint::from_electron_energy(ion, surface, electron_energy);
  return sigma0(ion, electron_energy) * modulation(point.action, surface);
}

CrossSections cross_sections(const IonModel& ion, const SurfaceModel& surface,
                             double electron_energy) {
  const auto point = DetachmentPoint::from_electron_energy(ion, surface, electron_energy);
  return {point.action,
          sigma0(ion, electron_energy),
          sigma1(ion, surface, electron_energy),
          sigma2(ion, surface, electron_energy),
          sigma_total(ion, surface, electron_energy),
          modulation(point.action, surface)};
}

double flux_prefactor(const IonModel& ion, double electron_energy) {
  require_positive_energy(electron_energy);
  const double k2 = 2.0 * electron_energy;
  const double k = std::sqrt(k2);
  const double B = ion.normalization();
  const double kb2 = ion.binding_wavenumber() * ion.binding_wavenumber();
  const double denom = (kb2 + k2) * (kb2 + k2);
  return 16.0 * k2 * k * B * B / (denom * denom);
}

double flux_to_cross_section(const IonModel& ion, double electron_energy) {
  return 2.0 * pi * (electron_energy + ion.binding_energy()) / ion.light_speed();
}

double radial_flux(const IonModel& ion, const SurfaceModel& surface, double electron_energy,
                   double r, Angle direction) {
  require_positive_radius(r);
  if (direction.theta() > pi / 2.0)
    throw DomainError("radial_flux covers theta in [0, pi/2]; use absorbed_flux beyond");
  const double k = std::sqrt(2.0 * electron_energy);
  const double c = std::cos(direction.theta());
  return flux_prefactor(ion, electron_energy) * c * c * interference_bracket(surface, k, c) /
         (r * r);
}

double absorbed_flux(const IonModel& ion, const SurfaceModel& surface, double electron_energy,
                     double r, Angle direction) {
  require_positive_radius(r);
  if (direction.theta() < pi / 2.0)
    throw DomainError("absorbed_flux covers theta in [pi/2, pi]");
  const double c = std::cos(direction.theta());
  return surface.absorption_squared() * flux_prefactor(ion, electron_energy) * c * c / (r * r);
}

double differential_cross_section(const IonModel& ion, const SurfaceModel& surface,
                                  double electron_energy, Angle direction) {
  const double flux = direction.theta() <= pi / 2.0
                          ? radial_flux(ion, surface, electron_energy, 1.0, direction)
                          : absorbed_flux(ion, surface, electron_energy, 1.0, direction);
  return flux_to_cross_section(ion, electron_energy) * flux;
}

double screen_flux(const IonModel& ion, const SurfaceModel& surface, double electron_energy,
                   const ScreenGeometry& geometry, double rho) {
  if (!(rho >= 0.0)) throw DomainError("screen radius rho must be nonnegative");
  const double L = geometry.screen_distance();
  const double k = std::sqrt(2.0 * electron_energy);
  const double K = surface.reflection();
  const double hyp = std::hypot(rho, L);
  // L / hyp is the direction cosine of the observation point.
  const double cos_theta = L / hyp;
  const double envelope = cos_theta * cos_theta * cos_theta / (hyp * hyp);
  const double phase = 2.0 * k * surface.wall_distance() * cos_theta + pi -
                       reflection_phase(surface.phase_index());
  return 2.0 * flux_prefactor(ion, electron_energy) * envelope * (1.0 + K * std::cos(phase));
}

std::complex<double> outgoing_wave(const IonModel& ion, const SurfaceModel& surface,
                                   double electron_energy, double r, Angle direction) {
  require_positive_energy(electron_energy);
  require_positive_radius(r);
  if (direction.theta() > pi / 2.0)
    throw DomainError("outgoing_wave covers theta in [0, pi/2]");
  using namespace std::complex_literals;
  const double k = std::sqrt(2.0 * electron_energy);
  const double kb2 = ion.binding_wavenumber() * ion.binding_wavenumber();
  const double K = surface.reflection();
  const double c = std::cos(direction.theta());
  const double kd = k * surface.wall_distance() * c;
  const double amplitude = 4.0 * k * k * ion.normalization() / ((kb2 + k * k) * (kb2 + k * k));
  const std::complex<double> paths =
      std::exp(-1i * kd) - K * std::exp(1i * (kd - reflection_phase(surface.phase_index())));
  return 1i * amplitude * c * paths * std::exp(1i * k * r) / (k * r);
}

}  // namespace photodetach
