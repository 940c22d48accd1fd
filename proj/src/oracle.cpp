#include "photodetach/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "photodetach/parallel.hpp"

namespace photodetach::oracle {

namespace {

using std::numbers::pi;

double relative_difference(double analytic, double reference, double scale) {
  const double denom = analytic != 0.0 ? std::abs(analytic) : scale;
  return std::abs(analytic - reference) / denom;
}

}  // namespace

quadrature::Estimate oracle_sigma1(const IonModel& ion, const SurfaceModel& surface,
                                   double electron_energy, const quadrature::QuadratureSpec& spec) {
  const auto integrand = [&](double theta) {
    return radial_flux(ion, surface, electron_energy, 1.0, Angle(theta)) * std::sin(theta);
  };
  auto result = quadrature::integrate_adaptive(integrand, 0.0, pi / 2.0, spec);
  const double scale = flux_to_cross_section(ion, electron_energy) * 2.0 * pi;
  result.value *= scale;
  result.error *= scale;
  return result;
}

quadrature::Estimate oracle_sigma2(const IonModel& ion, const SurfaceModel& surface,
                                   double electron_energy, const quadrature::QuadratureSpec& spec) {
  const auto integrand = [&](double theta) {
    return absorbed_flux(ion, surface, electron_energy, 1.0, Angle(theta)) * std::sin(theta);
  };
  auto result = quadrature::integrate_adaptive(integrand, pi / 2.0, pi, spec);
  const double scale = flux_to_cross_section(ion, electron_energy) * 2.0 * pi;
  result.value *= scale;
  result.error *= scale;
  return result;
}

ScreenTotal oracle_screen_total(const IonModel& ion, const SurfaceModel& surface,
                                double electron_energy, const ScreenGeometry& geometry,
                                const quadrature::QuadratureSpec& spec) {
  const double L = geometry.screen_distance();
  const double to_cross_section = flux_to_cross_section(ion, electron_energy);
  const auto integrand = [&](double rho) {
    return screen_flux(ion, surface, electron_energy, geometry, rho) * 2.0 * pi * rho;
  };
  // (rho^2 + L^2)^{5/2} >= rho^5 and the bracket is at most 1 + K, so
  // int_R^inf j_z 2 pi rho d rho <= 2 P (1 + K) 2 pi L^3 / (3 R^3).
  const double envelope_scale = 2.0 * flux_prefactor(ion, electron_energy) *
                                (1.0 + surface.reflection()) * 2.0 * pi * L * L * L / 3.0;
  const auto tail_bound = [&](double rho_max) {
    return to_cross_section * envelope_scale / (rho_max * rho_max * rho_max);
  };

  double rho_max = 50.0 * L;
  auto estimate = quadrature::integrate_adaptive(integrand, 0.0, rho_max, spec);
  while (tail_bound(rho_max) > 0.1 * spec.rel_tol * std::abs(estimate.value * to_cross_section)) {
    const double extended = 2.0 * rho_max;
    const auto tail = quadrature::integrate_adaptive(integrand, rho_max, extended, spec);
    estimate.value += tail.value;
    estimate.error += tail.error;
    estimate.subdivisions += tail.subdivisions;
    rho_max = extended;
    if (rho_max > 1e12 * L)
      throw quadrature::NonConvergence("screen integral tail does not fall below tolerance",
                                       estimate);
  }
  estimate.value *= to_cross_section;
  estimate.error *= to_cross_section;
  return {estimate, rho_max, tail_bound(rho_max)};
}

FluxEstimate oracle_flux_from_wave(const IonModel& ion, const SurfaceModel& surface,
                                   double electron_energy, double r, Angle direction,
                                   double step) {
  if (step == 0.0) step = r * 1e-6;
  if (!(step > 0.0) || !(r > 2.0 * step))
    throw DomainError("finite-difference step must satisfy 0 < 2 step < r");
  // Make r +- step exactly representable.
  volatile double shifted = r + step;
  const double h = shifted - r;

  const auto psi = [&](double radius) {
    return outgoing_wave(ion, surface, electron_energy, radius, direction);
  };
  const auto derivative = (psi(r - 2.0 * h) - 8.0 * psi(r - h) + 8.0 * psi(r + h) - psi(r + 2.0 * h)) /
                          (12.0 * h);
  const double value = std::imag(std::conj(psi(r)) * derivative);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double k = std::sqrt(2.0 * electron_energy);
  const double kh = k * h;
  const double truncation = kh * kh * kh * kh / 30.0;
  // Value noise eps |Psi| and abscissa noise eps r, divided by the step.
  const double roundoff = eps / kh + eps * r / h;

  FluxEstimate result{value, truncation, roundoff, std::nullopt};
  constexpr double budget = 1e-7;
  if (truncation > budget)
    result.diagnostic = "finite-difference step too large: truncation error ~" +
                        std::to_string(truncation);
  else if (roundoff > budget)
    result.diagnostic = "finite-difference step too small: round-off error ~" +
                        std::to_string(roundoff);
  return result;
}

std::size_t fringe_count([[maybe_unused]] const IonModel& ion, const SurfaceModel& surface,
                         double electron_energy,
                         const ScreenGeometry& geometry) {
  (void)geometry;  // maxima in rho map one-to-one onto maxima in t for any L
  const double k = std::sqrt(2.0 * electron_energy);
  const double K = surface.reflection();
  const double u = 2.0 * k * surface.wall_distance();
  const double offset = pi - surface.phase_index() * pi / 2.0;

  // j_z is proportional to g(t) = t^5 (1 + K cos(u t + offset)); rho increases as
  // t decreases, so maxima in rho are maxima of g. g'(t) = t^4 h(t) with:
  const auto h = [&](double t) {
    const double phase = u * t + offset;
    return 5.0 * (1.0 + K * std::cos(phase)) - K * u * t * std::sin(phase);
  };

  std::size_t count = h(1.0) > 0.0 ? 1 : 0;  // the axis itself
  if (K == 0.0) return count;

  const std::size_t samples = 64 * static_cast<std::size_t>(std::ceil(u / (2.0 * pi) + 1.0)) + 256;
  double h_prev = h(0.0);
  for (std::size_t i = 1; i <= samples; ++i) {
    const double h_now = h(static_cast<double>(i) / static_cast<double>(samples));
    // g rising then falling in t is an interior maximum.
    if (h_prev > 0.0 && h_now <= 0.0) ++count;
    h_prev = h_now;
  }
  return count;
}

std::vector<ValidationRow> run_validation(const ValidationOptions& options) {
  std::vector<double> photon_ev;
  std::vector<double> reflections;
  std::vector<double> phases;
  std::vector<double> distances;
  if (options.grid == ValidationGrid::full) {
    photon_ev = {0.8, 1.0, 1.5};
    reflections = {0.0, 0.4, 0.7, 1.0};
    phases = {1.0, 1.5, 2.0};
    distances = {60.0, 100.0, 500.0};
  } else {
    photon_ev = {0.8, 1.5};
    reflections = {0.4, 1.0};
    phases = {1.5, 2.0};
    distances = {100.0};
  }

  struct Point {
    double eph_ev, K, mu, d;
  };
  std::vector<Point> points;
  for (double e : photon_ev)
    for (double K : reflections)
      for (double mu : phases)
        for (double d : distances) points.push_back({e, K, mu, d});

  constexpr std::size_t checks_per_point = 4;
  std::vector<ValidationRow> rows(points.size() * checks_per_point);
  const IonModel& ion = options.ion;
  const ScreenGeometry geometry(options.screen_distance);
  const auto& tol = options.tolerances;

  detail::parallel_for(points.size(), options.threads, [&](std::size_t i) {
    const Point& p = points[i];
    const SurfaceModel surface(p.K, p.mu, p.d);
    const double E = units::ev_to_hartree(p.eph_ev) - ion.binding_energy();
    const double s0 = sigma0(ion, E);
    const auto row = [&](std::string check, double analytic, double reference, double tolerance) {
      const double rel = relative_difference(analytic, reference, s0);
      return ValidationRow{std::move(check), p.eph_ev, p.K, p.mu, p.d, analytic, reference,
                           rel, tolerance, rel <= tolerance};
    };

    const double s1 = sigma1(ion, surface, E);
    const double s2 = sigma2(ion, surface, E);
    const double total = sigma_total(ion, surface, E);
    ValidationRow* out = &rows[i * checks_per_point];
    out[0] = row("sigma1", s1, oracle_sigma1(ion, surface, E).value, tol.sigma1);
    out[1] = row("sigma2", s2, oracle_sigma2(ion, surface, E).value, tol.sigma2);
    out[2] = row("screen_total", total,
                 oracle_screen_total(ion, surface, E, geometry).integral.value, tol.screen_total);
    out[3] = row("identity", s1 + s2, s0 * modulation(2.0 * p.d * std::sqrt(2.0 * E), surface),
                 tol.identity);
  });
  return rows;
}

}  // namespace photodetach::oracle
