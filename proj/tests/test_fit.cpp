#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "photodetach/fit.hpp"
#include "photodetach/units.hpp"

using namespace photodetach;
using namespace photodetach::fit;
using std::numbers::pi;

namespace {

const IonModel ion;

std::vector<double> default_grid(std::size_t count = 200) {
  const double eb = units::hartree_to_ev(ion.binding_energy());
  return linear_grid(eb + 0.01, eb + 1.0, count);
}

double stddev(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(x.size() - 1));
}

}  // namespace

TEST_CASE("spectrum validation") {
  const auto grid = default_grid(8);
  CHECK_NOTHROW(synthesize_spectrum(ion, SurfaceModel(0.5, 1.0, 100.0), grid));
  CHECK_THROWS_AS(synthesize_spectrum(ion, SurfaceModel(0.5, 1.0, 100.0), default_grid(7)),
                  DomainError);
  std::vector<SpectrumSample> unsorted{{1.0, 1.0}, {0.9, 1.0}};
  for (int i = 0; i < 8; ++i) unsorted.push_back({1.1 + 0.1 * i, 1.0});
  CHECK_THROWS_AS(Spectrum(unsorted, ion), DomainError);
  std::vector<SpectrumSample> below;
  for (int i = 0; i < 8; ++i) below.push_back({0.7 + 0.1 * i, 1.0});
  CHECK_THROWS_AS(Spectrum(below, ion), DomainError);
  const auto g = linear_grid(1.0, 2.0, 11);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 2.0);
}

TEST_CASE("synthesis is deterministic and unbiased at K = 0") {
  const auto grid = default_grid();
  const SurfaceModel s(0.7, 1.5, 100.0);
  const auto a = synthesize_spectrum(ion, s, grid, 0.01, 42);
  const auto b = synthesize_spectrum(ion, s, grid, 0.01, 42);
  const auto c = synthesize_spectrum(ion, s, grid, 0.01, 43);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.samples()[i].sigma == b.samples()[i].sigma);
    differs = differs || a.samples()[i].sigma != c.samples()[i].sigma;
  }
  CHECK(differs);

  const auto free = synthesize_spectrum(ion, SurfaceModel(0.0, 1.0, 100.0), grid);
  for (const auto& sample : free.samples()) {
    const double E = units::ev_to_hartree(sample.photon_energy_ev) - ion.binding_energy();
    CHECK(sample.sigma / sigma0(ion, E) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("noiseless round trip") {
  const auto spectrum = synthesize_spectrum(ion, SurfaceModel(0.7, 1.5, 100.0), default_grid());
  const auto r = fit_surface(spectrum);
  CHECK(std::abs(r.reflection - 0.7) <= 1e-6);
  CHECK(std::abs(r.phase_index - 1.5) <= 1e-5);
  CHECK(r.residual_norm <= 1e-16 * spectrum_scale(spectrum));
  CHECK(r.converged);
  CHECK_FALSE(r.unidentifiable);
  CHECK(r.distance == 100.0);
}

TEST_CASE("round trip across the parameter box") {
  for (double K : {0.2, 0.5, 1.0}) {
    for (double mu : {0.3, 1.0, 2.0, 3.7}) {
      const auto spectrum = synthesize_spectrum(ion, SurfaceModel(K, mu, 100.0), default_grid());
      const auto r = fit_surface(spectrum);
      CAPTURE(K);
      CAPTURE(mu);
      CHECK(std::abs(r.reflection - K) <= 1e-6);
      CHECK(std::abs(r.phase_index - mu) <= 1e-5);
    }
  }
}

TEST_CASE("free spectrum is flagged unidentifiable") {
  const auto spectrum = synthesize_spectrum(ion, SurfaceModel(0.0, 1.0, 100.0), default_grid());
  const auto r = fit_surface(spectrum);
  CHECK(r.reflection <= 1e-6);
  CHECK(r.unidentifiable);
  const auto noisy = synthesize_spectrum(ion, SurfaceModel(0.0, 1.0, 100.0), default_grid(), 0.01, 3);
  CHECK(fit_surface(noisy).unidentifiable);
}

TEST_CASE("phase is reported modulo 4") {
  const auto a = synthesize_spectrum(ion, SurfaceModel(0.6, 1.2, 100.0), default_grid());
  const auto b = synthesize_spectrum(ion, SurfaceModel(0.6, 5.2, 100.0), default_grid());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a.samples()[i].sigma == doctest::Approx(b.samples()[i].sigma).epsilon(1e-13));
  const auto ra = fit_surface(a);
  const auto rb = fit_surface(b);
  CHECK(ra.phase_index == doctest::Approx(rb.phase_index).epsilon(1e-9));
  CHECK(rb.phase_index >= 0.0);
  CHECK(rb.phase_index < 4.0);
}

TEST_CASE("noisy recovery") {
  int within = 0;
  constexpr int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto spectrum =
        synthesize_spectrum(ion, SurfaceModel(1.0, 2.0, 100.0), default_grid(), 0.01, seed);
    const auto r = fit_surface(spectrum);
    if (std::abs(r.reflection - 1.0) <= 0.05) ++within;
  }
  CHECK(within == seeds);
}

TEST_CASE("estimator spread shrinks with more samples") {
  double previous = INFINITY;
  for (std::size_t n : {50, 200, 800}) {
    std::vector<double> k_hat;
    for (int seed = 0; seed < 30; ++seed) {
      const auto spectrum =
          synthesize_spectrum(ion, SurfaceModel(0.7, 1.5, 100.0), default_grid(n), 0.01, 1000 + seed);
      k_hat.push_back(fit_surface(spectrum).reflection);
    }
    const double spread = stddev(k_hat);
    CAPTURE(n);
    CHECK(spread <= previous);
    previous = spread;
  }
}

TEST_CASE("jacobian matches analytic derivatives") {
  const auto spectrum = synthesize_spectrum(ion, SurfaceModel(0.5, 1.0, 100.0), default_grid(40));
  const double K = 0.8;
  const double mu = 1.7;
  const double d = 120.0;
  const auto J = residual_jacobian(spectrum, K, mu, d, false);
  REQUIRE(J.size() == spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double E = units::ev_to_hartree(spectrum.samples()[i].photon_energy_ev) - ion.binding_energy();
    const double u = 2.0 * d * std::sqrt(2.0 * E);
    const double s0 = sigma0(ion, E);
    // d/dmu cos(u t - mu pi/2) = (pi/2) cos(u t - (mu + 1) pi/2).
    const double dK = -3.0 * s0 * a1(u, mu);
    const double dmu = -3.0 * K * s0 * (pi / 2.0) * a1(u, mu + 1.0);
    REQUIRE(J[i].size() == 2);
    CHECK(J[i][0] == doctest::Approx(dK).epsilon(1e-7).scale(s0));
    CHECK(J[i][1] == doctest::Approx(dmu).epsilon(1e-7).scale(s0));
  }
  CHECK(residual_jacobian(spectrum, K, mu, d, true).front().size() == 3);
}

TEST_CASE("distance recovery") {
  const auto spectrum = synthesize_spectrum(ion, SurfaceModel(0.8, 1.5, 180.0), default_grid(400));
  FitOptions options;
  options.fit_distance = true;
  const auto r = fit_surface(spectrum, options);
  CHECK(std::abs(r.reflection - 0.8) <= 1e-5);
  CHECK(std::abs(r.phase_index - 1.5) <= 1e-4);
  CHECK(std::abs(r.distance - 180.0) <= 1e-4);
}

TEST_CASE("fit is independent of the thread count") {
  const auto spectrum =
      synthesize_spectrum(ion, SurfaceModel(0.9, 0.5, 100.0), default_grid(), 0.01, 11);
  FitOptions one;
  one.threads = 1;
  FitOptions four;
  four.threads = 4;
  const auto a = fit_surface(spectrum, one);
  const auto b = fit_surface(spectrum, four);
  CHECK(a.reflection == b.reflection);
  CHECK(a.phase_index == b.phase_index);
  CHECK(a.residual_norm == b.residual_norm);
}

TEST_CASE("spectrum and result I/O") {
  const auto spectrum = synthesize_spectrum(ion, SurfaceModel(0.7, 1.5, 100.0), default_grid(20), 0.01, 5);
  std::stringstream buffer;
  write_spectrum(spectrum, buffer);
  const auto back = read_spectrum(buffer, ion);
  REQUIRE(back.size() == spectrum.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.samples()[i].photon_energy_ev == spectrum.samples()[i].photon_energy_ev);
    CHECK(back.samples()[i].sigma == spectrum.samples()[i].sigma);
  }
  std::istringstream wrong("x,y\n1,2\n");
  CHECK_THROWS(read_spectrum(wrong, ion));

  const auto r = fit_surface(spectrum);
  std::ostringstream kv;
  write_fit_result(r, kv);
  CHECK(kv.str().find("K_hat = ") != std::string::npos);
  CHECK(kv.str().find("unidentifiable = false") != std::string::npos);
  const std::string header = fit_result_csv_header();
  const std::string row = fit_result_csv_row(r);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}
