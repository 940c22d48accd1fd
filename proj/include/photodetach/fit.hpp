#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "photodetach/model.hpp"

// Recovery of wall parameters (K, mu and optionally d) from a cross-section
// spectrum: coarse grid search followed by damped Gauss-Newton refinement.

namespace photodetach::fit {

struct SpectrumSample {
  double photon_energy_ev;
  double sigma;  // a.u. of area
};

/// At least 8 samples, strictly increasing photon energy, all above threshold.
class Spectrum {
 public:
  static constexpr std::size_t min_samples = 8;

  Spectrum(std::vector<SpectrumSample> samples, IonModel ion);

  const std::vector<SpectrumSample>& samples() const { return samples_; }
  const IonModel& ion() const { return ion_; }
  std::size_t size() const { return samples_.size(); }

 private:
  std::vector<SpectrumSample> samples_;
  IonModel ion_;
};

/// `count` evenly spaced values in [start, stop].
std::vector<double> linear_grid(double start, double stop, std::size_t count);

/// Forward model sigma_total on the photon-energy grid (eV), optionally scaled by
/// (1 + noise_sigma * N(0, 1)) per sample from a generator seeded with `seed`.
Spectrum synthesize_spectrum(const IonModel& ion, const SurfaceModel& surface,
                             std::span<const double> photon_energies_ev, double noise_sigma = 0.0,
                             std::uint64_t seed = 0);

struct FitBounds {
  double reflection_min = 0.0;
  double reflection_max = 1.0;
  double distance_min = 50.0;
  double distance_max = 500.0;

  void validate() const;
};

struct FitOptions {
  bool fit_distance = false;
  /// Known wall distance when fit_distance is false.
  double distance = 100.0;
  FitBounds bounds{};
  int max_iterations = 200;
  std::size_t reflection_grid = 21;
  std::size_t phase_grid = 17;
  /// Floor on the d grid; raised to the Nyquist density of 2 d k_max.
  std::size_t distance_grid = 15;
  /// Number of best grid points refined locally.
  std::size_t refine_candidates = 3;
  unsigned threads = 0;
};

struct FitResult {
  double reflection;   // K_hat in [0, 1]
  double phase_index;  // mu_hat in [0, 4)
  double distance;     // d_hat, bohr
  /// sum_i (sigma_model - sigma_i)^2, a.u.^2
  double residual_norm;
  int iterations;
  bool converged;
  /// mu and d carry no information (K_hat indistinguishable from 0).
  bool unidentifiable;
};

/// Least-squares fit of sigma_total to the spectrum, using the spectrum's ion.
/// The objective is 4-periodic in mu; mu_hat is reduced to [0, 4).
FitResult fit_surface(const Spectrum& spectrum, const FitOptions& options = {});

/// sum_i sigma_i^2, the scale the residual is compared against.
double spectrum_scale(const Spectrum& spectrum);

/// Least-squares objective at (K, mu, d).
double objective(const Spectrum& spectrum, double reflection, double phase_index, double distance);

/// Central-difference Jacobian of the residual vector, rows = samples, columns
/// (K, mu[, d]), relative step 1e-6. Exposed for gradient checks.
std::vector<std::vector<double>> residual_jacobian(const Spectrum& spectrum, double reflection,
                                                   double phase_index, double distance,
                                                   bool with_distance);

// I/O -----------------------------------------------------------------------

/// CSV with header `E_ph_eV,sigma_au`.
void write_spectrum(const Spectrum& spectrum, std::ostream& out);
Spectrum read_spectrum(std::istream& in, const IonModel& ion);

/// `key = value` lines.
void write_fit_result(const FitResult& result, std::ostream& out);
std::string fit_result_csv_header();
std::string fit_result_csv_row(const FitResult& result);

}  // namespace photodetach::fit
