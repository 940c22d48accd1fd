#include "photodetach/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "photodetach/parallel.hpp"
#include "photodetach/table.hpp"

namespace photodetach::fit {

namespace {

using std::numbers::pi;

constexpr double phase_period = 4.0;

double reduce_phase(double mu) {
  double reduced = mu - phase_period * std::floor(mu / phase_period);
  if (reduced >= phase_period) reduced = 0.0;
  return reduced;
}

// Per-sample quantities that do not depend on the wall.
struct Sample {
  double sigma;
  double sigma0;
  double wavenumber;
};

std::vector<Sample> prepare(const Spectrum& spectrum) {
  std::vector<Sample> samples;
  samples.reserve(spectrum.size());
  for (const auto& s : spectrum.samples()) {
    const double E = units::ev_to_hartree(s.photon_energy_ev) - spectrum.ion().binding_energy();
    samples.push_back({s.sigma, sigma0(spectrum.ion(), E), std::sqrt(2.0 * E)});
  }
  return samples;
}

// sigma_0 (1 - 3 K A_1(2 d k)); same as sigma_total without constructing a
// SurfaceModel, so finite differences may step outside K in [0, 1].
double model(const Sample& s, double K, double mu, double d) {
  return s.sigma0 * (1.0 - 3.0 * K * a1(2.0 * d * s.wavenumber, mu));
}

struct Parameters {
  double K;
  double mu;
  double d;
};

double cost(const std::vector<Sample>& samples, const Parameters& p) {
  double sum = 0.0;
  for (const auto& s : samples) {
    const double r = model(s, p.K, p.mu, p.d) - s.sigma;
    sum += r * r;
  }
  return sum;
}

Eigen::MatrixXd jacobian(const std::vector<Sample>& samples, const Parameters& p, bool with_d) {
  const int m = with_d ? 3 : 2;
  Eigen::MatrixXd J(static_cast<Eigen::Index>(samples.size()), m);
  constexpr double relative_step = 1e-6;
  const double hK = relative_step * std::max(1.0, std::abs(p.K));
  const double hmu = relative_step * std::max(1.0, std::abs(p.mu));
  const double hd = relative_step * std::max(1.0, std::abs(p.d));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const auto row = static_cast<Eigen::Index>(i);
    J(row, 0) = (model(s, p.K + hK, p.mu, p.d) - model(s, p.K - hK, p.mu, p.d)) / (2.0 * hK);
    J(row, 1) = (model(s, p.K, p.mu + hmu, p.d) - model(s, p.K, p.mu - hmu, p.d)) / (2.0 * hmu);
    if (with_d)
      J(row, 2) = (model(s, p.K, p.mu, p.d + hd) - model(s, p.K, p.mu, p.d - hd)) / (2.0 * hd);
  }
  return J;
}

struct Refinement {
  Parameters params;
  double cost;
  int iterations;
  bool converged;
};

Refinement refine(const std::vector<Sample>& samples, Parameters p, const FitOptions& options) {
  const bool with_d = options.fit_distance;
  const auto& b = options.bounds;
  const auto project = [&](Parameters q) {
    q.K = std::clamp(q.K, b.reflection_min, b.reflection_max);
    if (with_d) q.d = std::clamp(q.d, b.distance_min, b.distance_max);
    return q;
  };
  const auto scaled_step = [](const Parameters& a, const Parameters& c) {
    const double dK = (a.K - c.K) / (1.0 + std::abs(a.K));
    const double dmu = (a.mu - c.mu) / (1.0 + std::abs(a.mu));
    const double dd = (a.d - c.d) / (1.0 + std::abs(a.d));
    return std::sqrt(dK * dK + dmu * dmu + dd * dd);
  };

  double current = cost(samples, p);
  double damping = 1e-3;
  int iteration = 0;
  while (iteration < options.max_iterations) {
    ++iteration;
    if (current == 0.0) return {p, current, iteration, true};

    const Eigen::MatrixXd J = jacobian(samples, p, with_d);
    Eigen::VectorXd r(J.rows());
    for (std::size_t i = 0; i < samples.size(); ++i)
      r(static_cast<Eigen::Index>(i)) = model(samples[i], p.K, p.mu, p.d) - samples[i].sigma;
    const Eigen::MatrixXd H = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    const double diag_floor = 1e-12 * std::max(H.diagonal().maxCoeff(), 1e-300);

    while (true) {
      Eigen::MatrixXd A = H;
      for (Eigen::Index j = 0; j < A.rows(); ++j)
        A(j, j) += damping * std::max(H(j, j), diag_floor);
      const Eigen::VectorXd delta = A.ldlt().solve(-g);
      Parameters trial{p.K + delta(0), p.mu + delta(1), with_d ? p.d + delta(2) : p.d};
      trial = project(trial);
      const double step = scaled_step(trial, p);
      const double trial_cost = cost(samples, trial);
      if (trial_cost < current) {
        const double relative_change = (current - trial_cost) / current;
        p = trial;
        current = trial_cost;
        damping = std::max(damping / 3.0, 1e-12);
        if (step < 1e-10 || relative_change < 1e-12) return {p, current, iteration, true};
        break;
      }
      // No decrease: either we sit on the minimum to working precision or the
      // damping is too weak.
      if (step < 1e-10 || !std::isfinite(trial_cost)) return {p, current, iteration, step < 1e-10};
      damping *= 4.0;
      if (damping > 1e20) return {p, current, iteration, false};
    }
  }
  return {p, current, iteration, false};
}

}  // namespace

Spectrum::Spectrum(std::vector<SpectrumSample> samples, IonModel ion)
    : samples_(std::move(samples)), ion_(ion) {
  if (samples_.size() < min_samples)
    throw DomainError("a spectrum needs at least " + std::to_string(min_samples) +
                      " samples (got " + std::to_string(samples_.size()) + ")");
  const double threshold_ev = units::hartree_to_ev(ion_.binding_energy());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.photon_energy_ev > threshold_ev))
      throw DomainError("sample " + std::to_string(i) + ": photon energy " +
                        std::to_string(s.photon_energy_ev) + " eV is below detachment threshold");
    if (!std::isfinite(s.sigma)) throw DomainError("sample " + std::to_string(i) + ": non-finite sigma");
    if (i > 0 && !(s.photon_energy_ev > samples_[i - 1].photon_energy_ev))
      throw DomainError("photon energies must be strictly increasing (sample " +
                        std::to_string(i) + ")");
  }
}

std::vector<double> linear_grid(double start, double stop, std::size_t count) {
  if (count < 2) throw DomainError("a grid needs at least two points");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  grid.back() = stop;
  return grid;
}

Spectrum synthesize_spectrum(const IonModel& ion, const SurfaceModel& surface,
                             std::span<const double> photon_energies_ev, double noise_sigma,
                             std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw DomainError("noise level must be nonnegative");
  std::mt19937_64 generator(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SpectrumSample> samples;
  samples.reserve(photon_energies_ev.size());
  for (double eph : photon_energies_ev) {
    const auto point = DetachmentPoint::from_photon_energy(ion, surface, units::ev_to_hartree(eph));
    double sigma = sigma_total(ion, surface, point.electron_energy);
    if (noise_sigma > 0.0) sigma *= 1.0 + noise_sigma * normal(generator);
    samples.push_back({eph, sigma});
  }
  return Spectrum(std::move(samples), ion);
}

void FitBounds::validate() const {
  if (!(reflection_min >= 0.0 && reflection_max <= 1.0 && reflection_min < reflection_max))
    throw DomainError("K bounds must satisfy 0 <= K_min < K_max <= 1");
  if (!(distance_min > 0.0 && distance_min < distance_max && std::isfinite(distance_max)))
    throw DomainError("d bounds must satisfy 0 < d_min < d_max");
}

double spectrum_scale(const Spectrum& spectrum) {
  double sum = 0.0;
  for (const auto& s : spectrum.samples()) sum += s.sigma * s.sigma;
  return sum;
}

double objective(const Spectrum& spectrum, double reflection, double phase_index, double distance) {
  return cost(prepare(spectrum), {reflection, phase_index, distance});
}

std::vector<std::vector<double>> residual_jacobian(const Spectrum& spectrum, double reflection,
                                                   double phase_index, double distance,
                                                   bool with_distance) {
  const Eigen::MatrixXd J =
      jacobian(prepare(spectrum), {reflection, phase_index, distance}, with_distance);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(J.rows()));
  for (Eigen::Index i = 0; i < J.rows(); ++i)
    for (Eigen::Index j = 0; j < J.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(J(i, j));
  return out;
}

FitResult fit_surface(const Spectrum& spectrum, const FitOptions& options) {
  options.bounds.validate();
  if (!options.fit_distance && !(options.distance > 0.0))
    throw DomainError("a known wall distance must be positive");
  const auto samples = prepare(spectrum);
  const auto& b = options.bounds;

  const auto K_grid = linear_grid(b.reflection_min, b.reflection_max, options.reflection_grid);
  std::vector<double> mu_grid(options.phase_grid);
  for (std::size_t i = 0; i < mu_grid.size(); ++i)
    mu_grid[i] = phase_period * static_cast<double>(i) / static_cast<double>(mu_grid.size());
  std::vector<double> d_grid{options.distance};
  if (options.fit_distance) {
    double k_max = 0.0;
    for (const auto& s : samples) k_max = std::max(k_max, s.wavenumber);
    // The phase 2 d k must advance by at most pi/2 between neighbouring d values.
    const auto nyquist = static_cast<std::size_t>(
        std::ceil((b.distance_max - b.distance_min) * 4.0 * k_max / pi)) + 1;
    d_grid = linear_grid(b.distance_min, b.distance_max, std::max(options.distance_grid, nyquist));
  }

  // A is linear in K, so each (mu, d) pair needs A_1 once per sample.
  struct GridPoint {
    double cost;
    Parameters params;
  };
  const std::size_t pairs = mu_grid.size() * d_grid.size();
  // Best K for each (mu, d) pair, so the refined candidates differ in phase.
  std::vector<GridPoint> grid(pairs);
  detail::parallel_for(pairs, options.threads, [&](std::size_t index) {
    const double mu = mu_grid[index % mu_grid.size()];
    const double d = d_grid[index / mu_grid.size()];
    std::vector<double> a(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) a[i] = a1(2.0 * d * samples[i].wavenumber, mu);
    GridPoint best_k{std::numeric_limits<double>::infinity(), {K_grid.front(), mu, d}};
    for (double K : K_grid) {
      double sum = 0.0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const double r = samples[i].sigma0 * (1.0 - 3.0 * K * a[i]) - samples[i].sigma;
        sum += r * r;
      }
      if (sum < best_k.cost) best_k = {sum, {K, mu, d}};
    }
    grid[index] = best_k;
  });

  const std::size_t candidates = std::min(std::max<std::size_t>(options.refine_candidates, 1), grid.size());
  std::partial_sort(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(candidates), grid.end(),
                    [](const GridPoint& x, const GridPoint& y) { return x.cost < y.cost; });

  std::optional<Refinement> best;
  for (std::size_t c = 0; c < candidates; ++c) {
    const Refinement attempt = refine(samples, grid[c].params, options);
    if (!best || attempt.cost < best->cost) best = attempt;
  }

  FitResult result{};
  result.reflection = best->params.K;
  result.phase_index = reduce_phase(best->params.mu);
  result.distance = best->params.d;
  result.residual_norm = best->cost;
  result.iterations = best->iterations;
  result.converged = best->converged;

  // mu and d only enter through K * A_1. Compare against the K = 0 model: if
  // switching the wall on does not beat the noise floor by a wide margin,
  // the phase parameters are not determined by the data.
  const double free_space_cost = cost(samples, {0.0, 0.0, best->params.d});
  const std::size_t phase_params = options.fit_distance ? 2 : 1;
  const double dof = static_cast<double>(std::max<std::size_t>(samples.size() - phase_params - 1, 1));
  const double noise_variance = best->cost / dof;
  const double improvement = free_space_cost - best->cost;
  result.unidentifiable =
      improvement <= 10.0 * static_cast<double>(phase_params + 1) * noise_variance +
                         1e-24 * spectrum_scale(spectrum);
  return result;
}

void write_spectrum(const Spectrum& spectrum, std::ostream& out) {
  Table table;
  table.columns = {"E_ph_eV", "sigma_au"};
  for (const auto& s : spectrum.samples()) table.rows.push_back({s.photon_energy_ev, s.sigma});
  write_table(table, out, 17);
}

Spectrum read_spectrum(std::istream& in, const IonModel& ion) {
  const Table table = read_table(in);
  if (table.columns != std::vector<std::string>{"E_ph_eV", "sigma_au"})
    throw IoError("spectrum header must be 'E_ph_eV,sigma_au'");
  std::vector<SpectrumSample> samples;
  samples.reserve(table.rows.size());
  for (const auto& row : table.rows) samples.push_back({row[0], row[1]});
  return Spectrum(std::move(samples), ion);
}

void write_fit_result(const FitResult& result, std::ostream& out) {
  out << "K_hat = " << format_scientific(result.reflection) << '\n'
      << "mu_hat = " << format_scientific(result.phase_index) << '\n'
      << "d_hat_bohr = " << format_scientific(result.distance) << '\n'
      << "residual_norm_au = " << format_scientific(result.residual_norm) << '\n'
      << "iterations = " << result.iterations << '\n'
      << "converged = " << (result.converged ? "true" : "false") << '\n'
      << "unidentifiable = " << (result.unidentifiable ? "true" : "false") << '\n';
}

std::string fit_result_csv_header() {
  return "K_hat,mu_hat,d_hat_bohr,residual_norm_au,iterations,converged,unidentifiable";
}

std::string fit_result_csv_row(const FitResult& result) {
  std::ostringstream row;
  row << format_scientific(result.reflection) << ',' << format_scientific(result.phase_index) << ','
      << format_scientific(result.distance) << ',' << format_scientific(result.residual_norm) << ','
      << result.iterations << ',' << (result.converged ? 1 : 0) << ','
      << (result.unidentifiable ? 1 : 0);
  return row.str();
}

}  // namespace photodetach::fit
