#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace photodetach::quadrature {

struct QuadratureSpec {
  double abs_tol = 1e-300;
  double rel_tol = 1e-12;
  std::size_t max_subdivisions = 20000;

  /// Throws std::invalid_argument unless tolerances are positive and max_subdivisions >= 1.
  void validate() const;
};

struct Estimate {
  double value;
  double error;
  std::size_t subdivisions;
};

/// The subdivision budget ran out before the error target was met.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, Estimate best)
      : std::runtime_error(what), best_(best) {}
  const Estimate& best() const { return best_; }

 private:
  Estimate best_;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod 7/15 integration of f over [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate falls below max(abs_tol, rel_tol * |value|). The per-panel estimate
/// follows the QUADPACK heuristic (scaled |K15 - G7| with a round-off floor),
/// which is conservative for smooth integrands.
Estimate integrate_adaptive(const Integrand& f, double a, double b, const QuadratureSpec& spec = {});

/// One non-adaptive G7/K15 panel; exposed for tests.
Estimate gauss_kronrod_panel(const Integrand& f, double a, double b);

}  // namespace photodetach::quadrature
