#include "photodetach/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace photodetach::quadrature {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const Integrand& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<double, 15> fv{};
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    fv[j] = f(center - half * kronrod_nodes[j]);
    fv[14 - j] = f(center + half * kronrod_nodes[j]);
  }

  double kronrod = kronrod_weights[7] * fv[7];
  double gauss = gauss_weights[3] * fv[7];
  double abs_sum = std::abs(kronrod);
  for (int j = 0; j < 7; ++j) {
    const double pair = fv[j] + fv[14 - j];
    kronrod += kronrod_weights[j] * pair;
    abs_sum += kronrod_weights[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double deviation = kronrod_weights[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j)
    deviation += kronrod_weights[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

  double error = std::abs((kronrod - gauss) * half);
  deviation *= std::abs(half);
  abs_sum *= std::abs(half);
  if (deviation != 0.0 && error != 0.0)
    error = deviation * std::min(1.0, std::pow(200.0 * error / deviation, 1.5));
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
    error = std::max(50.0 * eps * abs_sum, error);
  if (!std::isfinite(kronrod))
    throw std::domain_error("integrand is not finite on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
  return {a, b, kronrod * half, error};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw std::invalid_argument("quadrature tolerances must be positive");
  if (max_subdivisions < 1) throw std::invalid_argument("max_subdivisions must be >= 1");
}

Estimate gauss_kronrod_panel(const Integrand& f, double a, double b) {
  const Panel p = evaluate_panel(f, a, b);
  return {p.value, p.error, 1};
}

Estimate integrate_adaptive(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  if (!(a <= b)) throw std::invalid_argument("integration bounds must satisfy a <= b");
  if (a == b) return {0.0, 0.0, 0};

  std::priority_queue<Panel> panels;
  Panel first = evaluate_panel(f, a, b);
  double value = first.value;
  double error = first.error;
  panels.push(first);

  auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(value)); };

  std::size_t subdivisions = 1;
  while (error > target()) {
    if (subdivisions >= spec.max_subdivisions)
      throw NonConvergence("adaptive quadrature did not converge within " +
                               std::to_string(spec.max_subdivisions) + " subdivisions",
                           {value, error, subdivisions});
    Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b))
      throw NonConvergence("adaptive quadrature reached the floating-point resolution limit",
                           {value, error, subdivisions});
    panels.pop();
    const Panel left = evaluate_panel(f, worst.a, mid);
    const Panel right = evaluate_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }

  // Re-sum to drop the drift of the incremental updates.
  value = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error, subdivisions};
}

}  // namespace photodetach::quadrature
