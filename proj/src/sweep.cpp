#include "photodetach/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "photodetach/parallel.hpp"

namespace photodetach {

namespace {

std::string compact(double value) {
  char buffer[32];
  const int n = std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return std::string(buffer, static_cast<std::size_t>(n));
}

std::string_view unit_suffix(Quantity q) {
  return q == Quantity::modulation ? "" : "_au";
}

bool depends_on_surface(Quantity q) { return q != Quantity::sigma0; }

std::vector<std::string> column_names(const SweepSpec& spec) {
  std::vector<std::string> names{std::string(to_string(spec.variable))};
  const bool several = spec.surfaces.size() > 1;
  const bool mixed_d =
      std::any_of(spec.surfaces.begin(), spec.surfaces.end(), [&](const SurfaceModel& s) {
        return s.wall_distance() != spec.surfaces.front().wall_distance();
      });
  for (Quantity q : spec.outputs) {
    if (!depends_on_surface(q) || !several) {
      names.push_back(std::string(to_string(q)) + std::string(unit_suffix(q)));
      continue;
    }
    for (const auto& s : spec.surfaces) {
      std::string tag = "_K" + compact(s.reflection()) + "_mu" + compact(s.phase_index());
      if (mixed_d) tag += "_d" + compact(s.wall_distance());
      names.push_back(std::string(to_string(q)) + tag + std::string(unit_suffix(q)));
    }
  }
  return names;
}

// Electron energy for one surface at one swept value (unused for rho sweeps).
double electron_energy_at(const SweepSpec& spec, const SurfaceModel& surface, double x) {
  if (spec.variable == SweepVariable::action_u) {
    const double k = x / (2.0 * surface.wall_distance());
    return 0.5 * k * k;
  }
  return units::ev_to_hartree(x) - spec.ion.binding_energy();
}

double evaluate(const SweepSpec& spec, Quantity q, const SurfaceModel& surface, double x) {
  if (q == Quantity::screen_flux) {
    const double E = units::ev_to_hartree(*spec.photon_energy_ev) - spec.ion.binding_energy();
    return screen_flux(spec.ion, surface, E, *spec.geometry, x);
  }
  if (q == Quantity::modulation && spec.variable == SweepVariable::action_u)
    return modulation(x, surface);
  const double E = electron_energy_at(spec, surface, x);
  switch (q) {
    case Quantity::modulation:
      return modulation(2.0 * surface.wall_distance() * std::sqrt(2.0 * E), surface);
    case Quantity::sigma_total: return sigma_total(spec.ion, surface, E);
    case Quantity::sigma0: return sigma0(spec.ion, E);
    case Quantity::sigma1: return sigma1(spec.ion, surface, E);
    case Quantity::sigma2: return sigma2(spec.ion, surface, E);
    case Quantity::screen_flux: break;
  }
  throw std::logic_error("unhandled quantity");
}

}  // namespace

SweepVariable parse_sweep_variable(std::string_view name) {
  if (name == "u") return SweepVariable::action_u;
  if (name == "E_ph_eV" || name == "eph") return SweepVariable::photon_energy_ev;
  if (name == "rho_bohr" || name == "rho") return SweepVariable::rho_bohr;
  throw SpecError("variable", "unknown sweep variable '" + std::string(name) + "'");
}

Quantity parse_quantity(std::string_view name) {
  if (name == "A") return Quantity::modulation;
  if (name == "sigma_total") return Quantity::sigma_total;
  if (name == "sigma0") return Quantity::sigma0;
  if (name == "sigma1") return Quantity::sigma1;
  if (name == "sigma2") return Quantity::sigma2;
  if (name == "j_z") return Quantity::screen_flux;
  throw SpecError("outputs", "unknown quantity '" + std::string(name) + "'");
}

std::string_view to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::action_u: return "u";
    case SweepVariable::photon_energy_ev: return "E_ph_eV";
    case SweepVariable::rho_bohr: return "rho_bohr";
  }
  return "?";
}

std::string_view to_string(Quantity quantity) {
  switch (quantity) {
    case Quantity::modulation: return "A";
    case Quantity::sigma_total: return "sigma_total";
    case Quantity::sigma0: return "sigma0";
    case Quantity::sigma1: return "sigma1";
    case Quantity::sigma2: return "sigma2";
    case Quantity::screen_flux: return "j_z";
  }
  return "?";
}

double SweepRange::at(std::size_t i) const {
  if (i + 1 == count) return stop;
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void SweepSpec::validate() const {
  if (!std::isfinite(range.start) || !std::isfinite(range.stop) || !(range.start < range.stop))
    throw SpecError("range", "start must be below stop");
  if (range.count < 2) throw SpecError("range.count", "at least two points are required");
  if (surfaces.empty()) throw SpecError("surfaces", "at least one surface is required");
  if (outputs.empty()) throw SpecError("outputs", "no quantities requested");

  const bool rho_sweep = variable == SweepVariable::rho_bohr;
  for (Quantity q : outputs) {
    if (q == Quantity::screen_flux && !rho_sweep)
      throw SpecError("outputs", "j_z requires a rho_bohr sweep");
    if (q != Quantity::screen_flux && rho_sweep)
      throw SpecError("outputs", std::string(to_string(q)) + " does not vary along rho_bohr");
  }
  switch (variable) {
    case SweepVariable::action_u:
      if (range.start < 0.0) throw SpecError("range.start", "u must be nonnegative");
      if (range.start == 0.0 && std::any_of(outputs.begin(), outputs.end(), [](Quantity q) {
            return q != Quantity::modulation;
          }))
        throw SpecError("range.start", "cross sections need u > 0 (E > 0)");
      break;
    case SweepVariable::photon_energy_ev:
      if (units::ev_to_hartree(range.start) <= ion.binding_energy())
        throw SpecError("range.start", "photon energy must exceed the detachment threshold " +
                                           compact(units::hartree_to_ev(ion.binding_energy())) +
                                           " eV");
      break;
    case SweepVariable::rho_bohr:
      if (range.start < 0.0) throw SpecError("range.start", "rho must be nonnegative");
      if (!geometry) throw SpecError("geometry", "rho_bohr sweeps need a screen distance");
      if (!photon_energy_ev) throw SpecError("photon_energy_ev", "rho_bohr sweeps need E_ph");
      if (units::ev_to_hartree(*photon_energy_ev) <= ion.binding_energy())
        throw SpecError("photon_energy_ev", "photon energy is below the detachment threshold");
      break;
  }
}

Table run_sweep(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  Table table;
  table.columns = column_names(spec);
  table.rows.assign(spec.range.count, {});

  detail::parallel_for(spec.range.count, threads, [&](std::size_t i) {
    const double x = spec.range.at(i);
    std::vector<double> row{x};
    row.reserve(table.columns.size());
    const bool several = spec.surfaces.size() > 1;
    for (Quantity q : spec.outputs) {
      if (!depends_on_surface(q) || !several) {
        row.push_back(evaluate(spec, q, spec.surfaces.front(), x));
        continue;
      }
      for (const auto& s : spec.surfaces) row.push_back(evaluate(spec, q, s, x));
    }
    table.rows[i] = std::move(row);
  });
  return table;
}

SweepSpec preset(std::string_view name, const IonModel& ion) {
  SweepSpec spec;
  spec.ion = ion;
  if (name == "fig2" || name == "fig3") {
    constexpr double d = 100.0;
    for (double K : {1.0, 0.7, 0.4})
      for (double mu : {1.0, 1.5, 2.0}) spec.surfaces.emplace_back(K, mu, d);
    if (name == "fig2") {
      // Axis range not stated for the modulation figure; chosen to show many periods.
      spec.variable = SweepVariable::action_u;
      spec.range = {0.5, 60.0, 2000};
      spec.outputs = {Quantity::modulation};
    } else {
      // Energy axis not stated; 0.01 eV to 1 eV above threshold.
      const double threshold_ev = units::hartree_to_ev(ion.binding_energy());
      spec.variable = SweepVariable::photon_energy_ev;
      spec.range = {threshold_ev + 0.01, threshold_ev + 1.0, 2000};
      spec.outputs = {Quantity::sigma0, Quantity::sigma_total, Quantity::modulation};
    }
    return spec;
  }
  if (name == "fig4") {
    constexpr double d = 100.0;
    for (double K : {1.0, 0.5, 0.1})
      for (double mu : {1.0, 2.0}) spec.surfaces.emplace_back(K, mu, d);
    spec.variable = SweepVariable::rho_bohr;
    spec.range = {0.0, 40000.0, 2001};
    spec.geometry = ScreenGeometry(10000.0);
    spec.photon_energy_ev = 1.0;
    spec.outputs = {Quantity::screen_flux};
    return spec;
  }
  throw SpecError("preset", "unknown preset '" + std::string(name) + "' (expected fig2, fig3, fig4)");
}

}  // namespace photodetach
