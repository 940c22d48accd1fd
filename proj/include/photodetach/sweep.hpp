#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "photodetach/model.hpp"
#include "photodetach/table.hpp"

namespace photodetach {

enum class SweepVariable { action_u, photon_energy_ev, rho_bohr };
enum class Quantity { modulation, sigma_total, sigma0, sigma1, sigma2, screen_flux };

/// Parses "u" / "E_ph_eV" / "rho_bohr" (and the short forms "eph", "rho").
SweepVariable parse_sweep_variable(std::string_view name);
/// Parses "A", "sigma_total", "sigma0", "sigma1", "sigma2", "j_z".
Quantity parse_quantity(std::string_view name);
std::string_view to_string(SweepVariable variable);
std::string_view to_string(Quantity quantity);

/// Rejected sweep specification; `field()` names the offending member.
class SpecError : public std::invalid_argument {
 public:
  SpecError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SweepRange {
  double start;
  double stop;
  std::size_t count;

  double at(std::size_t i) const;
};

struct SweepSpec {
  SweepVariable variable = SweepVariable::action_u;
  SweepRange range{0.5, 60.0, 2000};
  IonModel ion{};
  /// One group of quantity columns per surface.
  std::vector<SurfaceModel> surfaces;
  std::optional<ScreenGeometry> geometry;
  /// Fixed photon energy (eV) for screen-radius sweeps.
  std::optional<double> photon_energy_ev;
  std::vector<Quantity> outputs;

  void validate() const;
};

/// Rows in ascending order of the swept variable; the first column is the swept
/// value. The result is a pure function of the spec and does not depend on
/// `threads` (0 = hardware concurrency).
Table run_sweep(const SweepSpec& spec, unsigned threads = 0);

/// "fig2", "fig3" or "fig4"; throws SpecError for anything else.
SweepSpec preset(std::string_view name, const IonModel& ion = {});

}  // namespace photodetach
