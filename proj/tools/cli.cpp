#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "photodetach/fit.hpp"
#include "photodetach/model.hpp"
#include "photodetach/oracle.hpp"
#include "photodetach/sweep.hpp"
#include "photodetach/table.hpp"

namespace photodetach::cli {

namespace {

// Raised for inconsistent but syntactically valid flag combinations.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IonFlags {
  double binding_energy_ev = IonModel::default_binding_energy_ev;

  void add(CLI::App& app) {
    app.add_option("--eb-ev", binding_energy_ev, "Binding energy E_b of the ion [eV]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  IonModel ion() const { return IonModel(units::ev_to_hartree(binding_energy_ev)); }
};

struct WallFlags {
  double reflection = 1.0;
  double phase_index = 2.0;
  double distance = 100.0;

  void add(CLI::App& app) {
    app.add_option("--k", reflection, "Reflection parameter K [dimensionless, 0..1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--mu", phase_index, "Phase index mu; reflection phase is mu*pi/2 [dimensionless]")
        ->capture_default_str();
    app.add_option("--d-bohr", distance, "Ion-wall distance d [bohr]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  SurfaceModel surface() const { return SurfaceModel(reflection, phase_index, distance); }
};

void enable_config(CLI::App& app) {
  app.add_option("--config", "Read flags from a 'key = value' file (command-line flags take precedence)");
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

// Fills options of `app` not given on the command line from `key = value`
// lines. Lists may be written as `k = [0.5, 1]` or `k = 0.5 1`.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::size_t line_number = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_number;
    const std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty() || content.front() == '[') continue;
    const auto eq = content.find('=');
    const std::string where = path + ":" + std::to_string(line_number);
    if (eq == std::string::npos) throw CLI::ConversionError(where + ": expected 'key = value'");
    std::string key = trim(std::string_view(content).substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    CLI::Option* option = app.get_option_no_throw("--" + key);
    if (option == nullptr || key == "config" || key == "help")
      throw CLI::ExtrasError(where + ": unknown key '" + key + "'", CLI::ExitCodes::ExtrasError);
    if (option->count() > 0) continue;

    std::string value = trim(std::string_view(content).substr(eq + 1));
    if (!value.empty() && value.front() == '[' && value.back() == ']')
      value = value.substr(1, value.size() - 2);
    std::replace(value.begin(), value.end(), ',', ' ');
    std::istringstream tokens(value);
    std::vector<std::string> results;
    for (std::string token; tokens >> token;) {
      if (token.size() >= 2 && (token.front() == '"' || token.front() == '\'') &&
          token.back() == token.front())
        token = token.substr(1, token.size() - 2);
      results.push_back(token);
    }
    if (results.empty()) throw CLI::ConversionError(where + ": missing value for '" + key + "'");
    option->add_result(results);
    option->run_callback();
  }
}

void warn_validity(const SurfaceModel& surface, std::ostream& err) {
  if (auto warning = surface.validity_warning()) err << "warning: " << *warning << '\n';
}

void emit_table(const Table& table, const std::string& output, std::ostream& out) {
  if (output.empty() || output == "-")
    write_table(table, out);
  else
    write_table(table, std::filesystem::path(output));
}

// sigma ----------------------------------------------------------------------

struct SigmaCommand {
  IonFlags ion_flags;
  WallFlags wall;
  std::optional<double> photon_energy_ev;
  std::optional<double> electron_energy_au;

  void attach(CLI::App& parent, std::function<void()>& action, std::ostream& out, std::ostream& err) {
    auto* app = parent.add_subcommand("sigma", "Cross sections sigma0, sigma1, sigma2, sigma and A at one energy");
    enable_config(*app);
    auto* eph = app->add_option("--eph-ev", photon_energy_ev, "Photon energy E_ph [eV]");
    auto* eau = app->add_option("--e-au", electron_energy_au, "Detached-electron energy E [hartree]");
    eph->excludes(eau);
    ion_flags.add(*app);
    wall.add(*app);
    app->callback([this, &action, &out, &err] {
      action = [this, &out, &err] { run(out, err); };
    });
  }

  void run(std::ostream& out, std::ostream& err) const {
    if (!photon_energy_ev && !electron_energy_au)
      throw UsageError("sigma: exactly one of --eph-ev or --e-au is required");
    const IonModel ion = ion_flags.ion();
    const SurfaceModel surface = wall.surface();
    warn_validity(surface, err);
    const auto point =
        photon_energy_ev
            ? DetachmentPoint::from_photon_energy(ion, surface, units::ev_to_hartree(*photon_energy_ev))
            : DetachmentPoint::from_electron_energy(ion, surface, *electron_energy_au);
    const auto cs = cross_sections(ion, surface, point.electron_energy);
    Table table;
    table.columns = {"E_ph_eV", "E_au", "u", "sigma0_au", "sigma1_au", "sigma2_au",
                     "sigma_total_au", "A"};
    table.rows.push_back({units::hartree_to_ev(point.photon_energy), point.electron_energy,
                          cs.action, cs.sigma0, cs.sigma1, cs.sigma2, cs.sigma_total, cs.modulation});
    write_table(table, out);
  }
};

// modulation -----------------------------------------------------------------

struct ModulationCommand {
  double action = 0.0;
  WallFlags wall;

  void attach(CLI::App& parent, std::function<void()>& action_out, std::ostream& out) {
    auto* app = parent.add_subcommand("modulation", "Modulation function A(u) and A1(u)");
    enable_config(*app);
    app->add_option("--u", action, "Action u = 2 d sqrt(2E) [dimensionless]")
        ->required()
        ->check(CLI::NonNegativeNumber);
    wall.add(*app);
    app->callback([this, &action_out, &out] {
      action_out = [this, &out] {
        const SurfaceModel surface = wall.surface();
        Table table;
        table.columns = {"u", "A1", "A"};
        table.rows.push_back({action, a1(action, surface.phase_index()), modulation(action, surface)});
        write_table(table, out);
      };
    });
  }
};

// flux-screen ----------------------------------------------------------------

struct FluxScreenCommand {
  IonFlags ion_flags;
  WallFlags wall;
  std::string preset_name;
  double photon_energy_ev = 1.0;
  double screen_distance = 1e4;
  double rho_start = 0.0;
  double rho_stop = 4e4;
  std::size_t count = 2001;
  std::string output;
  unsigned threads = 0;
  bool fringes = false;

  void attach(CLI::App& parent, std::function<void()>& action, std::ostream& out, std::ostream& err) {
    auto* app = parent.add_subcommand("flux-screen", "Electron flux j_z(rho) on a screen at distance L");
    enable_config(*app);
    app->add_option("--preset", preset_name, "Named dataset (fig4)")->check(CLI::IsMember({"fig4"}));
    app->add_option("--eph-ev", photon_energy_ev, "Photon energy E_ph [eV]")->capture_default_str();
    app->add_option("--l-bohr", screen_distance, "Wall-to-screen distance L [bohr]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--rho-start", rho_start, "First screen radius [bohr]")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--rho-stop", rho_stop, "Last screen radius [bohr]")->capture_default_str();
    app->add_option("--count", count, "Number of radii")->check(CLI::Range(2, 100000000))->capture_default_str();
    app->add_option("--output", output, "Output CSV path (default: standard output)");
    app->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    app->add_flag("--fringe-count", fringes, "Print the number of fringe maxima instead of the table");
    ion_flags.add(*app);
    wall.add(*app);
    app->callback([this, &action, &out, &err] {
      action = [this, &out, &err] { run(out, err); };
    });
  }

  void run(std::ostream& out, std::ostream& err) const {
    const IonModel ion = ion_flags.ion();
    if (fringes) {
      if (!preset_name.empty()) {
        // One line per preset surface.
        const SweepSpec spec = preset(preset_name, ion);
        const double E = units::ev_to_hartree(*spec.photon_energy_ev) - ion.binding_energy();
        for (const auto& surface : spec.surfaces)
          out << "K=" << surface.reflection() << " mu=" << surface.phase_index()
              << " fringes = " << oracle::fringe_count(ion, surface, E, *spec.geometry) << '\n';
        return;
      }
      const SurfaceModel surface = wall.surface();
      warn_validity(surface, err);
      const auto point =
          DetachmentPoint::from_photon_energy(ion, surface, units::ev_to_hartree(photon_energy_ev));
      out << "fringes = "
          << oracle::fringe_count(ion, surface, point.electron_energy, ScreenGeometry(screen_distance))
          << '\n';
      return;
    }
    SweepSpec spec;
    if (!preset_name.empty()) {
      spec = preset(preset_name, ion);
    } else {
      spec.ion = ion;
      spec.variable = SweepVariable::rho_bohr;
      spec.range = {rho_start, rho_stop, count};
      spec.surfaces = {wall.surface()};
      spec.geometry = ScreenGeometry(screen_distance);
      spec.photon_energy_ev = photon_energy_ev;
      spec.outputs = {Quantity::screen_flux};
      warn_validity(spec.surfaces.front(), err);
    }
    emit_table(run_sweep(spec, threads), output, out);
  }
};

// sweep ----------------------------------------------------------------------

struct SweepCommand {
  IonFlags ion_flags;
  std::string preset_name;
  std::string variable = "u";
  double start = 0.5;
  double stop = 60.0;
  std::size_t count = 2000;
  std::vector<double> reflections{1.0};
  std::vector<double> phases{2.0};
  double distance = 100.0;
  std::vector<std::string> outputs{"A"};
  double photon_energy_ev = 1.0;
  double screen_distance = 1e4;
  std::string output;
  unsigned threads = 0;

  void attach(CLI::App& parent, std::function<void()>& action, std::ostream& out, std::ostream& err) {
    auto* app = parent.add_subcommand("sweep", "Parameter sweep written as CSV");
    enable_config(*app);
    app->add_option("--preset", preset_name, "Named dataset: fig2 (A vs u), fig3 (sigma vs E_ph), fig4 (j_z vs rho)")
        ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    app->add_option("--variable", variable, "Swept variable: u | E_ph_eV | rho_bohr")
        ->check(CLI::IsMember({"u", "E_ph_eV", "rho_bohr"}))
        ->capture_default_str();
    app->add_option("--start", start, "First value of the swept variable [its unit]")->capture_default_str();
    app->add_option("--stop", stop, "Last value of the swept variable [its unit]")->capture_default_str();
    app->add_option("--count", count, "Number of points")->capture_default_str();
    app->add_option("--k", reflections, "Reflection parameter(s) K [0..1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--mu", phases, "Phase index value(s) mu [dimensionless]")->capture_default_str();
    app->add_option("--d-bohr", distance, "Ion-wall distance d [bohr]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--outputs", outputs, "Quantities: A sigma_total sigma0 sigma1 sigma2 j_z")
        ->check(CLI::IsMember({"A", "sigma_total", "sigma0", "sigma1", "sigma2", "j_z"}))
        ->capture_default_str();
    app->add_option("--eph-ev", photon_energy_ev, "Photon energy for rho sweeps [eV]")->capture_default_str();
    app->add_option("--l-bohr", screen_distance, "Wall-to-screen distance L for rho sweeps [bohr]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--output", output, "Output CSV path (default: standard output)");
    app->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    ion_flags.add(*app);
    app->callback([this, &action, &out, &err] {
      action = [this, &out, &err] { run(out, err); };
    });
  }

  void run(std::ostream& out, std::ostream& err) const {
    const IonModel ion = ion_flags.ion();
    SweepSpec spec;
    if (!preset_name.empty()) {
      spec = preset(preset_name, ion);
    } else {
      spec.ion = ion;
      spec.variable = parse_sweep_variable(variable);
      spec.range = {start, stop, count};
      for (double K : reflections)
        for (double mu : phases) spec.surfaces.emplace_back(K, mu, distance);
      for (const auto& name : outputs) spec.outputs.push_back(parse_quantity(name));
      if (spec.variable == SweepVariable::rho_bohr) {
        spec.geometry = ScreenGeometry(screen_distance);
        spec.photon_energy_ev = photon_energy_ev;
      }
      warn_validity(spec.surfaces.front(), err);
    }
    emit_table(run_sweep(spec, threads), output, out);
  }
};

// validate -------------------------------------------------------------------

struct ValidateCommand {
  std::optional<double> tolerance;
  std::string grid = "full";
  std::string report;
  unsigned threads = 0;

  void attach(CLI::App& parent, std::function<void()>& action, std::ostream& out, std::ostream& err) {
    auto* app = parent.add_subcommand("validate", "Compare every closed form against its quadrature oracle");
    enable_config(*app);
    app->add_option("--tol", tolerance,
                    "Relative tolerance applied to every check (default: sigma1 1e-8, sigma2 1e-10, "
                    "screen_total 1e-8, identity 1e-12)")
        ->check(CLI::PositiveNumber);
    app->add_option("--grid", grid, "Parameter grid: small | full")
        ->check(CLI::IsMember({"small", "full"}))
        ->capture_default_str();
    app->add_option("--report", report, "CSV report path (default: standard output)");
    app->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    app->callback([this, &action, &out, &err] {
      action = [this, &out, &err] { run(out, err); };
    });
  }

  void run(std::ostream& out, std::ostream& err) const {
    oracle::ValidationOptions options;
    options.grid = grid == "small" ? oracle::ValidationGrid::small : oracle::ValidationGrid::full;
    if (tolerance) options.tolerances = oracle::ValidationTolerances::uniform(*tolerance);
    options.threads = threads;
    const auto rows = oracle::run_validation(options);

    std::ostringstream csv;
    csv << "check,E_ph_eV,K,mu,d_bohr,analytic_au,oracle_au,rel_diff,tolerance,pass\n";
    std::size_t failures = 0;
    for (const auto& row : rows) {
      csv << row.check << ',' << format_scientific(row.photon_energy_ev) << ','
          << format_scientific(row.reflection) << ',' << format_scientific(row.phase_index) << ','
          << format_scientific(row.wall_distance) << ',' << format_scientific(row.analytic) << ','
          << format_scientific(row.reference) << ',' << format_scientific(row.relative_difference)
          << ',' << format_scientific(row.tolerance) << ',' << (row.pass ? "pass" : "FAIL") << '\n';
      if (!row.pass) ++failures;
    }
    if (report.empty() || report == "-") {
      out << csv.str();
    } else {
      std::ofstream file(report, std::ios::binary | std::ios::trunc);
      if (!file || !(file << csv.str())) throw IoError("cannot write report '" + report + "'");
    }
    err << rows.size() - failures << '/' << rows.size() << " oracle checks passed\n";
    if (failures) throw ValidationFailure(std::to_string(failures) + " oracle checks failed");
  }
};

// synth / fit ----------------------------------------------------------------

struct SynthCommand {
  IonFlags ion_flags;
  WallFlags wall;
  std::optional<double> start_ev;
  std::optional<double> stop_ev;
  std::size_t count = 200;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string output;

  void attach(CLI::App& parent, std::function<void()>& action, std::ostream& out, std::ostream& err) {
    auto* app = parent.add_subcommand("synth", "Synthetic cross-section spectrum (CSV E_ph_eV,sigma_au)");
    enable_config(*app);
    app->add_option("--eph-start-ev", start_ev, "First photon energy [eV] (default: E_b + 0.01 eV)");
    app->add_option("--eph-stop-ev", stop_ev, "Last photon energy [eV] (default: E_b + 1.0 eV)");
    app->add_option("--count", count, "Number of samples")->check(CLI::Range(8, 100000000))->capture_default_str();
    app->add_option("--noise", noise, "Relative Gaussian noise width [dimensionless]")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--output", output, "Output CSV path (default: standard output)");
    ion_flags.add(*app);
    wall.add(*app);
    app->callback([this, &action, &out, &err] {
      action = [this, &out, &err] { run(out, err); };
    });
  }

  void run(std::ostream& out, std::ostream& err) const {
    const IonModel ion = ion_flags.ion();
    const SurfaceModel surface = wall.surface();
    warn_validity(surface, err);
    const double threshold = ion_flags.binding_energy_ev;
    const auto grid = fit::linear_grid(start_ev.value_or(threshold + 0.01),
                                       stop_ev.value_or(threshold + 1.0), count);
    const auto spectrum = fit::synthesize_spectrum(ion, surface, grid, noise, seed);
    if (output.empty() || output == "-") {
      fit::write_spectrum(spectrum, out);
      return;
    }
    std::ofstream file(output, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + output + "' for writing");
    fit::write_spectrum(spectrum, file);
    if (!file) throw IoError("failed writing '" + output + "'");
  }
};

struct FitCommand {
  IonFlags ion_flags;
  std::string input = "-";
  bool fit_distance = false;
  double distance = 100.0;
  double distance_min = 50.0;
  double distance_max = 500.0;
  std::string csv_output;

  void attach(CLI::App& parent, std::function<void()>& action, std::istream& in, std::ostream& out) {
    auto* app = parent.add_subcommand("fit", "Recover K, mu (and optionally d) from a spectrum");
    enable_config(*app);
    app->add_option("--input", input, "Spectrum CSV with header E_ph_eV,sigma_au ('-' = standard input)")
        ->capture_default_str();
    app->add_flag("--fit-d", fit_distance, "Also fit the wall distance d");
    app->add_option("--d-bohr", distance, "Known wall distance d when --fit-d is absent [bohr]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--d-min", distance_min, "Lower bound on d with --fit-d [bohr]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--d-max", distance_max, "Upper bound on d with --fit-d [bohr]")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--csv", csv_output, "Also write the result as a CSV row to this path");
    ion_flags.add(*app);
    app->callback([this, &action, &in, &out] {
      action = [this, &in, &out] { run(in, out); };
    });
  }

  void run(std::istream& in, std::ostream& out) const {
    const IonModel ion = ion_flags.ion();
    std::optional<fit::Spectrum> spectrum;
    if (input == "-") {
      spectrum = fit::read_spectrum(in, ion);
    } else {
      std::ifstream file(input, std::ios::binary);
      if (!file) throw IoError("cannot open '" + input + "' for reading");
      spectrum = fit::read_spectrum(file, ion);
    }
    fit::FitOptions options;
    options.fit_distance = fit_distance;
    options.distance = distance;
    options.bounds.distance_min = distance_min;
    options.bounds.distance_max = distance_max;
    const auto result = fit::fit_surface(*spectrum, options);
    fit::write_fit_result(result, out);
    if (!csv_output.empty()) {
      std::ofstream file(csv_output, std::ios::binary | std::ios::trunc);
      if (!file) throw IoError("cannot open '" + csv_output + "' for writing");
      file << fit::fit_result_csv_header() << '\n' << fit::fit_result_csv_row(result) << '\n';
      if (!file) throw IoError("failed writing '" + csv_output + "'");
    }
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Photodetachment of H- near a partially reflecting surface", "photodetach"};
  app.require_subcommand(1, 1);

  std::function<void()> action;
  SigmaCommand sigma;
  ModulationCommand modulation_cmd;
  FluxScreenCommand flux_screen;
  SweepCommand sweep;
  ValidateCommand validate;
  SynthCommand synth;
  FitCommand fit_cmd;
  sigma.attach(app, action, out, err);
  modulation_cmd.attach(app, action, out);
  flux_screen.attach(app, action, out, err);
  sweep.attach(app, action, out, err);
  validate.attach(app, action, out, err);
  synth.attach(app, action, out, err);
  fit_cmd.attach(app, action, in, out);

  std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
    for (CLI::App* sub : app.get_subcommands()) {
      const CLI::Option* config = sub->get_option("--config");
      if (config->count() > 0) apply_config_file(*sub, config->as<std::string>());
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_success : exit_usage_error;
  }

  try {
    if (action) action();
    return exit_success;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage_error;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage_error;
  } catch (const ValidationFailure& e) {
    err << "validation failed: " << e.what() << '\n';
    return exit_validation_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_domain_error;
  }
}

}  // namespace photodetach::cli
