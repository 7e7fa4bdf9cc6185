// qlai: CSV data for diffraction patterns, Rabi curves and Mach-Zehnder
// visibility sweeps, plus the oracle-vs-analytic comparison.
//
// Exit codes: 0 success, 1 numeric or tolerance failure, 2 usage/validation.

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qlai/diffraction.hpp"
#include "qlai/error.hpp"
#include "qlai/interferometer.hpp"
#include "qlai/oracle.hpp"
#include "qlai/rabi.hpp"
#include "qlai/run_config.hpp"
#include "qlai/sweep.hpp"

namespace {

using qlai::format_double;

constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

// Error raised by the CLI itself for inconsistent flags.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

using Echo = std::vector<std::pair<std::string, std::string>>;

void write_header(std::ostream& out, const std::string& command, const Echo& echo) {
  out << "# qlai " << command << "\n";
  for (const auto& [key, value] : echo) out << "# " << key << "=" << value << "\n";
}

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + format_double(values[i]);
  return s;
}

std::array<double, 3> triple(const std::vector<double>& v, const char* name) {
  if (v.size() != 3) throw UsageError(std::string("--") + name + " takes exactly three values");
  return {v[0], v[1], v[2]};
}

// ---------------------------------------------------------------------------

struct DiffractionArgs {
  double theta = 0.0;
  std::string field = "classical";
  std::size_t n = 0;
  double nbar = 1.0;
  int window = -1;
  double tol = 1e-12;
  std::string out = "-";
};

int cmd_diffraction(const DiffractionArgs& a) {
  qlai::DiffractionField field;
  if (a.field == "classical") {
    field = qlai::DiffractionField::classical();
  } else if (a.field == "fock") {
    field = qlai::DiffractionField::fock(a.n, a.nbar);
  } else {
    field = qlai::DiffractionField::coherent(a.nbar);
  }
  const bool automatic = a.window < 0;
  const int half_width = automatic ? qlai::default_diffraction_window(a.theta, field, a.tol) : a.window;
  qlai::MomentumDistribution d = qlai::distribution(a.theta, field, half_width, a.tol);

  // The automatic window drops outer order pairs that both carry no more than tol.
  std::size_t lo = 0;
  std::size_t hi = d.probabilities.size() - 1;
  if (automatic) {
    while (lo < hi && d.probabilities[lo] <= a.tol && d.probabilities[hi] <= a.tol) {
      ++lo;
      --hi;
    }
  }
  double total = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) total += d.probabilities[i];

  Output output(a.out);
  auto& os = output.stream();
  write_header(os, "diffraction",
               {{"theta", format_double(a.theta)},
                {"field", a.field},
                {"n", std::to_string(a.n)},
                {"nbar", format_double(a.nbar)},
                {"window", automatic ? "auto" : std::to_string(a.window)},
                {"tol", format_double(a.tol)},
                {"wp_range", std::to_string(d.wp_values[lo]) + ".." + std::to_string(d.wp_values[hi])},
                {"normalization_deficit", format_double(1.0 - total)}});
  os << "wp,probability\n";
  for (std::size_t i = lo; i <= hi; ++i) os << d.wp_values[i] << "," << format_double(d.probabilities[i]) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct RabiArgs {
  double alpha_sq = 6.0;
  double theta_min = 0.0;
  double theta_max = 40.0 * std::numbers::pi;
  std::size_t points = 2001;
  double tol = 1e-12;
  unsigned threads = 1;
  std::string out = "-";
};

int cmd_rabi(const RabiArgs& a) {
  if (!(a.theta_max >= a.theta_min)) throw UsageError("--theta-max must be >= --theta-min");
  if (a.points < 1) throw UsageError("--points must be >= 1");
  std::vector<double> thetas(a.points);
  for (std::size_t i = 0; i < a.points; ++i) {
    thetas[i] = a.points == 1 ? a.theta_min
                              : a.theta_min + (a.theta_max - a.theta_min) * static_cast<double>(i) /
                                                  static_cast<double>(a.points - 1);
  }
  const auto rows = qlai::parallel_map<std::pair<double, double>>(thetas.size(), a.threads, [&](std::size_t i) {
    const double exact = qlai::pg_coherent(thetas[i], a.alpha_sq, a.tol);
    const double approx = a.alpha_sq > 0.0 ? qlai::pg_coherent_approx(thetas[i], a.alpha_sq) : std::nan("");
    return std::pair{exact, approx};
  });

  Output output(a.out);
  auto& os = output.stream();
  write_header(os, "rabi",
               {{"alpha_sq", format_double(a.alpha_sq)},
                {"theta_min", format_double(a.theta_min)},
                {"theta_max", format_double(a.theta_max)},
                {"points", std::to_string(a.points)},
                {"tol", format_double(a.tol)}});
  if (a.alpha_sq == 0.0) os << "# pg_approx undefined for the vacuum\n";
  os << "theta,pg_exact,pg_approx\n";
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    os << format_double(thetas[i]) << "," << format_double(rows[i].first) << "," << format_double(rows[i].second)
       << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string family = "coherent";
  std::vector<double> nbar_list;
  double nbar_min = 0.01;
  double nbar_max = 1e4;
  std::size_t points = 121;
  bool log_grid = false;
  std::vector<double> areas{qlai::kDefaultAreas.begin(), qlai::kDefaultAreas.end()};
  std::vector<double> couplings = {0.0, 0.0, 0.0};
  std::vector<double> phases = {0.0, 0.0, 0.0};
  double gamma = std::numbers::sqrt2 / 2.0;
  double tol = qlai::kDefaultSeriesTol;
  unsigned threads = 1;
  std::string out = "-";
};

int cmd_mz_sweep(const SweepArgs& a) {
  std::vector<double> grid = a.nbar_list;
  if (grid.empty()) {
    if (a.points < 1) throw UsageError("--points must be >= 1");
    if (!(a.nbar_max >= a.nbar_min) || a.nbar_min < 0.0) throw UsageError("need 0 <= --nbar-min <= --nbar-max");
    if (a.log_grid && !(a.nbar_min > 0.0)) throw UsageError("--log needs --nbar-min > 0");
    grid.resize(a.points);
    for (std::size_t i = 0; i < a.points; ++i) {
      const double t = a.points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(a.points - 1);
      grid[i] = a.log_grid ? a.nbar_min * std::pow(a.nbar_max / a.nbar_min, t)
                           : a.nbar_min + (a.nbar_max - a.nbar_min) * t;
    }
  }
  qlai::PulseSettings settings;
  settings.areas = triple(a.areas, "areas");
  settings.couplings = triple(a.couplings, "couplings");
  settings.state_phases = triple(a.phases, "phases");
  const bool coherent = a.family == "coherent";

  const auto rows = qlai::parallel_map<qlai::MzSignal>(grid.size(), a.threads, [&](std::size_t i) {
    const qlai::MzConfig config = coherent ? qlai::coherent_family(grid[i], settings, a.tol)
                                           : qlai::two_fock_family(grid[i], settings, a.gamma, a.tol);
    return qlai::mz_signal(config);
  });

  std::size_t degenerate = 0;
  for (const auto& r : rows) degenerate += r.degenerate ? 1 : 0;

  Output output(a.out);
  auto& os = output.stream();
  Echo echo = {{"family", a.family},
               {"nbar", join(grid)},
               {"areas", join(a.areas)},
               {"couplings", join(a.couplings)},
               {"phases", join(a.phases)}};
  if (!coherent) echo.emplace_back("gamma", format_double(a.gamma));
  echo.emplace_back("tol", format_double(a.tol));
  echo.emplace_back("degenerate_rows", std::to_string(degenerate));
  write_header(os, "mz-sweep", echo);
  os << "nbar,amplitude,visibility,phase\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << format_double(grid[i]) << "," << format_double(rows[i].amplitude) << ","
       << format_double(rows[i].visibility) << "," << format_double(rows[i].phase) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
  std::string config;
  std::string out = "-";
};

int cmd_oracle_compare(const CompareArgs& a) {
  qlai::RunConfig run = qlai::load_run_config(a.config);
  if (!run.oracle_n_max_set) run.oracle = qlai::sized_for(run.mz, 1e-15, run.oracle);

  const qlai::MzSignal analytic = qlai::mz_signal(run.mz);
  const qlai::OracleResult oracle = qlai::run_mz_oracle(run.mz, run.oracle);

  struct Row {
    std::string quantity;
    double analytic;
    double oracle;
    double diff;
    double tolerance;
  };
  const double tol = run.agreement_tol;
  std::vector<Row> rows = {
      {"amplitude", analytic.amplitude, oracle.signal.amplitude,
       std::abs(analytic.amplitude - oracle.signal.amplitude), tol},
      {"visibility", analytic.visibility, oracle.signal.visibility,
       std::abs(analytic.visibility - oracle.signal.visibility), tol},
      {"phase", analytic.phase, oracle.signal.phase,
       std::abs(qlai::wrap_phase(analytic.phase - oracle.signal.phase)), tol},
  };
  bool all_two_fock = true;
  for (const auto& p : run.mz.pulses) all_two_fock = all_two_fock && std::holds_alternative<qlai::TwoFock>(p.state);
  if (all_two_fock) {
    const auto closed = qlai::mz_two_fock_closed_form(run.mz);
    const double overlap_abs = std::abs(2.0 * closed.overlap - qlai::mz_overlap(run.mz));
    rows.push_back({"closed_form_overlap", std::abs(2.0 * closed.overlap), std::abs(qlai::mz_overlap(run.mz)),
                    overlap_abs, 1e-12});
  }
  rows.push_back({"norm_drift", 0.0, oracle.norm_drift, oracle.norm_drift, 1e-12});
  rows.push_back({"harmonic_residual", 0.0, oracle.harmonic_residual, oracle.harmonic_residual, 1e-10});

  bool pass = true;
  for (const auto& r : rows) pass = pass && r.diff <= r.tolerance;

  Output output(a.out);
  auto& os = output.stream();
  os << "# qlai oracle-compare\n# config=" << a.config << "\n";
  std::istringstream resolved(qlai::to_config_text(run));
  for (std::string line; std::getline(resolved, line);) os << "# " << line << "\n";
  os << "# degenerate=" << (analytic.degenerate ? "true" : "false") << "\n";
  os << "quantity,analytic,oracle,abs_diff,tolerance,status\n";
  for (const auto& r : rows) {
    os << r.quantity << "," << format_double(r.analytic) << "," << format_double(r.oracle) << ","
       << format_double(r.diff) << "," << format_double(r.tolerance) << "," << (r.diff <= r.tolerance ? "pass" : "fail")
       << "\n";
  }
  std::cerr << "oracle-compare: " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized-light atom interferometry: diffraction, Rabi curves and Mach-Zehnder signals"};
  app.require_subcommand(1);
  unsigned threads = qlai::default_thread_count();
  app.add_option("--threads", threads, "Worker threads for sweeps (default: QLAI_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  DiffractionArgs diff;
  auto* diffraction = app.add_subcommand("diffraction", "Raman-Nath momentum distribution W(wp)");
  diffraction->add_option("--theta", diff.theta, "Pulse area")->required()->check(CLI::NonNegativeNumber);
  diffraction->add_option("--field", diff.field, "classical, fock or coherent")
      ->check(CLI::IsMember({"classical", "fock", "coherent"}));
  diffraction->add_option("--n", diff.n, "Photon number of the Fock field");
  diffraction->add_option("--nbar", diff.nbar, "Pulse normalization (fock) or |alpha|^2 (coherent)")
      ->check(CLI::NonNegativeNumber);
  diffraction->add_option("--window", diff.window, "Half-width of the wp window (default: automatic)")
      ->check(CLI::NonNegativeNumber);
  diffraction->add_option("--tol", diff.tol, "Series and edge tolerance")->check(CLI::PositiveNumber);
  diffraction->add_option("-o,--out", diff.out, "Output CSV path, - for stdout");

  RabiArgs rabi;
  auto* rabi_cmd = app.add_subcommand("rabi", "Ground-state probability versus pulse area, coherent field");
  rabi_cmd->add_option("--alpha-sq,--nbar", rabi.alpha_sq, "|alpha|^2")->check(CLI::NonNegativeNumber);
  rabi_cmd->add_option("--theta-min", rabi.theta_min, "First pulse area");
  rabi_cmd->add_option("--theta-max", rabi.theta_max, "Last pulse area");
  rabi_cmd->add_option("--points", rabi.points, "Number of grid points")->check(CLI::PositiveNumber);
  rabi_cmd->add_option("--tol", rabi.tol, "Poisson tail tolerance")->check(CLI::PositiveNumber);
  rabi_cmd->add_option("-o,--out", rabi.out, "Output CSV path, - for stdout");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("mz-sweep", "Mach-Zehnder A, V, Phi versus mean photon number");
  sweep_cmd->add_option("--family", sweep.family, "coherent or two_fock")
      ->check(CLI::IsMember({"coherent", "two_fock"}));
  sweep_cmd->add_option("--nbar", sweep.nbar_list, "Explicit nbar grid (comma separated)")->delimiter(',');
  sweep_cmd->add_option("--nbar-min", sweep.nbar_min, "Grid start");
  sweep_cmd->add_option("--nbar-max", sweep.nbar_max, "Grid end");
  sweep_cmd->add_option("--points", sweep.points, "Grid points");
  sweep_cmd->add_flag("--log", sweep.log_grid, "Logarithmic grid");
  sweep_cmd->add_option("--areas", sweep.areas, "Pulse areas Theta_0,Theta_1,Theta_2")->delimiter(',');
  sweep_cmd->add_option("--couplings", sweep.couplings, "Coupling phases theta_0,theta_1,theta_2")->delimiter(',');
  sweep_cmd->add_option("--phases", sweep.phases, "State phases (phi_l or delta_l)")->delimiter(',');
  sweep_cmd->add_option("--gamma", sweep.gamma, "two_fock weight of the lower level")->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--tol", sweep.tol, "Series tolerance")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("-o,--out", sweep.out, "Output CSV path, - for stdout");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("oracle-compare", "Full tensor simulation versus analytic signal");
  compare_cmd->add_option("config", compare.config, "Run configuration file")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("-o,--out", compare.out, "Output CSV path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (diffraction->parsed()) return cmd_diffraction(diff);
    if (rabi_cmd->parsed()) {
      rabi.threads = threads;
      return cmd_rabi(rabi);
    }
    if (sweep_cmd->parsed()) {
      sweep.threads = threads;
      return cmd_mz_sweep(sweep);
    }
    if (compare_cmd->parsed()) return cmd_oracle_compare(compare);
  } catch (const UsageError& e) {
    std::cerr << "qlai: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qlai::Error& e) {
    std::cerr << "qlai: " << e.what() << "\n";
    return e.is_validation() ? kExitUsage : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "qlai: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
