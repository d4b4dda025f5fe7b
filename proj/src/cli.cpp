#include "dicke/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dicke/comparison.hpp"
#include "dicke/errors.hpp"
#include "dicke/mean_field.hpp"
#include "dicke/optimizer.hpp"
#include "dicke/validation.hpp"

namespace dicke::cli {
namespace {

using nlohmann::ordered_json;

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  ordered_json metadata = ordered_json::object();
  std::vector<Table> tables;
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return csv_escape(v);
      },
      c);
}

ordered_json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
        }
        return v;
      },
      c);
}

std::string metadata_value(const ordered_json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void write_csv_table(std::ostream& os, const ordered_json& metadata, const Table& t) {
  for (const auto& [key, value] : metadata.items()) os << "# " << key << ": " << metadata_value(value) << "\n";
  os << "# table: " << t.name << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << "\n";
  }
}

ordered_json to_json(const Report& r) {
  ordered_json doc = ordered_json::object();
  doc["metadata"] = r.metadata;
  for (const auto& t : r.tables) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json obj = ordered_json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
      rows.push_back(std::move(obj));
    }
    doc[t.name] = std::move(rows);
  }
  return doc;
}

// Sibling path for secondary tables: run.csv -> run.minima.csv.
std::string sibling_path(const std::string& out, const std::string& name) {
  std::string stem = out;
  if (stem.size() > 4 && stem.compare(stem.size() - 4, 4, ".csv") == 0) stem.resize(stem.size() - 4);
  return stem + "." + name + ".csv";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f.precision(17);
  return f;
}

void emit(const Report& r, const std::string& format, const std::string& out_path, std::ostream& out) {
  if (format == "json") {
    const std::string text = to_json(r).dump(2) + "\n";
    if (out_path.empty()) {
      out << text;
    } else {
      auto f = open_output(out_path);
      f << text;
    }
    return;
  }
  if (out_path.empty()) {
    for (std::size_t i = 0; i < r.tables.size(); ++i) {
      if (i) out << "\n";
      write_csv_table(out, r.metadata, r.tables[i]);
    }
    return;
  }
  for (std::size_t i = 0; i < r.tables.size(); ++i) {
    auto f = open_output(i == 0 ? out_path : sibling_path(out_path, r.tables[i].name));
    write_csv_table(f, r.metadata, r.tables[i]);
  }
}

std::vector<double> split_numbers(const std::string& text, char sep, const std::string& flag) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    const std::string piece = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(piece, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (piece.empty() || used != piece.size() || !std::isfinite(v))
      throw ConfigError(flag + ": '" + text + "' is not a list of numbers separated by '" + sep + "'");
    values.push_back(v);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return values;
}

std::pair<double, double> parse_interval(const std::string& text, const std::string& flag) {
  const auto v = split_numbers(text, ':', flag);
  if (v.size() != 2) throw ConfigError(flag + " expects lo:hi");
  if (!(v[0] < v[1])) throw ConfigError(flag + ": lo must be below hi");
  return {v[0], v[1]};
}

std::vector<double> parse_gamma_range(const std::string& text) {
  const auto v = split_numbers(text, ':', "--gamma-range");
  if (v.size() != 3) throw ConfigError("--gamma-range expects lo:hi:step");
  const double lo = v[0], hi = v[1], step = v[2];
  if (lo > hi) throw ConfigError("--gamma-range: lo must not exceed hi");
  if (!(step > 0.0)) throw ConfigError("--gamma-range: step must be positive");
  const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 1000000) throw ConfigError("--gamma-range: more than 10^6 points");
  std::vector<double> grid;
  for (std::int64_t i = 0; i < count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
  return grid;
}

std::pair<int, int> parse_resolution(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ConfigError("--resolution expects NQxNTHETA");
  const auto v = split_numbers(text.substr(0, x) + ":" + text.substr(x + 1), ':', "--resolution");
  if (v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) || v[0] < 2 || v[1] < 2 || v[0] > 4000 || v[1] > 4000)
    throw ConfigError("--resolution: both counts must be integers in [2, 4000]");
  return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

struct Options {
  double omega_a = 1.0;
  std::vector<int> n_atoms{20};
  double gamma = 0.0;
  std::string gamma_range;
  std::string surface;
  std::string sector = "even";
  int nu_max = 0;
  double tol_grad = 1e-8;
  double tol_bisect = 1e-4;
  double tol_eig = 1e-10;
  double tol_conv = 1e-8;
  double tol_fd = 1e-6;
  double tol_embed = 1e-6;
  std::string format = "csv";
  std::string out;
  std::string bracket;
  std::string q_range;
  std::string theta_range;
  std::string resolution = "101x101";
  bool overlap = false;
  bool no_fidelity = false;
  bool inject_sign_error = false;

  CLI::Option* gamma_opt = nullptr;
  CLI::Option* gamma_range_opt = nullptr;
  CLI::Option* surface_opt = nullptr;
  CLI::Option* nu_max_opt = nullptr;
};

void check_positive(double v, const std::string& flag) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(flag + " must be positive");
}

void check_common(const Options& o) {
  check_positive(o.omega_a, "--omega-a");
  for (int n : o.n_atoms)
    if (n < 1) throw ConfigError("--n-atoms entries must be positive");
  if (o.n_atoms.empty()) throw ConfigError("--n-atoms must name at least one atom number");
  check_positive(o.tol_grad, "--tol-grad");
  check_positive(o.tol_bisect, "--tol-bisect");
  check_positive(o.tol_eig, "--tol-eig");
  check_positive(o.tol_conv, "--tol-conv");
  check_positive(o.tol_fd, "--tol-fd");
  check_positive(o.tol_embed, "--tol-embed");
  if (o.nu_max_opt->count() && o.nu_max < 1) throw ConfigError("--nu-max must be at least 1");
}

std::vector<double> gamma_grid(const Options& o) {
  const bool single = o.gamma_opt->count() > 0;
  const bool range = o.gamma_range_opt->count() > 0;
  if (single && range) throw ConfigError("--gamma and --gamma-range are mutually exclusive");
  if (range) return parse_gamma_range(o.gamma_range);
  if (single) {
    if (!(o.gamma >= 0.0) || !std::isfinite(o.gamma)) throw ConfigError("--gamma must be non-negative");
    return {o.gamma};
  }
  throw ConfigError("a coupling is required: pass --gamma or --gamma-range");
}

SearchConfig search_config(const Options& o) {
  SearchConfig s;
  s.grad_tol = o.tol_grad;
  return s;
}

GroundStateOptions ground_options(const Options& o) {
  GroundStateOptions g;
  g.eig_tol = o.tol_eig;
  g.conv_tol = o.tol_conv;
  if (o.nu_max_opt->count()) g.nu_max_fixed = o.nu_max;
  return g;
}

// Surface named by --surface, or the SACS surface of --sector.
Surface variational_surface(const Options& o) {
  if (o.surface_opt->count()) return parse_surface(o.surface);
  return parse_sector(o.sector) == ParitySector::even ? Surface::sacs_even : Surface::sacs_odd;
}

ordered_json base_metadata(const Options& o, const std::string& command) {
  ordered_json m = ordered_json::object();
  m["artifact"] = "dicke";
  m["version"] = kArtifactVersion;
  m["command"] = command;
  m["omega_a"] = o.omega_a;
  m["n_atoms"] = o.n_atoms;
  m["tol_grad"] = o.tol_grad;
  m["tol_bisect"] = o.tol_bisect;
  m["tol_eig"] = o.tol_eig;
  m["tol_conv"] = o.tol_conv;
  return m;
}

int single_n(const Options& o, const std::string& command) {
  if (o.n_atoms.size() != 1) throw ConfigError(command + " takes a single --n-atoms value");
  return o.n_atoms.front();
}

std::vector<Cell> minimum_row(const ModelParams& p, std::int64_t index, const LocalMinimum& m) {
  return {index,
          std::string(to_string(m.basin)),
          m.point.q(),
          m.point.p(),
          m.point.theta(),
          m.point.phi(),
          m.total_energy,
          m.total_energy / p.n(),
          m.order.photon_per_atom,
          m.order.excited_fraction,
          m.hessian_eigs[0],
          m.hessian_eigs[1],
          m.gradient_norm};
}

const std::vector<std::string> kMinimaColumns = {
    "index",           "basin",           "q",           "p",           "theta",
    "phi",             "total_energy",    "per_atom_energy", "photon_per_atom", "excited_fraction",
    "hessian_eig_min", "hessian_eig_max", "gradient_norm"};

int cmd_surface(const Options& o, std::ostream& out) {
  const int n = single_n(o, "surface");
  const auto grid = gamma_grid(o);
  if (grid.size() != 1) throw ConfigError("surface takes a single coupling");
  const ModelParams p(o.omega_a, grid.front(), n);
  const Surface surface = variational_surface(o);

  const double q_scale = 2.0 * std::sqrt(p.j()) * p.gamma();
  const auto q_range = o.q_range.empty() ? std::pair{0.0, std::max(1.0, 1.5 * q_scale)} : parse_interval(o.q_range, "--q-range");
  const auto theta_range =
      o.theta_range.empty() ? std::pair{0.0, 1.5707963267948966 - 1e-3} : parse_interval(o.theta_range, "--theta-range");
  const auto resolution = parse_resolution(o.resolution);

  const SurfaceGrid g = surface_grid(p, surface, q_range, theta_range, resolution, search_config(o));

  Report r;
  r.metadata = base_metadata(o, "surface");
  r.metadata["gamma"] = p.gamma();
  r.metadata["surface"] = std::string(to_string(surface));
  r.metadata["q_range"] = {q_range.first, q_range.second};
  r.metadata["theta_range"] = {theta_range.first, theta_range.second};
  r.metadata["resolution"] = {resolution.first, resolution.second};

  Table cells{"grid", {"q", "theta", "energy", "per_atom_energy", "masked"}, {}};
  for (std::size_t k = 0; k < g.theta_values.size(); ++k) {
    for (std::size_t i = 0; i < g.q_values.size(); ++i) {
      const double e = g.at(k, i);
      cells.rows.push_back({g.q_values[i], g.theta_values[k], e, e / p.n(),
                            static_cast<bool>(g.masked[k * g.q_values.size() + i])});
    }
  }
  Table minima{"minima", kMinimaColumns, {}};
  for (std::size_t i = 0; i < g.minima.size(); ++i)
    minima.rows.push_back(minimum_row(p, static_cast<std::int64_t>(i), g.minima[i]));
  Table section{"section", {"q", "theta", "energy", "per_atom_energy"}, {}};
  for (const auto& s : g.section) section.rows.push_back({s.q, s.theta, s.energy, s.energy / p.n()});

  r.tables = {std::move(cells), std::move(minima), std::move(section)};
  emit(r, o.format, o.out, out);
  return kOk;
}

int cmd_critical(const Options& o, std::ostream& out, std::ostream& err) {
  const Surface surface = variational_surface(o);
  CriticalConfig cfg;
  cfg.tol = o.tol_bisect;
  cfg.search = search_config(o);
  if (!o.bracket.empty()) cfg.bracket = parse_interval(o.bracket, "--bracket");

  Report r;
  r.metadata = base_metadata(o, "critical");
  r.metadata["surface"] = std::string(to_string(surface));
  if (cfg.bracket) r.metadata["bracket"] = {cfg.bracket->first, cfg.bracket->second};

  Table t{"critical",
          {"n_atoms", "gamma_c", "gamma_c_tdl", "bracket_lo", "bracket_hi", "energy_gap_at_tol", "delta_e_slope",
           "jump_photon_per_atom", "jump_excited_fraction", "low_q", "low_theta", "low_energy", "high_q",
           "high_theta", "high_energy", "diagnostic"},
          {}};
  bool failed = false;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int n : o.n_atoms) {
    const ModelParams p(o.omega_a, 0.0, n);
    try {
      const CriticalResult c = critical_coupling(p, surface, cfg);
      const auto& [lo, hi] = c.minima_at_crossing;
      t.rows.push_back({std::int64_t{n}, c.gamma_c, gamma_c_tdl(p), c.bracket.first, c.bracket.second,
                        c.energy_gap_at_tol, c.delta_e_slope, c.order_param_jump.first, c.order_param_jump.second,
                        lo.point.q(), lo.point.theta(), lo.total_energy, hi.point.q(), hi.point.theta(),
                        hi.total_energy, std::string()});
    } catch (const NumericalError& e) {
      failed = true;
      err << "critical N=" << n << ": " << e.what() << "\n";
      t.rows.push_back({std::int64_t{n}, nan, gamma_c_tdl(p), nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan,
                        nan, std::string(e.what())});
    }
  }
  r.tables = {std::move(t)};
  emit(r, o.format, o.out, out);
  return failed ? kNumericalFailure : kOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto grid = gamma_grid(o);
  const std::string source = o.surface_opt->count() ? o.surface : "sacs_" + o.sector;
  const bool exact = source == "exact";

  Report r;
  r.metadata = base_metadata(o, "sweep");
  r.metadata["source"] = source;
  if (o.gamma_range_opt->count()) r.metadata["gamma_range"] = o.gamma_range;
  else r.metadata["gamma"] = o.gamma;
  bool failed = false;

  if (exact) {
    ExactSweepOptions opts;
    opts.sector = parse_sector(o.sector);
    opts.ground = ground_options(o);
    opts.fidelity = !o.no_fidelity;
    opts.sacs_overlap = o.overlap;
    opts.search = search_config(o);
    r.metadata["sector"] = o.sector;
    if (o.nu_max_opt->count()) r.metadata["nu_max"] = o.nu_max;
    Table t{"sweep",
            {"n_atoms", "gamma", "source", "per_atom_energy", "total_energy", "photon_per_atom", "excited_fraction",
             "var_q", "var_jx", "chi_fidelity", "level_crossing", "sacs_overlap", "nu_max", "convergence_gap",
             "diagnostic"},
            {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int n : o.n_atoms) {
      for (const auto& row : exact_sweep(ModelParams(o.omega_a, 0.0, n), grid, opts)) {
        if (!row.diagnostic.empty()) {
          failed = true;
          err << "sweep N=" << n << " gamma=" << format_double(row.gamma) << ": " << row.diagnostic << "\n";
        }
        t.rows.push_back({std::int64_t{n}, row.gamma, source, row.per_atom_energy, row.energy,
                          row.obs.photon_per_atom, row.obs.excited_fraction, row.obs.var_q, row.obs.var_jx,
                          row.chi_fidelity.value_or(nan), row.level_crossing, row.sacs_overlap.value_or(nan),
                          std::int64_t{row.nu_max}, row.convergence_gap, row.diagnostic});
      }
    }
    r.tables = {std::move(t)};
  } else {
    const Surface surface = parse_surface(source);
    Table t{"sweep",
            {"n_atoms", "gamma", "source", "per_atom_energy", "total_energy", "photon_per_atom", "excited_fraction",
             "q", "theta", "phi", "basin", "minima_count", "degenerate", "diagnostic"},
            {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int n : o.n_atoms) {
      const ModelParams p(o.omega_a, 0.0, n);
      for (const auto& row : sweep(p, surface, grid, search_config(o))) {
        if (!row.global_minimum) {
          failed = true;
          err << "sweep N=" << n << " gamma=" << format_double(row.gamma) << ": " << row.diagnostic << "\n";
          t.rows.push_back({std::int64_t{n}, row.gamma, source, nan, nan, nan, nan, nan, nan, nan, std::string(),
                            std::int64_t{0}, false, row.diagnostic});
          continue;
        }
        const LocalMinimum& m = *row.global_minimum;
        t.rows.push_back({std::int64_t{n}, row.gamma, source, row.per_atom_energy, m.total_energy,
                          m.order.photon_per_atom, m.order.excited_fraction, m.point.q(), m.point.theta(),
                          m.point.phi(), std::string(to_string(m.basin)),
                          static_cast<std::int64_t>(row.all_minima.size()), row.degenerate, row.diagnostic});
      }
    }
    r.tables = {std::move(t)};
  }
  emit(r, o.format, o.out, out);
  return failed ? kNumericalFailure : kOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  ValidationConfig cfg;
  cfg.omega_a = o.omega_a;
  cfg.n_atoms = single_n(o, "validate");
  cfg.fd_tol = o.tol_fd;
  cfg.embed_tol = o.tol_embed;
  cfg.flip_coupling_sign = o.inject_sign_error;
  cfg.ground = ground_options(o);
  cfg.search = search_config(o);

  const ValidationReport report = run_validation(cfg);
  Report r;
  r.metadata = base_metadata(o, "validate");
  r.metadata["tol_fd"] = o.tol_fd;
  r.metadata["tol_embed"] = o.tol_embed;
  r.metadata["inject_coupling_sign_error"] = o.inject_sign_error;
  r.metadata["passed"] = report.passed();
  Table t{"checks", {"check", "status", "worst", "tolerance", "samples", "detail"}, {}};
  for (const auto& c : report.checks)
    t.rows.push_back({c.name, std::string(c.passed ? "PASS" : "FAIL"), c.worst, c.tolerance,
                      std::int64_t{c.samples}, c.detail});
  r.tables = {std::move(t)};
  emit(r, o.format, o.out, out);
  return report.passed() ? kOk : kValidationFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variational and exact analysis of the finite-N Dicke model", "dicke"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "TOML or INI file using the flag names as keys");

  Options o;
  std::vector<CLI::Option*> with_env;
  auto env = [&with_env](CLI::Option* opt, const char* name) {
    with_env.push_back(opt);
    return opt->envname(std::string("DICKE_") + name);
  };
  env(app.add_option("--omega-a", o.omega_a, "Atomic transition frequency (field frequency is 1)")->capture_default_str(),
      "OMEGA_A");
  env(app.add_option("--n-atoms", o.n_atoms, "Atom number, or a comma-separated list")->delimiter(',')->capture_default_str(),
      "N_ATOMS");
  o.gamma_opt = env(app.add_option("--gamma", o.gamma, "Single coupling"), "GAMMA");
  o.gamma_range_opt = env(app.add_option("--gamma-range", o.gamma_range, "Coupling grid lo:hi:step"), "GAMMA_RANGE");
  o.surface_opt = env(app.add_option("--surface", o.surface, "mean_field | sacs_even | sacs_odd (sweep also: exact)")
                          ->check(CLI::IsMember({"mean_field", "sacs_even", "sacs_odd", "exact"})),
                      "SURFACE");
  env(app.add_option("--sector", o.sector, "Parity sector")->check(CLI::IsMember({"even", "odd"}))->capture_default_str(),
      "SECTOR");
  o.nu_max_opt = env(app.add_option("--nu-max", o.nu_max, "Fixed photon cutoff (skips the convergence ladder)"), "NU_MAX");
  env(app.add_option("--tol-grad", o.tol_grad, "Gradient-norm tolerance of the minimizer")->capture_default_str(),
      "TOL_GRAD");
  env(app.add_option("--tol-bisect", o.tol_bisect, "Critical-coupling bisection tolerance")->capture_default_str(),
      "TOL_BISECT");
  env(app.add_option("--tol-eig", o.tol_eig, "Eigensolver residual tolerance")->capture_default_str(), "TOL_EIG");
  env(app.add_option("--tol-conv", o.tol_conv, "Photon-cutoff convergence tolerance")->capture_default_str(),
      "TOL_CONV");
  env(app.add_option("--tol-fd", o.tol_fd, "validate: finite-difference tolerance")->capture_default_str(), "TOL_FD");
  env(app.add_option("--tol-embed", o.tol_embed, "validate: embedding tolerance")->capture_default_str(), "TOL_EMBED");
  env(app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str(),
      "FORMAT");
  env(app.add_option("--out", o.out, "Output file (standard output when absent)"), "OUT");
  env(app.add_option("--bracket", o.bracket, "critical: search interval lo:hi"), "BRACKET");
  env(app.add_option("--q-range", o.q_range, "surface: q interval lo:hi"), "Q_RANGE");
  env(app.add_option("--theta-range", o.theta_range, "surface: theta interval lo:hi"), "THETA_RANGE");
  env(app.add_option("--resolution", o.resolution, "surface: grid size NQxNTHETA")->capture_default_str(),
      "RESOLUTION");
  env(app.add_flag("--overlap", o.overlap, "sweep exact: add the overlap with the SACS minimum"), "OVERLAP");
  env(app.add_flag("--no-fidelity", o.no_fidelity, "sweep exact: skip the fidelity susceptibility"), "NO_FIDELITY");
  app.add_flag("--inject-coupling-sign-error", o.inject_sign_error,
               "validate: negate the coupling of the oracle Hamiltonian");

  auto* surface = app.add_subcommand("surface", "Energy grid, minima and two-minima section at one coupling");
  auto* critical = app.add_subcommand("critical", "Critical coupling from the two-minima crossing, per atom number");
  auto* sweep_cmd = app.add_subcommand("sweep", "Per-coupling table from a variational surface or exact diagonalization");
  auto* validate = app.add_subcommand("validate", "Cross-module oracle checks");

  // Env values are passed as arguments unless the flag is given explicitly.
  std::vector<std::string> args(argv + 1, argv + argc);
  for (const CLI::Option* opt : with_env) {
    const char* value = std::getenv(opt->get_envname().c_str());
    if (!value || !*value) continue;
    const std::string flag = "--" + opt->get_single_name();
    const bool given = std::any_of(args.begin(), args.end(),
                                   [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    if (!given) args.push_back(flag + "=" + value);
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    check_common(o);
    if (surface->parsed()) return cmd_surface(o, out);
    if (critical->parsed()) return cmd_critical(o, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(o, out, err);
    if (validate->parsed()) return cmd_validate(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kConfigError;
}

}  // namespace dicke::cli
