#include "tgq/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "tgq/observables.hpp"
#include "tgq/oracle.hpp"
#include "tgq/quench_dynamics.hpp"

namespace tgq::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
constexpr double kPi = 3.14159265358979323846;

struct RunConfig {
  int m = 0;
  std::string direction = "forward";
  std::string times_spec;
  double t1 = 0.0;
  double grid_L = 12.0;
  int grid_N = 512;
  double tol = 0.0;    // 0: per-command default
  long max_terms = 0;  // 0: per-command default
  std::string out;
  std::string format = "csv";
  bool strict = false;
  std::string reference_name;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit_diagnostic(const std::string& kind, const std::string& message) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << "\n";
}

std::vector<double> parse_times(const std::string& spec) {
  if (spec.empty()) throw UsageError("--t is required for this command");
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double start = 0, stop = 0, step = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0.0)
      throw UsageError("bad time range, expected start:stop:step");
    for (double t = start; t <= stop + 0.5 * step; t += step) out.push_back(t);
  } else {
    std::string item;
    std::stringstream ss(spec);
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  }
  if (out.empty()) throw UsageError("empty time list");
  for (double t : out) {
    if (!(t >= 0.0) || t > 2.0 * kPi + 1e-12)
      throw UsageError("times must lie within [0, 2pi]");
  }
  return out;
}

SummationControl series_control(const RunConfig& cfg) {
  SummationControl ctrl = fidelity_default_control();
  if (cfg.tol > 0.0) ctrl.abs_tol = cfg.tol;
  if (cfg.max_terms > 0) ctrl.max_terms = static_cast<std::size_t>(cfg.max_terms);
  return ctrl;
}

GridSpec grid_of(const RunConfig& cfg) {
  GridSpec g{cfg.grid_L, cfg.grid_N};
  g.validate();
  return g;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << body;
}

std::string sidecar_path(const std::string& out) { return out + ".meta.json"; }

// one fixed rendering for both formats; 17 significant digits keep the files
// byte-identical across platforms
std::string render_table(const RunConfig& cfg, const std::string& command,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows) {
  if (cfg.format == "csv") {
    std::string body;
    for (std::size_t c = 0; c < columns.size(); ++c)
      body += columns[c] + (c + 1 < columns.size() ? "," : "");
    body += "\n";
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        body += format_g17(row[c]) + (c + 1 < row.size() ? "," : "");
      body += "\n";
    }
    return body;
  }
  ordered_json j;
  j["command"] = command;
  j["columns"] = columns;
  auto rows_json = ordered_json::array();
  for (const auto& row : rows) rows_json.push_back(row);
  j["rows"] = std::move(rows_json);
  return j.dump(1) + "\n";
}

ordered_json config_echo(const RunConfig& cfg, const std::string& command) {
  ordered_json j;
  j["command"] = command;
  j["m"] = cfg.m;
  j["direction"] = cfg.direction;
  if (!cfg.times_spec.empty()) j["t"] = cfg.times_spec;
  if (cfg.t1 > 0.0) j["t1"] = cfg.t1;
  j["grid_L"] = cfg.grid_L;
  j["grid_N"] = cfg.grid_N;
  j["format"] = cfg.format;
  return j;
}

int finish(const RunConfig& cfg, const std::string& command, const std::string& body,
           ordered_json meta, bool warned) {
  write_text(cfg.out, body);
  meta["config"] = config_echo(cfg, command);
  write_text(sidecar_path(cfg.out), meta.dump(1) + "\n");
  if (warned && cfg.strict) {
    emit_diagnostic("accuracy_warning", "accuracy warnings escalated by --strict");
    return 4;
  }
  return 0;
}

int cmd_fidelity(const RunConfig& cfg) {
  const bool forward = cfg.direction == "forward";
  const auto times = parse_times(cfg.times_spec);
  const SummationControl ctrl = series_control(cfg);
  std::vector<std::vector<double>> rows;
  std::vector<double> skipped;
  for (double t : times) {
    try {
      const FidelityResult r = forward
                                   ? loschmidt_forward(cfg.m, t, FidelityMethod::automatic, ctrl)
                                   : loschmidt_reverse(cfg.m, t, FidelityMethod::automatic, ctrl);
      rows.push_back({t, r.magnitude, r.overlap.real(), r.overlap.imag()});
    } catch (const GuardZoneError&) {
      skipped.push_back(t);  // excited states have no closed form inside the guard zone
    }
  }
  ordered_json meta;
  meta["skipped_guard_zone_t"] = skipped;
  const std::string body = render_table(cfg, "fidelity", {"t", "absL", "ReL", "ImL"}, rows);
  return finish(cfg, "fidelity", body, std::move(meta), !skipped.empty());
}

int cmd_wavefunction(const RunConfig& cfg) {
  if (cfg.m > 50) throw UsageError("wave-function commands require m <= 50");
  const bool forward = cfg.direction == "forward";
  const auto times = parse_times(cfg.times_spec);
  const SummationControl ctrl = series_control(cfg);
  const GridSpec grid = grid_of(cfg);
  const auto z = grid.coords();
  std::vector<std::vector<double>> rows;
  std::vector<double> skipped;
  bool gibbs = false;
  for (double t : times) {
    try {
      for (double zi : z) {
        const SeriesEval e =
            forward ? psi_m_series(cfg.m, zi, t, ctrl) : phi_m_series(cfg.m, zi, t, ctrl);
        gibbs = gibbs || e.gibbs_zone;
        rows.push_back({t, zi, e.value.real(), e.value.imag(), std::norm(e.value)});
      }
    } catch (const GuardZoneError&) {
      skipped.push_back(t);
    }
  }
  ordered_json meta;
  meta["skipped_guard_zone_t"] = skipped;
  meta["gibbs_zone_sampled"] = gibbs;
  meta["gibbs_zone"] = "|z| < 0.2: forward series converges non-uniformly near the origin";
  const std::string body =
      render_table(cfg, "wavefunction", {"t", "z", "RePsi", "ImPsi", "abs2"}, rows);
  return finish(cfg, "wavefunction", body, std::move(meta), !skipped.empty());
}

std::string with_suffix(const std::string& out, const std::string& suffix) {
  const auto dot = out.rfind('.');
  if (dot == std::string::npos || dot == 0) return out + suffix;
  return out.substr(0, dot) + suffix + out.substr(dot);
}

int cmd_sdm(const RunConfig& cfg) {
  if (cfg.m != 0) throw UsageError("sdm supports the ground state only (m = 0)");
  const bool forward = cfg.direction == "forward";
  const auto times = parse_times(cfg.times_spec);
  const GridSpec grid = grid_of(cfg);
  const auto z = grid.coords();
  ordered_json meta;
  auto files = ordered_json::array();
  bool warned = false;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const RelativeFn rel = forward ? RelativeFn([t](double zz) { return psi0_closed(zz, t); })
                                   : RelativeFn([t](double zz) { return phi0_closed(zz, t); });
    const TwoBodyState xi = lab_frame_state(
        rel, t, grid, forward ? TailModel::forward_quench : TailModel::reverse_quench);
    const ReducedDensityMatrix rho = sdm_build(xi, grid);
    warned = warned || rho.accuracy_warning;
    const SpectralDecomposition dec = natural_orbitals(rho);

    const std::string suffix = times.size() > 1 ? "_" + std::to_string(ti) : "";
    const std::string rho_path = with_suffix(cfg.out, suffix);
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(grid.points) * grid.points);
    for (int i = 0; i < grid.points; ++i)
      for (int j = 0; j < grid.points; ++j)
        rows.push_back({z[i], z[j], rho.values(i, j).real(), rho.values(i, j).imag()});
    write_text(rho_path, render_table(cfg, "sdm", {"z1", "z1p", "Re", "Im"}, rows));

    std::vector<std::vector<double>> drows;
    const auto dens = rho.density();
    for (int i = 0; i < grid.points; ++i) drows.push_back({z[i], dens[i]});
    const std::string dens_path = with_suffix(with_suffix(cfg.out, suffix), ".density");
    write_text(dens_path, render_table(cfg, "density", {"z", "rho"}, drows));

    std::vector<std::vector<double>> prows;
    for (std::size_t i = 0; i < dec.populations.size(); ++i)
      prows.push_back({static_cast<double>(i), dec.populations[i]});
    const std::string pop_path = with_suffix(with_suffix(cfg.out, suffix), ".populations");
    write_text(pop_path, render_table(cfg, "populations", {"i", "lambda_i"}, prows));

    ordered_json f;
    f["t"] = t;
    f["rdm"] = rho_path;
    f["density"] = dens_path;
    f["populations"] = pop_path;
    f["trace_estimate"] = rho.trace_estimate;
    f["tail_estimate"] = rho.tail_estimate;
    f["hermiticity_defect"] = rho.hermiticity_defect();
    f["accuracy_warning"] = rho.accuracy_warning;
    f["density_maxima"] = count_local_maxima(dens);
    files.push_back(std::move(f));
  }
  meta["outputs"] = std::move(files);
  meta["config"] = config_echo(cfg, "sdm");
  write_text(sidecar_path(cfg.out), meta.dump(1) + "\n");
  if (warned && cfg.strict) {
    emit_diagnostic("accuracy_warning", "tail estimate above 1e-2; escalated by --strict");
    return 4;
  }
  return 0;
}

int cmd_momentum(const RunConfig& cfg) {
  if (cfg.m != 0) throw UsageError("momentum supports the ground state only (m = 0)");
  const bool forward = cfg.direction == "forward";
  const auto times = parse_times(cfg.times_spec);
  if (times.size() != 1) throw UsageError("momentum expects a single --t");
  const double t = times[0];
  const GridSpec grid = grid_of(cfg);
  const double k_max = 12.0;
  const int k_points = 1024;

  const RelativeFn rel = forward ? RelativeFn([t](double zz) { return psi0_closed(zz, t); })
                                 : RelativeFn([t](double zz) { return phi0_closed(zz, t); });
  const TwoBodyState xi = lab_frame_state(
      rel, t, grid, forward ? TailModel::forward_quench : TailModel::reverse_quench);
  const ReducedDensityMatrix rho = sdm_build(xi, grid);
  const SpectralDecomposition dec = natural_orbitals(rho);
  const MomentumDistribution nk = momentum_distribution(dec, k_max, k_points);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < nk.k.size(); ++i) rows.push_back({nk.k[i], nk.values[i]});

  ordered_json meta;
  meta["normalization_estimate"] = nk.normalization_estimate;
  meta["tail_estimate"] = rho.tail_estimate;
  for (const auto& [label, target] : {std::pair<const char*, double>{"k2_window", -2.0},
                                      std::pair<const char*, double>{"k4_window", -4.0}}) {
    const auto w = find_slope_plateau(nk, target, 0.3, 10);
    if (w) {
      ordered_json wj;
      wj["k_lo"] = w->k_lo;
      wj["k_hi"] = w->k_hi;
      wj["slope"] = w->slope;
      wj["points"] = w->points;
      meta[label] = std::move(wj);
    } else {
      meta[label] = nullptr;
    }
  }
  const std::string body = render_table(cfg, "momentum", {"k", "n"}, rows);
  return finish(cfg, "momentum", body, std::move(meta), rho.accuracy_warning);
}

int cmd_double_quench(const RunConfig& cfg) {
  if (!(cfg.t1 > 0.0)) throw UsageError("double-quench requires --t1 > 0");
  const auto times = parse_times(cfg.times_spec);
  QuenchScenario sc;
  sc.direction = cfg.direction == "forward" ? QuenchDirection::forward : QuenchDirection::reverse;
  sc.initial_index = cfg.m;
  sc.second_quench_time = cfg.t1;
  sc.validate();
  const SummationControl ctrl = series_control(cfg);
  std::vector<std::vector<double>> rows;
  for (double t : times) {
    if (!(t > cfg.t1)) throw UsageError("all --t values must exceed --t1");
    const DoubleQuenchState st = double_quench_state(sc, t, cfg.m, ctrl);
    const Complex c = st.coefficients[cfg.m];
    rows.push_back({t, std::abs(c), c.real(), c.imag()});
  }
  ordered_json meta;
  meta["t1"] = cfg.t1;
  meta["scenario"] = cfg.direction == "forward" ? "a (0 -> inf -> 0)" : "b (inf -> 0 -> inf)";
  const std::string body =
      render_table(cfg, "double-quench", {"t", "absOverlap", "ReOverlap", "ImOverlap"}, rows);
  return finish(cfg, "double-quench", body, std::move(meta), false);
}

int cmd_reference(const RunConfig& cfg) {
  const GridSpec grid = grid_of(cfg);
  const std::string& name = cfg.reference_name;
  ordered_json meta;
  std::string body;
  if (name.rfind("rho_", 0) == 0) {
    const ReducedDensityMatrix rho = reference_rdm(name, grid);
    const auto z = grid.coords();
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < grid.points; ++i)
      for (int j = 0; j < grid.points; ++j)
        rows.push_back({z[i], z[j], rho.values(i, j).real(), rho.values(i, j).imag()});
    body = render_table(cfg, "reference", {"z1", "z1p", "Re", "Im"}, rows);
    meta["trace_estimate"] = rho.trace_estimate;
  } else if (name.rfind("n_", 0) == 0) {
    const MomentumDistribution nk = reference_momentum(name, grid, 12.0, 1024);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < nk.k.size(); ++i) rows.push_back({nk.k[i], nk.values[i]});
    body = render_table(cfg, "reference", {"k", "n"}, rows);
    meta["normalization_estimate"] = nk.normalization_estimate;
  } else {
    throw UsageError("unknown reference state: " + name);
  }
  meta["name"] = name;
  return finish(cfg, "reference", body, std::move(meta), false);
}

int cmd_verify(const RunConfig& cfg) {
  const auto checks = run_verification();
  auto arr = ordered_json::array();
  bool all_pass = true;
  for (const auto& c : checks) {
    ordered_json j;
    j["check"] = c.name;
    j["region"] = c.region;
    j["N_max"] = c.n_max;
    j["sup_error"] = c.sup_error;
    j["l2_error"] = c.l2_error;
    j["threshold"] = c.threshold;
    j["pass"] = c.pass;
    std::cout << j.dump() << "\n";
    arr.push_back(std::move(j));
    all_pass = all_pass && c.pass;
  }
  if (!cfg.out.empty()) {
    ordered_json report;
    report["checks"] = std::move(arr);
    report["all_pass"] = all_pass;
    write_text(cfg.out, report.dump(1) + "\n");
  }
  if (!all_pass) {
    emit_diagnostic("verification_failure", "one or more oracle checks failed");
    return 4;
  }
  return 0;
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"two trapped bosons after interaction quenches between kappa = 0 and infinity"};
  app.require_subcommand(1);
  RunConfig cfg;

  const auto add_common = [&cfg](CLI::App* sub, bool needs_out) {
    sub->add_option("--m", cfg.m, "initial eigenstate index (psi_2m or phi_2m)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--direction", cfg.direction, "quench direction")
        ->check(CLI::IsMember({"forward", "reverse"}));
    sub->add_option("--t", cfg.times_spec, "time list: start:stop:step or comma list");
    sub->add_option("--t1", cfg.t1, "second quench time (double quench)");
    sub->add_option("--grid-L", cfg.grid_L, "grid half width");
    sub->add_option("--grid-N", cfg.grid_N, "grid points (even)");
    sub->add_option("--tol", cfg.tol, "series stall tolerance");
    sub->add_option("--max-terms", cfg.max_terms, "series term cap");
    auto* out = sub->add_option("--out", cfg.out, "output path");
    if (needs_out) out->required();
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--strict", cfg.strict, "escalate accuracy warnings to exit code 4");
  };

  auto* fid = app.add_subcommand("fidelity", "overlap of the initial state with its evolution");
  add_common(fid, true);
  auto* wav = app.add_subcommand("wavefunction", "relative wave function on a grid");
  add_common(wav, true);
  auto* sdm = app.add_subcommand("sdm", "reduced single-particle density matrix");
  add_common(sdm, true);
  auto* mom = app.add_subcommand("momentum", "momentum distribution");
  add_common(mom, true);
  auto* dbl = app.add_subcommand("double-quench", "overlap after a second quench at t1");
  add_common(dbl, true);
  auto* ref = app.add_subcommand("reference", "analytic reference states");
  ref->add_option("name", cfg.reference_name, "one of rho_b, rho_f, rho_sf, n_b, n_f, n_sf")
      ->required();
  add_common(ref, true);
  auto* ver = app.add_subcommand("verify", "run the oracle verification suite");
  add_common(ver, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    emit_diagnostic("usage", e.what());
    return 2;
  }

  try {
    if (fid->parsed()) return cmd_fidelity(cfg);
    if (wav->parsed()) return cmd_wavefunction(cfg);
    if (sdm->parsed()) return cmd_sdm(cfg);
    if (mom->parsed()) return cmd_momentum(cfg);
    if (dbl->parsed()) return cmd_double_quench(cfg);
    if (ref->parsed()) return cmd_reference(cfg);
    if (ver->parsed()) return cmd_verify(cfg);
    emit_diagnostic("usage", "no subcommand given");
    return 2;
  } catch (const UsageError& e) {
    emit_diagnostic("usage", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    emit_diagnostic("usage", e.what());
    return 2;
  } catch (const ConvergenceError& e) {
    emit_diagnostic("convergence", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_diagnostic("internal", e.what());
    return 1;
  }
}

}  // namespace tgq::cli
