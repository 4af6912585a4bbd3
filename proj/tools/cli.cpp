#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

#include "casdec/decoherence.hpp"
#include "casdec/errors.hpp"
#include "casdec/field_kernels.hpp"
#include "casdec/images.hpp"
#include "casdec/master_eq.hpp"
#include "casdec/units.hpp"

namespace casdec::cli {
namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kCommands = {"potential", "images",    "kernel", "n2",
                                            "deckernel", "adiabatic", "evolve", "figures"};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

std::string default_mode(const std::string& command) {
  if (command == "potential") return "closed";
  if (command == "images") return "positions";
  if (command == "kernel") return "observable";
  if (command == "n2") return "closed";
  if (command == "deckernel") return "center";
  if (command == "adiabatic") return "kernel";
  if (command == "evolve") return "full";
  return "";
}

const std::set<std::string>& allowed_modes(const std::string& command) {
  static const std::map<std::string, std::set<std::string>> modes = {
      {"potential", {"closed", "series", "taylor"}},
      {"images", {"positions", "residual"}},
      {"kernel", {"observable", "total", "empty", "large", "mode-sum", "casimir"}},
      {"n2", {"closed", "numeric", "coherent"}},
      {"deckernel", {"center", "coherent", "large", "casimir", "adiabatic", "adiabatic-numeric"}},
      {"adiabatic", {"kernel", "switched"}},
      {"evolve", {"full", "unitary", "dephasing"}},
      {"figures", {""}},
  };
  return modes.at(command);
}

PhysicalConstants constants(const RunConfig& c) {
  PhysicalConstants pc{c.alpha};
  pc.validate();
  return pc;
}

field::Regularization regularization(const RunConfig& c) {
  field::Regularization reg{c.epsilon};
  reg.validate();
  return reg;
}

field::SeriesControl series(const RunConfig& c) {
  field::SeriesControl ctl;
  ctl.m_max = c.m_max;
  ctl.n_max = c.n_max;
  ctl.validate();
  return ctl;
}

dec::SuperpositionPair centred_pair(const RunConfig& c) {
  if (!(c.dx >= 0.0 && c.dx <= 1.0)) throw ConfigError("--dx must lie in [0, 1] (units of L)");
  return {-0.5 * c.dx, 0.5 * c.dx};
}

std::vector<double> open_interval_grid(int samples) {
  if (samples < 3) throw ConfigError("--samples must be >= 3");
  // mirrored by construction so that x and -x are exact negatives
  std::vector<double> xs(static_cast<std::size_t>(samples));
  const double h = 1.0 / (samples + 1);
  for (int k = 0; k < (samples + 1) / 2; ++k) {
    const double x = -0.5 + (k + 1) * h;
    xs[k] = x;
    xs[samples - 1 - k] = -x;
  }
  if (samples % 2 == 1) xs[samples / 2] = 0.0;
  return xs;
}

Table potential_table(const RunConfig& c) {
  Table t;
  t.columns = {"x", "V"};
  const long n_max = c.n_max > 0 ? c.n_max : 1000000;
  for (double x : open_interval_grid(c.samples)) {
    double v = 0.0;
    if (c.mode == "series") {
      v = images::potential_series(x, n_max);
    } else if (c.mode == "taylor") {
      v = images::potential_taylor(x, 6);
    } else {
      v = images::potential_closed(x);
    }
    t.rows.push_back({x, v});
  }
  t.extra["units"] = "x in L, V in alpha*hbar*c/L";
  if (c.mode == "series") t.extra["series_terms"] = n_max;
  if (c.mode == "taylor") t.extra["taylor_terms"] = 6;
  return t;
}

Table images_table(const RunConfig& c) {
  Table t;
  if (c.mode == "residual") {
    t.columns = {"n_max", "residual"};
    const long top = c.n_max > 0 ? c.n_max : 10000;
    for (long n = 100; n <= top; n *= 2) {
      t.rows.push_back({static_cast<double>(n),
                        images::boundary_residual(c.x, images::Plate::right, 0.5, static_cast<int>(n))});
    }
    t.extra["plate"] = "right";
    t.extra["y_offset"] = 0.5;
    return t;
  }
  t.columns = {"n", "position", "charge"};
  const int n_max = c.n_max > 0 ? static_cast<int>(c.n_max) : 10;
  const auto set = images::image_positions(c.x, n_max);
  for (int n = 1; n <= n_max; ++n) {
    const std::size_t k = 2 * static_cast<std::size_t>(n - 1);
    t.rows.push_back({static_cast<double>(n), set.positive_positions[k], 1.0});
    t.rows.push_back({static_cast<double>(n), set.positive_positions[k + 1], 1.0});
    t.rows.push_back({static_cast<double>(n), set.negative_positions[k], -1.0});
    t.rows.push_back({static_cast<double>(n), set.negative_positions[k + 1], -1.0});
  }
  return t;
}

Table kernel_table(const RunConfig& c) {
  const auto pc = constants(c);
  const auto reg = regularization(c);
  const auto ctl = series(c);
  Table t;
  if (c.mode == "casimir") {
    t.columns = {"N_casimir", "energy_density"};
    t.rows.push_back({field::noise_kernel_casimir(pc), field::casimir_energy_density()});
    return t;
  }
  const auto times = dec::time_grid(c.t_max, c.dt);
  if (c.mode == "mode-sum") {
    t.columns = {"tau", "N", "accuracy_warning"};
    for (double tau : times) {
      const auto w = field::two_point_mode_sum(0.0, 0.0, tau, reg, ctl);
      t.rows.push_back({tau, field::noise_from_two_point(w.value, pc), w.accuracy_warning ? 1.0 : 0.0});
    }
    t.extra["cavity_modes"] = ctl.cavity_modes(reg);
    return t;
  }
  t.columns = {"tau", "N", "near_singular"};
  for (double tau : times) {
    field::KernelSample s;
    if (c.mode == "total") {
      s = field::noise_kernel_total(tau, reg, ctl, pc);
    } else if (c.mode == "empty") {
      s = field::noise_kernel_empty(tau, reg, pc);
    } else if (c.mode == "large") {
      s = field::noise_kernel_large_sep(tau, reg, ctl, pc);
    } else {
      s = field::noise_kernel_observable(tau, reg, ctl, pc);
    }
    t.rows.push_back({tau, s.value, s.near_singular ? 1.0 : 0.0});
  }
  return t;
}

Table n2_table(const RunConfig& c) {
  const auto pc = constants(c);
  const auto ctl = series(c);
  Table t;
  t.columns = {"t", "N2", "divergent"};
  const auto times = dec::time_grid(c.t_max, c.dt);
  if (c.mode == "numeric") {
    const auto reg = regularization(c);
    for (double time : times) t.rows.push_back({time, dec::n2_numeric(time, reg, ctl, pc), 0.0});
    return t;
  }
  for (double time : times) {
    const auto v = c.mode == "coherent" ? dec::n2_coherent(time, ctl, pc) : dec::n2_closed(time, ctl, pc);
    t.rows.push_back({time, v.value, v.divergent ? 1.0 : 0.0});
  }
  return t;
}

Table curve_table(const dec::DecoherenceCurve& curve) {
  Table t;
  t.columns = {"t", "D", "exponent", "divergent"};
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    t.rows.push_back({curve.times[i], curve.values[i], curve.exponent_values[i], curve.divergent[i] ? 1.0 : 0.0});
  }
  t.extra["pair"] = {curve.pair.x, curve.pair.x_prime};
  t.extra["exponent_definition"] = "D = exp(-alpha * dx^2 * exponent)";
  return t;
}

Table deckernel_table(const RunConfig& c) {
  const auto pc = constants(c);
  const auto ctl = series(c);
  const auto pair = centred_pair(c);
  Table t;
  if (c.mode == "adiabatic") {
    const auto s = dec::dec_kernel_adiabatic(pair, pc);
    t.columns = {"dx", "D", "exponent"};
    t.rows.push_back({c.dx, s.D, s.exponent});
    return t;
  }
  if (c.mode == "adiabatic-numeric") {
    const auto s = dec::dec_kernel_adiabatic_numeric(pair, c.T, c.t_max, regularization(c), ctl, pc);
    t.columns = {"T", "t", "D", "exponent"};
    t.rows.push_back({c.T, c.t_max, s.D, s.exponent});
    return t;
  }
  const auto times = dec::time_grid(c.t_max, c.dt);
  if (c.mode == "large") return curve_table(dec::large_curve(times, ctl, pc));
  if (c.mode == "center") return curve_table(dec::center_curve(pair, times, ctl, pc));
  t.columns = {"t", "D", "exponent", c.mode == "casimir" ? "valid" : "divergent"};
  for (double time : times) {
    const auto s = c.mode == "casimir" ? dec::dec_kernel_casimir_limit(pair, time, pc)
                                       : dec::dec_kernel_coherent(pair, time, ctl, pc);
    const double flag = c.mode == "casimir" ? (s.valid ? 1.0 : 0.0) : (s.divergent ? 1.0 : 0.0);
    t.rows.push_back({time, s.D, s.exponent, flag});
  }
  t.extra["pair"] = {pair.x, pair.x_prime};
  return t;
}

dec::SwitchingProfile named_profile(const RunConfig& c, double window) {
  if (c.profile == "sudden") return dec::SwitchingProfile::sudden();
  if (c.profile == "adiabatic") return dec::SwitchingProfile::adiabatic(c.T);
  if (c.profile == "bump") return dec::SwitchingProfile::smooth_bump(c.ramp > 0.0 ? c.ramp : 0.25 * window);
  if (c.profile == "half") return dec::SwitchingProfile::tabulated({0.0, 0.5 * window, window}, {0.0, 1.0, 1.0});
  throw ConfigError("--profile must be sudden, adiabatic, bump or half");
}

Table adiabatic_table(const RunConfig& c) {
  const auto pc = constants(c);
  const auto reg = regularization(c);
  const auto ctl = series(c);
  const auto pair = centred_pair(c);
  Table t;
  if (c.mode == "switched") {
    const double window = c.t_max;
    const auto profile = named_profile(c, window);
    t.columns = {"T", "N2_formula", "N2_numeric"};
    t.rows.push_back({window, dec::switched_n2(profile, window, ctl, pc), dec::switched_n2_numeric(profile, window, reg, pc)});
    t.extra["profile"] = dec::to_string(profile.kind);
    if (profile.kind != dec::ProfileKind::sudden) t.extra["profile_T"] = profile.T;
    return t;
  }
  if (!(c.t_max > c.T)) throw ConfigError("adiabatic kernel needs --t-max > --T");
  const int samples = c.samples_given ? c.samples : 1;
  if (samples < 1) throw ConfigError("--samples must be >= 1");
  const double closed = dec::dec_kernel_adiabatic(pair, pc).D;
  t.columns = {"T", "t", "D", "exponent", "D_closed"};
  for (int k = 0; k < samples; ++k) {
    const double time = c.T + (c.t_max - c.T) * (k + 1) / samples;
    const auto s = dec::dec_kernel_adiabatic_numeric(pair, c.T, time, reg, ctl, pc);
    t.rows.push_back({c.T, time, s.D, s.exponent, closed});
  }
  t.extra["pair"] = {pair.x, pair.x_prime};
  return t;
}

Table evolve_table(const RunConfig& c) {
  const auto pc = constants(c);
  const int n_points = c.samples_given ? c.samples : meq::GridDefaults::n_points;
  const double a = meq::GridDefaults::half_width;
  const double mass = c.mass > 0.0 ? c.mass : meq::GridDefaults::mass(c.omega);
  images::EffectivePotentialParams ep;
  ep.omega = c.omega;
  ep.mass = mass;
  ep.constants = pc;
  meq::OscillatorParams params{images::effective_frequency(ep), mass, c.alpha};
  meq::EvolutionOptions opt;
  if (c.mode == "unitary") {
    opt.terms.friction = false;
    opt.terms.dephasing = false;
    params.alpha = 0.0;
  } else if (c.mode == "dephasing") {
    opt.terms.unitary = false;
    opt.terms.friction = false;
    opt.terms.absorbing = false;
  }
  const double sigma = 1.0 / std::sqrt(2.0 * mass * params.omega_eff);
  meq::DensityMatrixGrid rho0;
  if (c.state == "ground") {
    rho0 = meq::DensityMatrixGrid::gaussian(n_points, a, c.x_given ? c.x : sigma, sigma);
  } else if (c.state == "cat") {
    rho0 = meq::DensityMatrixGrid::two_gaussian(n_points, a, c.x_given ? c.x : 4.0 * sigma, sigma);
  } else {
    throw ConfigError("--state must be ground or cat");
  }
  const double t_final = c.t_max_given ? c.t_max : 2.0 * std::numbers::pi / params.omega_eff;
  const double dt = c.dt_given ? c.dt : 0.95 * meq::max_stable_step(rho0, params, opt.terms);
  const long est_steps = static_cast<long>(std::ceil(t_final / dt));
  opt.record_every = c.record_every > 0 ? c.record_every : std::max(1L, est_steps / 500);
  opt.eigen_every = c.eigen_every;
  const auto result = meq::evolve_bremsstrahlung(rho0, params, t_final, dt, opt);
  Table t;
  t.columns = {"t", "trace", "mean_x", "hermiticity"};
  if (opt.eigen_every > 0) t.columns.push_back("min_eigenvalue");
  for (const auto& r : result.records) {
    std::vector<double> row{r.t, r.trace, r.mean_x, r.hermiticity};
    if (opt.eigen_every > 0) row.push_back(r.has_eigenvalue ? r.min_eigenvalue : result.min_eigenvalue);
    t.rows.push_back(std::move(row));
  }
  if (!c.checkpoint.empty()) meq::write_checkpoint(result.rho, t_final, c.checkpoint);
  t.extra["omega_eff"] = params.omega_eff;
  t.extra["mass"] = mass;
  t.extra["sigma"] = sigma;
  t.extra["n_points"] = n_points;
  t.extra["half_width"] = a;
  t.extra["steps"] = result.steps;
  t.extra["dt_used"] = result.dt;
  t.extra["record_every"] = opt.record_every;
  t.extra["max_trace_drift"] = result.max_trace_drift;
  t.extra["max_hermiticity"] = result.max_hermiticity;
  t.extra["terms"] = {{"unitary", opt.terms.unitary},
                      {"friction", opt.terms.friction},
                      {"dephasing", opt.terms.dephasing},
                      {"absorbing", opt.terms.absorbing}};
  return t;
}

Table figures_table(const RunConfig& c) {
  if (c.which == 2) {
    RunConfig p = c;
    p.mode = "closed";
    return potential_table(p);
  }
  if (c.which == 3) {
    const auto times = dec::time_grid(c.t_max, c.dt);
    return curve_table(dec::center_curve(centred_pair(c), times, series(c), constants(c)));
  }
  throw UsageError("figures needs --which 2 or --which 3");
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

json metadata(const RunConfig& c, const Table& t, const std::vector<std::string>& args) {
  json m;
  m["tool"] = "casdec";
  m["version"] = CASDEC_VERSION;
  m["command"] = c.command;
  m["mode"] = c.mode;
  m["arguments"] = args;
  m["parameters"] = {{"L", c.L_si},        {"alpha", c.alpha},   {"epsilon", c.epsilon}, {"m-max", c.m_max},
                     {"n-max", c.n_max},    {"samples", c.samples}, {"dx", c.dx},        {"t-max", c.t_max},
                     {"dt", c.dt},          {"which", c.which},   {"x", c.x},             {"T", c.T},
                     {"omega", c.omega},    {"mass", c.mass},     {"state", c.state},     {"profile", c.profile},
                     {"ramp", c.ramp},      {"format", c.format}};
  const field::SeriesControl ctl;
  m["tolerances"] = {{"k_quad", ctl.k_quad}, {"abs_tol", ctl.abs_tol}, {"rel_tol", ctl.rel_tol}};
  m["columns"] = t.columns;
  m["rows"] = t.rows.size();
  m["derived"] = t.extra;
  return m;
}

void write_json_table(const Table& t, const json& meta, std::ostream& os) {
  json doc;
  doc["meta"] = meta;
  doc["columns"] = t.columns;
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (double v : r) row.push_back(number(v));
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

void report(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  json e;
  e["error"] = kind;
  e["message"] = message;
  e["exit_code"] = code;
  err << e.dump() << std::endl;
}

bool usage_kind(const std::string& kind) {
  return kind == "usage" || kind == "config" || kind == "input" || kind == "geometry" || kind == "step_size";
}

}  // namespace

void write_csv(const Table& table, std::ostream& os) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      os << (i ? "," : "") << buf;
    }
    os << '\n';
  }
}

Table evaluate(const RunConfig& cfg) {
  const auto& modes = allowed_modes(cfg.command);
  if (!modes.count(cfg.mode)) throw UsageError("mode '" + cfg.mode + "' is not valid for " + cfg.command);
  if (cfg.command == "potential") return potential_table(cfg);
  if (cfg.command == "images") return images_table(cfg);
  if (cfg.command == "kernel") return kernel_table(cfg);
  if (cfg.command == "n2") return n2_table(cfg);
  if (cfg.command == "deckernel") return deckernel_table(cfg);
  if (cfg.command == "adiabatic") return adiabatic_table(cfg);
  if (cfg.command == "evolve") return evolve_table(cfg);
  if (cfg.command == "figures") return figures_table(cfg);
  throw UsageError("unknown command " + cfg.command);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Decoherence of an electron between conducting plates", "casdec"};
  app.set_config("--config", "", "flat key=value configuration file (command-line flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", CASDEC_VERSION);

  app.add_option("--L", c.L_si, "plate separation in metres (recorded; results are in units of L)");
  app.add_option("--alpha", c.alpha, "fine-structure constant");
  app.add_option("--epsilon", c.epsilon, "UV regularisation eps in units of L/c");
  app.add_option("--m-max", c.m_max, "image-sum truncation");
  app.add_option("--n-max", c.n_max, "cavity-mode / image-charge truncation (0: automatic)");
  auto* samples = app.add_option("--samples", c.samples, "number of samples");
  app.add_option("--dx", c.dx, "superposition separation x' - x in units of L");
  auto* tmax = app.add_option("--t-max", c.t_max, "final time in units of L/c");
  auto* dt = app.add_option("--dt", c.dt, "time step in units of L/c");
  app.add_option("--mode", c.mode, "command variant");
  app.add_option("--which", c.which, "figure number (2 or 3)");
  app.add_option("--out", c.out, "output path (CSV or JSON); stdout when omitted");
  app.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* xopt = app.add_option("--x", c.x, "electron position / displacement");
  app.add_option("--T", c.T, "switch-on time scale in units of L/c");
  app.add_option("--omega", c.omega, "bare trap frequency (evolve)");
  app.add_option("--mass", c.mass, "electron mass in reduced units (evolve; 0: grid default)");
  app.add_option("--state", c.state, "initial state for evolve: ground or cat");
  app.add_option("--profile", c.profile, "switching profile: sudden, adiabatic, bump, half");
  app.add_option("--ramp", c.ramp, "ramp length of the bump profile");
  app.add_option("--checkpoint", c.checkpoint, "write the final density matrix here (evolve)");
  app.add_option("--record-every", c.record_every, "record every k steps (evolve)");
  app.add_option("--eigen-every", c.eigen_every, "smallest-eigenvalue monitor interval (evolve)");
  for (const auto& name : kCommands) app.add_subcommand(name, "");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << CASDEC_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    report(err, "usage", e.what(), kUsage);
    return kUsage;
  }
  c.command = app.get_subcommands().front()->get_name();
  c.samples_given = samples->count() > 0;
  c.t_max_given = tmax->count() > 0;
  c.dt_given = dt->count() > 0;
  c.x_given = xopt->count() > 0;
  if (c.mode.empty()) c.mode = default_mode(c.command);

  try {
    const Table table = evaluate(c);
    const json meta = metadata(c, table, args);
    if (c.out.empty()) {
      if (c.format == "json") {
        write_json_table(table, meta, out);
      } else {
        write_csv(table, out);
      }
      return kOk;
    }
    std::ofstream file(c.out);
    if (!file) throw UsageError("cannot open output file " + c.out);
    if (c.format == "json") {
      write_json_table(table, meta, file);
    } else {
      write_csv(table, file);
      std::ofstream side(c.out + ".meta.json");
      if (!side) throw UsageError("cannot open metadata file " + c.out + ".meta.json");
      side << meta.dump(2) << '\n';
    }
    if (!file) throw Error("io", "failed writing " + c.out);
    return kOk;
  } catch (const Error& e) {
    const int code = usage_kind(e.kind()) ? kUsage : kComputation;
    report(err, e.kind(), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report(err, "internal", e.what(), kComputation);
    return kComputation;
  }
}

}  // namespace casdec::cli
