// Command-line surface of the toolkit: every computation is a subcommand
// emitting plot-ready CSV data plus a JSON manifest describing the run.
//
// Exit status: 0 success, 1 computation/regime error, 2 usage error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "nanoptera/asymptotics.hpp"
#include "nanoptera/inner.hpp"
#include "nanoptera/io.hpp"
#include "nanoptera/models.hpp"
#include "nanoptera/singulant.hpp"
#include "nanoptera/solver.hpp"

namespace {

using nanoptera::complex;

namespace fs = std::filesystem;

// Semantic flag errors discovered after parsing (bad combinations, values
// outside a subcommand's domain). Reported as usage errors, exit status 2.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string complex_str(const complex& z) {
  if (z.imag() == 0.0) return nanoptera::format_full(z.real());
  return nanoptera::format_full(z.real()) + (z.imag() < 0 ? " - " : " + ") +
         nanoptera::format_full(std::abs(z.imag())) + "i";
}

fs::path resolve_out(const std::string& out_dir, const std::string& name) {
  fs::path p(name);
  if (p.is_absolute()) return p;
  fs::path dir(out_dir);
  if (!dir.empty() && dir != ".") fs::create_directories(dir);
  return dir / p;
}

nanoptera::recurrence_variant parse_variant(const std::string& s) {
  if (s == "reference") return nanoptera::recurrence_variant::reference;
  if (s == "rederived") return nanoptera::recurrence_variant::rederived;
  throw usage_error("--recurrence must be 'reference' or 'rederived'");
}

complex prefactor_from_flag(const std::vector<double>& flag) {
  return complex(flag.at(0), flag.size() > 1 ? flag.at(1) : 0.0);
}

// The far-field commands need a prefactor value. A --prefactor flag wins;
// otherwise the inner recurrence supplies one: first the requested variant,
// then the other variant if the requested one fails to converge (the
// reference form diverges in parts of the oscillatory regime).
struct prefactor_choice {
  complex value;
  std::string provenance;
};

prefactor_choice resolve_prefactor(const std::vector<double>& flag, bool lattice,
                                   double lambda, const std::string& recurrence,
                                   int j_max) {
  if (!flag.empty()) {
    return {prefactor_from_flag(flag), "supplied via --prefactor"};
  }
  const nanoptera::recurrence_variant first = parse_variant(recurrence);
  const nanoptera::recurrence_variant other =
      first == nanoptera::recurrence_variant::reference
          ? nanoptera::recurrence_variant::rederived
          : nanoptera::recurrence_variant::reference;
  for (const auto variant : {first, other}) {
    nanoptera::prefactor_estimate est;
    if (lattice) {
      est = nanoptera::prefactor_lattice(j_max, variant);
    } else if (lambda > 0.25) {
      est = nanoptera::prefactor_caseA(lambda, j_max, variant).first;
    } else {
      est = nanoptera::prefactor_caseB(lambda, j_max, variant);
    }
    // A plateaued estimate (slow residual drift) is usable; a diverging
    // recurrence is not.
    if (!est.converged && !(est.rel_change_last < 1e-3)) continue;
    std::string how = std::string("computed, recurrence=") + to_string(variant) +
                      ", j_max=" + std::to_string(j_max);
    if (!est.converged) how += ", plateau";
    if (variant != first) {
      std::fprintf(stderr, "note: %s recurrence diverges here; using %s instead\n",
                   to_string(first), to_string(variant));
    }
    return {est.value, how};
  }
  throw std::runtime_error(
      "no recurrence variant settles for this model; pass --prefactor explicitly");
}

// ---------------------------------------------------------------------------
// singulant: roots of the singulant equation for any model
// ---------------------------------------------------------------------------

struct singulant_options {
  std::string model;
  double lambda = 1.0;
  int k = 2;
  double kappa = 0.0;
  int n_max = 1;
  std::string out = "singulant.csv";
};

int cmd_singulant(const singulant_options& opt, const std::string& out_dir) {
  nanoptera::stopwatch clock;
  std::vector<nanoptera::singulant_root> roots;
  if (opt.model == "7kdv") {
    if (opt.lambda == 0.0) throw usage_error("--lambda must be nonzero for 7kdv");
    roots = nanoptera::solve_7kdv_singulant(opt.lambda);
  } else if (opt.model == "hierarchy") {
    if (opt.k < 2 || opt.k % 2 != 0) {
      throw usage_error("--k must be even and >= 2 for the hierarchy model");
    }
    if (opt.lambda == 0.0) throw usage_error("--lambda must be nonzero for hierarchy");
    roots = nanoptera::hierarchy_singulant_roots(opt.k, opt.lambda);
  } else if (opt.model == "lattice-kdv") {
    if (opt.n_max < 1) throw usage_error("--n-max must be >= 1");
    roots = nanoptera::lattice_kdv_singulants(opt.n_max);
  } else if (opt.model == "lattice-5kdv") {
    if (opt.kappa == 0.0) throw usage_error("--kappa must be nonzero for lattice-5kdv");
    const auto both = nanoptera::lattice_5kdv_singulants(opt.kappa, opt.n_max);
    roots = both.family1;
    roots.insert(roots.end(), both.family2.begin(), both.family2.end());
  } else {
    throw usage_error("unknown --model: " + opt.model);
  }

  std::stable_sort(roots.begin(), roots.end(),
                   [](const nanoptera::singulant_root& a, const nanoptera::singulant_root& b) {
                     const double ia = std::abs(a.value.imag());
                     const double ib = std::abs(b.value.imag());
                     if (ia != ib) return ia < ib;
                     return std::abs(a.value.real()) < std::abs(b.value.real());
                   });

  const fs::path path = resolve_out(out_dir, opt.out);
  nanoptera::csv_writer csv(path, "re,im,regime,family,branch");
  for (const auto& r : roots) {
    csv.row({nanoptera::format_full(r.value.real()), nanoptera::format_full(r.value.imag()),
             to_string(r.regime), to_string(r.family), std::to_string(r.branch_index)});
  }
  std::printf("wrote %zu roots to %s\n", roots.size(), path.string().c_str());

  nanoptera::run_manifest manifest;
  manifest.command = "singulant";
  manifest.parameters = {{"model", opt.model},
                         {"lambda", nanoptera::format_full(opt.lambda)},
                         {"k", std::to_string(opt.k)},
                         {"kappa", nanoptera::format_full(opt.kappa)},
                         {"n_max", std::to_string(opt.n_max)}};
  manifest.outputs = {path.string()};
  manifest.wall_time_seconds = clock.seconds();
  manifest.write(nanoptera::manifest_path_for(path));
  return 0;
}

// ---------------------------------------------------------------------------
// lambda-crit: regime threshold per hierarchy order
// ---------------------------------------------------------------------------

struct lambda_crit_options {
  std::vector<int> k{2, 4, 6, 8, 10};
  double tol = 1e-10;
  std::string out = "lambda_crit.csv";
};

int cmd_lambda_crit(const lambda_crit_options& opt, const std::string& out_dir) {
  nanoptera::stopwatch clock;
  for (int k : opt.k) {
    if (k < 2 || k % 2 != 0) {
      throw usage_error("--k entries must be even and >= 2 (got " + std::to_string(k) + ")");
    }
  }
  if (!(opt.tol > 0.0)) throw usage_error("--tol must be positive");

  const fs::path path = resolve_out(out_dir, opt.out);
  nanoptera::csv_writer csv(path, "k,lambda_crit");
  for (int k : opt.k) {
    const auto res = nanoptera::lambda_crit(k, opt.tol);
    csv.row({std::to_string(k), nanoptera::format_full(res.critical_value)});
    std::printf("k = %2d  lambda_crit = %.12f\n", k, res.critical_value);
  }

  nanoptera::run_manifest manifest;
  manifest.command = "lambda-crit";
  std::string klist;
  for (std::size_t i = 0; i < opt.k.size(); ++i) {
    if (i) klist += ',';
    klist += std::to_string(opt.k[i]);
  }
  manifest.parameters = {{"k", klist}, {"tol", nanoptera::format_full(opt.tol)}};
  manifest.outputs = {path.string()};
  manifest.wall_time_seconds = clock.seconds();
  manifest.write(nanoptera::manifest_path_for(path));
  return 0;
}

// ---------------------------------------------------------------------------
// prefactor: late-order prefactor from the inner recurrence, with history
// ---------------------------------------------------------------------------

struct prefactor_options {
  std::string model = "7kdv";
  double lambda = 1.0;
  int j_max = 0;  // 0 = model default (600 polynomial, 200 lattice)
  std::string recurrence = "reference";
  std::string case_choice = "auto";
  std::string out = "prefactor_history.csv";
};

int cmd_prefactor(const prefactor_options& opt, const std::string& out_dir) {
  nanoptera::stopwatch clock;
  const auto variant = parse_variant(opt.recurrence);
  const bool lattice = opt.model == "lattice-kdv";
  if (!lattice && opt.model != "7kdv") {
    throw usage_error("--model must be 7kdv or lattice-kdv for prefactor");
  }
  const int j_max = opt.j_max > 0 ? opt.j_max : (lattice ? 200 : 600);

  nanoptera::prefactor_estimate est;
  std::optional<nanoptera::prefactor_estimate> second;
  if (lattice) {
    est = nanoptera::prefactor_lattice(j_max, variant);
  } else {
    std::string c = opt.case_choice;
    if (c == "auto") c = opt.lambda > 0.25 ? "A" : "B";
    if (c == "A") {
      auto pair = nanoptera::prefactor_caseA(opt.lambda, j_max, variant);
      est = pair.first;
      second = pair.second;
    } else if (c == "B") {
      est = nanoptera::prefactor_caseB(opt.lambda, j_max, variant);
    } else {
      throw usage_error("--case must be auto, A or B");
    }
  }

  const fs::path path = resolve_out(out_dir, opt.out);
  nanoptera::csv_writer csv(path, "j,re,im");
  for (const auto& [j, z] : est.history) {
    csv.row({std::to_string(j), nanoptera::format_full(z.real()),
             nanoptera::format_full(z.imag())});
  }

  std::printf("Lambda = %s\n", complex_str(est.value).c_str());
  if (second) {
    std::printf("Lambda_2 = %s (conjugate branch)\n", complex_str(second->value).c_str());
  }
  std::printf("converged = %s (last relative change %.3e)\n", est.converged ? "yes" : "no",
              est.rel_change_last);
  std::printf("recurrence = %s, j_max = %d\n", to_string(variant), j_max);
  std::printf("history written to %s\n", path.string().c_str());

  nanoptera::run_manifest manifest;
  manifest.command = "prefactor";
  manifest.parameters = {{"model", opt.model},
                         {"lambda", nanoptera::format_full(opt.lambda)},
                         {"j_max", std::to_string(j_max)},
                         {"recurrence", to_string(variant)},
                         {"case", opt.case_choice},
                         {"lambda_value", complex_str(est.value)},
                         {"converged", est.converged ? "yes" : "no"}};
  manifest.outputs = {path.string()};
  manifest.wall_time_seconds = clock.seconds();
  manifest.write(nanoptera::manifest_path_for(path));
  return 0;
}

// ---------------------------------------------------------------------------
// amplitude: far-field amplitude/frequency tables over an eps-or-h grid
// ---------------------------------------------------------------------------

struct amplitude_options {
  std::string model = "lattice-kdv";
  double lambda = 0.125;
  double param_min = 0.1;
  double param_max = 0.8;
  int param_count = 8;
  std::vector<double> c{1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
  std::vector<double> prefactor;
  std::string recurrence = "reference";
  std::string out = "amplitude.csv";
};

int cmd_amplitude(const amplitude_options& opt, const std::string& out_dir) {
  nanoptera::stopwatch clock;
  const bool lattice = opt.model == "lattice-kdv";
  if (!lattice && opt.model != "7kdv") {
    throw usage_error("--model must be 7kdv or lattice-kdv for amplitude");
  }
  if (!(opt.param_min > 0.0) || !(opt.param_max >= opt.param_min) || opt.param_count < 1) {
    throw usage_error("parameter grid requires 0 < param-min <= param-max and count >= 1");
  }
  for (double c : opt.c) {
    if (!(c > 0.0)) throw usage_error("--c entries must be positive");
  }
  if (!lattice) {
    const auto regime = nanoptera::classify_regime(
        nanoptera::model_spec::seventh_order_kdv(opt.lambda));
    if (regime != nanoptera::wave_regime::generalized_solitary_wave) {
      throw std::runtime_error(std::string("regime is ") + to_string(regime) +
                               "; the far-field amplitude is constant only in the "
                               "oscillatory regime — use the envelope subcommand");
    }
  }

  const auto chosen = resolve_prefactor(opt.prefactor, lattice, opt.lambda,
                                        opt.recurrence, lattice ? 200 : 600);
  std::printf("prefactor Lambda = %s (%s)\n", complex_str(chosen.value).c_str(),
              chosen.provenance.c_str());

  const fs::path path = resolve_out(out_dir, opt.out);
  nanoptera::csv_writer csv(path, "param,c,amplitude,frequency");
  for (int i = 0; i < opt.param_count; ++i) {
    const double p = opt.param_count == 1
                         ? opt.param_min
                         : opt.param_min + (opt.param_max - opt.param_min) * i /
                               (opt.param_count - 1);
    for (double c : opt.c) {
      nanoptera::remainder_prediction pred;
      if (lattice) {
        pred = nanoptera::lattice_remainder(p, c, chosen.value);
      } else {
        pred = nanoptera::remainder_caseB(
            nanoptera::model_spec::seventh_order_kdv(opt.lambda, c), p, chosen.value);
      }
      csv.numeric_row({p, c, pred.amplitude, pred.frequency});
    }
  }
  std::printf("wrote %d x %zu grid to %s\n", opt.param_count, opt.c.size(),
              path.string().c_str());

  nanoptera::run_manifest manifest;
  manifest.command = "amplitude";
  manifest.parameters = {{"model", opt.model},
                         {"lambda", nanoptera::format_full(opt.lambda)},
                         {"param_min", nanoptera::format_full(opt.param_min)},
                         {"param_max", nanoptera::format_full(opt.param_max)},
                         {"param_count", std::to_string(opt.param_count)},
                         {"prefactor", complex_str(chosen.value)},
                         {"prefactor_provenance", chosen.provenance}};
  manifest.outputs = {path.string()};
  manifest.wall_time_seconds = clock.seconds();
  manifest.write(nanoptera::manifest_path_for(path));
  return 0;
}

// ---------------------------------------------------------------------------
// envelope: log-envelope profile of the exponentially small remainder
// ---------------------------------------------------------------------------

struct envelope_options {
  double lambda = 1.0;
  double eps = 0.1;
  double c = 1.0;
  double x_max = 10.0;
  int samples = 201;
  std::vector<double> prefactor;
  std::string recurrence = "reference";
  std::string out = "envelope.csv";
};

int cmd_envelope(const envelope_options& opt, const std::string& out_dir) {
  nanoptera::stopwatch clock;
  if (!(opt.eps > 0.0)) throw usage_error("--eps must be positive");
  if (!(opt.c > 0.0)) throw usage_error("--c must be positive");
  if (!(opt.lambda > 0.0)) throw usage_error("--lambda must be positive");
  if (opt.samples < 2) throw usage_error("--samples must be >= 2");

  const auto model = nanoptera::model_spec::seventh_order_kdv(opt.lambda, opt.c);
  const auto chosen =
      resolve_prefactor(opt.prefactor, false, opt.lambda, opt.recurrence, 600);

  nanoptera::remainder_prediction pred;
  if (opt.lambda > 0.25) {
    pred = nanoptera::remainder_caseA(model, opt.eps, chosen.value).second;
  } else {
    pred = nanoptera::remainder_caseB(model, opt.eps, chosen.value);
  }

  // Exclude the inner region around the core, where the outer envelope
  // description breaks down.
  const double root_mag = std::abs(pred.chi_x);
  const double rho_core = root_mag * std::numbers::pi / std::sqrt(opt.c);
  const double delta =
      nanoptera::inner_exclusion_halfwidth(opt.eps, rho_core, root_mag);
  if (delta >= opt.x_max) {
    throw std::runtime_error("inner exclusion half-width " +
                             nanoptera::format_full(delta) +
                             " reaches --x-max; widen the window");
  }

  const fs::path path = resolve_out(out_dir, opt.out);
  nanoptera::csv_writer csv(path, "x,log_envelope");
  const double log_amp = std::log(pred.amplitude);
  // Two symmetric branches about the core at x = ct (taken at t = 0),
  // emitted in ascending x with the inner region left out.
  std::vector<double> offsets(opt.samples);
  for (int i = 0; i < opt.samples; ++i) {
    offsets[i] = delta + (opt.x_max - delta) * i / (opt.samples - 1);
  }
  for (auto it = offsets.rbegin(); it != offsets.rend(); ++it) {
    csv.numeric_row({-*it, log_amp - pred.envelope_rate * *it});
  }
  for (double r : offsets) {
    csv.numeric_row({r, log_amp - pred.envelope_rate * r});
  }
  std::printf("prefactor Lambda = %s (%s)\n", complex_str(chosen.value).c_str(),
              chosen.provenance.c_str());
  std::printf("amplitude at the exclusion edge = %s, envelope rate = %s\n",
              nanoptera::format_full(pred.amplitude * std::exp(-pred.envelope_rate * delta))
                  .c_str(),
              nanoptera::format_full(pred.envelope_rate).c_str());
  std::printf("wrote envelope to %s (inner exclusion |x| < %s)\n", path.string().c_str(),
              nanoptera::format_full(delta).c_str());

  nanoptera::run_manifest manifest;
  manifest.command = "envelope";
  manifest.parameters = {{"lambda", nanoptera::format_full(opt.lambda)},
                         {"eps", nanoptera::format_full(opt.eps)},
                         {"c", nanoptera::format_full(opt.c)},
                         {"x_max", nanoptera::format_full(opt.x_max)},
                         {"samples", std::to_string(opt.samples)},
                         {"prefactor", complex_str(chosen.value)},
                         {"prefactor_provenance", chosen.provenance},
                         {"inner_exclusion", nanoptera::format_full(delta)}};
  manifest.outputs = {path.string()};
  manifest.wall_time_seconds = clock.seconds();
  manifest.write(nanoptera::manifest_path_for(path));
  return 0;
}

// ---------------------------------------------------------------------------
// simulate: one initial-value run with snapshot emission
// ---------------------------------------------------------------------------

struct simulate_options {
  double lambda = 0.125;
  double c = 1.0;
  double eps = 0.5;
  double dt = 5e-4;
  double t_end = 3.0;
  double L = 50.0;
  int n_points = 4096;
  bool dealias = true;
  std::string splitting = "strang";
  int snapshots = 0;
  std::string out_prefix = "sim";
};

void write_field_csv(const nanoptera::spectral_field& f, const fs::path& path) {
  nanoptera::csv_writer csv(path, "x,u");
  for (int i = 0; i < f.n_points; ++i) csv.numeric_row({f.x(i), f.samples[i]});
}

int cmd_simulate(const simulate_options& opt, const std::string& out_dir) {
  nanoptera::stopwatch clock;
  if (opt.n_points < 256 || (opt.n_points & (opt.n_points - 1)) != 0) {
    throw usage_error("--n must be a power of two >= 256");
  }
  if (!(opt.dt > 0.0)) throw usage_error("--dt must be positive");
  if (opt.t_end < 0.0) throw usage_error("--t-end must be nonnegative");
  if (!(opt.L > 0.0)) throw usage_error("--L must be positive");
  if (opt.eps < 0.0) throw usage_error("--eps must be nonnegative (0 = classical KdV)");
  if (opt.snapshots < 0) throw usage_error("--snapshots must be nonnegative");
  if (opt.splitting != "strang" && opt.splitting != "lie") {
    throw usage_error("--splitting must be strang or lie");
  }

  nanoptera::simulation_config cfg;
  cfg.model = nanoptera::model_spec::seventh_order_kdv(opt.lambda, opt.c);
  cfg.eps = opt.eps;
  cfg.dt = opt.dt;
  cfg.t_end = opt.t_end;
  cfg.L = opt.L;
  cfg.n_points = opt.n_points;
  cfg.dealias = opt.dealias;
  cfg.splitting = opt.splitting == "lie" ? nanoptera::splitting_scheme::lie
                                         : nanoptera::splitting_scheme::strang;
  cfg.snapshot_interval = opt.snapshots > 0 ? opt.t_end / opt.snapshots : 0.0;

  const auto res = nanoptera::run(cfg);

  nanoptera::run_manifest manifest;
  manifest.command = "simulate";
  for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_snap_%03zu.csv", opt.out_prefix.c_str(), k);
    const fs::path sp = resolve_out(out_dir, name);
    write_field_csv(res.snapshots[k], sp);
    manifest.outputs.push_back(sp.string());
  }
  const fs::path final_path = resolve_out(out_dir, opt.out_prefix + "_final.csv");
  write_field_csv(res.final, final_path);
  manifest.outputs.push_back(final_path.string());

  const nanoptera::spectral_field init = [&] {
    nanoptera::spectral_field f;
    f.L = cfg.L;
    f.n_points = cfg.n_points;
    f.samples.resize(cfg.n_points);
    for (int i = 0; i < cfg.n_points; ++i) {
      f.samples[i] = nanoptera::soliton(f.x(i), 0.0, opt.c);
    }
    return f;
  }();
  std::printf("ran %d steps (dt = %s) to t = %s\n", res.n_steps,
              nanoptera::format_full(res.dt_effective).c_str(),
              nanoptera::format_full(res.final.time).c_str());
  std::printf("mass drift = %.3e, %zu snapshot file(s), final field in %s\n",
              nanoptera::field_mass(res.final) - nanoptera::field_mass(init),
              res.snapshots.size(), final_path.string().c_str());

  manifest.parameters = {{"lambda", nanoptera::format_full(opt.lambda)},
                         {"c", nanoptera::format_full(opt.c)},
                         {"eps", nanoptera::format_full(opt.eps)},
                         {"dt", nanoptera::format_full(opt.dt)},
                         {"t_end", nanoptera::format_full(opt.t_end)},
                         {"L", nanoptera::format_full(opt.L)},
                         {"n_points", std::to_string(opt.n_points)},
                         {"dealias", opt.dealias ? "true" : "false"},
                         {"splitting", opt.splitting},
                         {"snapshots", std::to_string(opt.snapshots)}};
  manifest.wall_time_seconds = clock.seconds();
  manifest.write(resolve_out(out_dir, opt.out_prefix + ".manifest.json"));
  return 0;
}

// ---------------------------------------------------------------------------
// compare: numeric tail amplitude versus the closed-form prediction
// ---------------------------------------------------------------------------

struct compare_options {
  double lambda = 0.125;
  double c = 1.0;
  std::vector<double> eps{0.8, 0.7, 0.6, 0.5};
  double dt = 5e-4;
  std::vector<double> prefactor;
  std::string recurrence = "reference";
  std::string out = "comparison.csv";
};

int cmd_compare(const compare_options& opt, const std::string& out_dir) {
  nanoptera::stopwatch clock;
  if (!(opt.dt > 0.0)) throw usage_error("--dt must be positive");
  const auto chosen =
      resolve_prefactor(opt.prefactor, false, opt.lambda, opt.recurrence, 600);
  std::printf("prefactor Lambda = %s (%s)\n", complex_str(chosen.value).c_str(),
              chosen.provenance.c_str());

  nanoptera::simulation_config base;
  base.dt = opt.dt;
  const auto rows =
      nanoptera::compare_sweep(opt.lambda, opt.c, opt.eps, base, chosen.value);

  const fs::path path = resolve_out(out_dir, opt.out);
  nanoptera::csv_writer csv(path, "eps,numeric_amplitude,asymptotic_amplitude,ratio,rel_error");
  for (const auto& r : rows) {
    csv.numeric_row({r.eps, r.numeric_amplitude, r.asymptotic_amplitude, r.ratio,
                     r.rel_error});
    std::printf("eps = %.3f  numeric = %.6e  predicted = %.6e  ratio = %.4f  "
                "rel_error = %.4f  steady = %s\n",
                r.eps, r.numeric_amplitude, r.asymptotic_amplitude, r.ratio, r.rel_error,
                r.measurement.steady ? "yes" : "no");
  }
  std::printf("wrote %zu rows to %s\n", rows.size(), path.string().c_str());

  nanoptera::run_manifest manifest;
  manifest.command = "compare";
  std::string epslist;
  for (std::size_t i = 0; i < opt.eps.size(); ++i) {
    if (i) epslist += ',';
    epslist += nanoptera::format_full(opt.eps[i]);
  }
  manifest.parameters = {{"lambda", nanoptera::format_full(opt.lambda)},
                         {"c", nanoptera::format_full(opt.c)},
                         {"eps", epslist},
                         {"dt", nanoptera::format_full(opt.dt)},
                         {"prefactor", complex_str(chosen.value)},
                         {"prefactor_provenance", chosen.provenance}};
  manifest.outputs = {path.string()};
  manifest.wall_time_seconds = clock.seconds();
  manifest.write(nanoptera::manifest_path_for(path));
  return 0;
}

// ---------------------------------------------------------------------------
// stokes: sampled Stokes-multiplier transition profile
// ---------------------------------------------------------------------------

struct stokes_options {
  double lambda = 0.125;
  double eps = 0.1;
  double c = 1.0;
  double theta_span = 1.0;
  int samples = 513;
  std::vector<double> prefactor;
  std::string recurrence = "reference";
  std::string out = "stokes.csv";
};

int cmd_stokes(const stokes_options& opt, const std::string& out_dir) {
  nanoptera::stopwatch clock;
  if (!(opt.eps > 0.0)) throw usage_error("--eps must be positive");
  if (!(opt.c > 0.0)) throw usage_error("--c must be positive");
  if (!(opt.theta_span > 0.0)) throw usage_error("--theta-span must be positive");
  if (opt.samples < 3) throw usage_error("--samples must be >= 3");

  const auto model = nanoptera::model_spec::seventh_order_kdv(opt.lambda, opt.c);
  const auto chosen =
      resolve_prefactor(opt.prefactor, false, opt.lambda, opt.recurrence, 600);
  nanoptera::remainder_prediction pred;
  if (opt.lambda > 0.25) {
    pred = nanoptera::remainder_caseA(model, opt.eps, chosen.value).second;
  } else {
    pred = nanoptera::remainder_caseB(model, opt.eps, chosen.value);
  }
  const double rho = std::abs(pred.chi_x) * std::numbers::pi / std::sqrt(opt.c);
  const complex s0 = nanoptera::symmetric_stokes_s0(pred.chi_x, pred.prefactor, pred.mu,
                                                    opt.eps);
  const auto profile = nanoptera::stokes_profile(
      rho, opt.eps, pred.chi_x, pred.prefactor, pred.mu, s0,
      {-opt.theta_span, opt.theta_span}, opt.samples);

  const fs::path path = resolve_out(out_dir, opt.out);
  nanoptera::csv_writer csv(path, "theta,re,im");
  for (std::size_t i = 0; i < profile.theta_samples.size(); ++i) {
    csv.numeric_row({profile.theta_samples[i], profile.multiplier_values[i].real(),
                     profile.multiplier_values[i].imag()});
  }
  std::printf("jump = %s, wrote %zu samples to %s\n", complex_str(profile.jump).c_str(),
              profile.theta_samples.size(), path.string().c_str());

  nanoptera::run_manifest manifest;
  manifest.command = "stokes";
  manifest.parameters = {{"lambda", nanoptera::format_full(opt.lambda)},
                         {"eps", nanoptera::format_full(opt.eps)},
                         {"c", nanoptera::format_full(opt.c)},
                         {"theta_span", nanoptera::format_full(opt.theta_span)},
                         {"samples", std::to_string(opt.samples)},
                         {"prefactor", complex_str(chosen.value)},
                         {"prefactor_provenance", chosen.provenance}};
  manifest.outputs = {path.string()};
  manifest.wall_time_seconds = clock.seconds();
  manifest.write(nanoptera::manifest_path_for(path));
  return 0;
}

// ---------------------------------------------------------------------------
// truncation: optimal truncation depth and late-order term magnitudes
// ---------------------------------------------------------------------------

struct truncation_options {
  double h = 0.5;
  double c = 1.0;
  int j_max = 40;
  std::string recurrence = "reference";
  std::string out = "truncation.csv";
};

int cmd_truncation(const truncation_options& opt, const std::string& out_dir) {
  nanoptera::stopwatch clock;
  if (!(opt.h > 0.0)) throw usage_error("--spacing must be positive");
  if (!(opt.c > 0.0)) throw usage_error("--c must be positive");
  if (opt.j_max < 2) throw usage_error("--jmax must be >= 2");

  const auto series =
      nanoptera::lattice_inner_terms(opt.j_max, parse_variant(opt.recurrence));
  const auto [upper, lower] = nanoptera::singularity_locations(opt.c, 0.0);
  const complex chi = nanoptera::singulant_value(series.chi_x, upper, 1.0);
  const double chi_mag = std::abs(chi);
  const int n_opt = nanoptera::optimal_truncation(chi_mag, opt.h);

  const fs::path path = resolve_out(out_dir, opt.out);
  nanoptera::csv_writer csv(path, "j,log_term_magnitude");
  int argmin = 1;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= opt.j_max; ++j) {
    const double mag = std::abs(series.scaled_terms[j]);
    if (mag == 0.0) continue;
    const double v = nanoptera::late_order_term_log_magnitude(j, opt.h, chi_mag, mag);
    csv.numeric_row({static_cast<double>(j), v});
    if (v < best) {
      best = v;
      argmin = j;
    }
  }
  std::printf("optimal truncation N = %d (least term at j = %d), |chi| = %s\n", n_opt,
              argmin, nanoptera::format_full(chi_mag).c_str());
  std::printf("wrote term magnitudes to %s\n", path.string().c_str());

  nanoptera::run_manifest manifest;
  manifest.command = "truncation";
  manifest.parameters = {{"h", nanoptera::format_full(opt.h)},
                         {"c", nanoptera::format_full(opt.c)},
                         {"j_max", std::to_string(opt.j_max)},
                         {"recurrence", opt.recurrence},
                         {"optimal_N", std::to_string(n_opt)},
                         {"least_term_j", std::to_string(argmin)}};
  manifest.outputs = {path.string()};
  manifest.wall_time_seconds = clock.seconds();
  manifest.write(nanoptera::manifest_path_for(path));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponentially small far-field oscillations of generalized solitary "
               "waves: singulant roots, late-order prefactors, remainder predictions "
               "and split-step simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nanoptera::tool_version));
  app.set_config("--config", "", "Flat key = value configuration file; flags override");

  std::string out_dir = ".";
  app.add_option("--out-dir", out_dir, "Directory for output files")
      ->envname("NANOPTERA_OUT")
      ->capture_default_str();

  singulant_options so;
  auto* sing = app.add_subcommand("singulant", "Roots of the singulant equation");
  sing->add_option("--model", so.model, "7kdv, hierarchy, lattice-kdv or lattice-5kdv")
      ->required()
      ->check(CLI::IsMember({"7kdv", "hierarchy", "lattice-kdv", "lattice-5kdv"}));
  sing->add_option("--lambda", so.lambda, "Seventh-order coefficient")->capture_default_str();
  sing->add_option("--k", so.k, "Hierarchy order (even)")->capture_default_str();
  sing->add_option("--kappa", so.kappa, "Fifth-order lattice coefficient")
      ->capture_default_str();
  sing->add_option("--n-max", so.n_max, "Lattice branch range: N = +-1..+-n_max")
      ->capture_default_str();
  sing->add_option("--out", so.out, "CSV output path")->capture_default_str();

  lambda_crit_options lo;
  auto* lc = app.add_subcommand("lambda-crit", "Regime threshold per hierarchy order");
  lc->add_option("--k", lo.k, "Even hierarchy orders")->delimiter(',')->capture_default_str();
  lc->add_option("--tol", lo.tol, "Bisection tolerance")->capture_default_str();
  lc->add_option("--out", lo.out, "CSV output path")->capture_default_str();

  prefactor_options po;
  auto* pf = app.add_subcommand("prefactor",
                                "Late-order prefactor from the inner recurrence");
  pf->add_option("--model", po.model, "7kdv or lattice-kdv")->capture_default_str();
  pf->add_option("--lambda", po.lambda, "Seventh-order coefficient")->capture_default_str();
  pf->add_option("--jmax", po.j_max, "Recurrence depth (default 600, lattice 200)");
  pf->add_option("--recurrence", po.recurrence, "reference or rederived")
      ->check(CLI::IsMember({"reference", "rederived"}))
      ->capture_default_str();
  pf->add_option("--case", po.case_choice, "auto, A (lambda > 1/4) or B (lambda <= 1/4)")
      ->check(CLI::IsMember({"auto", "A", "B"}))
      ->capture_default_str();
  pf->add_option("--out", po.out, "History CSV path")->capture_default_str();

  amplitude_options ao;
  auto* am = app.add_subcommand("amplitude",
                                "Far-field amplitude and frequency over a grid");
  am->add_option("--model", ao.model, "7kdv or lattice-kdv")->capture_default_str();
  am->add_option("--lambda", ao.lambda, "Seventh-order coefficient")->capture_default_str();
  am->add_option("--param-min", ao.param_min, "Smallest eps (7kdv) or h (lattice)")
      ->capture_default_str();
  am->add_option("--param-max", ao.param_max, "Largest eps or h")->capture_default_str();
  am->add_option("--param-count", ao.param_count, "Grid size")->capture_default_str();
  am->add_option("--c", ao.c, "Wave speeds")->delimiter(',')->capture_default_str();
  am->add_option("--prefactor", ao.prefactor, "Prefactor re[,im]; computed if omitted")
      ->expected(1, 2)
      ->delimiter(',');
  am->add_option("--recurrence", ao.recurrence, "Recurrence variant when computing")
      ->check(CLI::IsMember({"reference", "rederived"}))
      ->capture_default_str();
  am->add_option("--out", ao.out, "CSV output path")->capture_default_str();

  envelope_options eo;
  auto* en = app.add_subcommand("envelope", "Log-envelope of the remainder profile");
  en->add_option("--lambda", eo.lambda, "Seventh-order coefficient")->capture_default_str();
  en->add_option("--eps", eo.eps, "Perturbation scale")->capture_default_str();
  en->add_option("--c", eo.c, "Wave speed")->capture_default_str();
  en->add_option("--x-max", eo.x_max, "Half-width of the emitted window")
      ->capture_default_str();
  en->add_option("--samples", eo.samples, "Samples per side")->capture_default_str();
  en->add_option("--prefactor", eo.prefactor, "Prefactor re[,im]; computed if omitted")
      ->expected(1, 2)
      ->delimiter(',');
  en->add_option("--recurrence", eo.recurrence, "Recurrence variant when computing")
      ->check(CLI::IsMember({"reference", "rederived"}))
      ->capture_default_str();
  en->add_option("--out", eo.out, "CSV output path")->capture_default_str();

  stokes_options sto;
  auto* st = app.add_subcommand("stokes", "Stokes-multiplier transition profile");
  st->add_option("--lambda", sto.lambda, "Seventh-order coefficient")->capture_default_str();
  st->add_option("--eps", sto.eps, "Perturbation scale")->capture_default_str();
  st->add_option("--c", sto.c, "Wave speed")->capture_default_str();
  st->add_option("--theta-span", sto.theta_span, "Half-range of the angle variable")
      ->capture_default_str();
  st->add_option("--samples", sto.samples, "Number of profile samples")
      ->capture_default_str();
  st->add_option("--prefactor", sto.prefactor, "Prefactor re[,im]; computed if omitted")
      ->expected(1, 2)
      ->delimiter(',');
  st->add_option("--recurrence", sto.recurrence, "Recurrence variant when computing")
      ->check(CLI::IsMember({"reference", "rederived"}))
      ->capture_default_str();
  st->add_option("--out", sto.out, "CSV output path")->capture_default_str();

  truncation_options tro;
  auto* tr = app.add_subcommand("truncation",
                                "Late-order term magnitudes and optimal truncation");
  tr->add_option("--spacing", tro.h, "Lattice spacing h")->capture_default_str();
  tr->add_option("--c", tro.c, "Wave speed")->capture_default_str();
  tr->add_option("--jmax", tro.j_max, "Deepest term")->capture_default_str();
  tr->add_option("--recurrence", tro.recurrence, "reference or rederived")
      ->check(CLI::IsMember({"reference", "rederived"}))
      ->capture_default_str();
  tr->add_option("--out", tro.out, "CSV output path")->capture_default_str();

  simulate_options sio;
  auto* si = app.add_subcommand("simulate", "Split-step initial-value run");
  si->add_option("--lambda", sio.lambda, "Seventh-order coefficient")->capture_default_str();
  si->add_option("--c", sio.c, "Wave speed")->capture_default_str();
  si->add_option("--eps", sio.eps, "Perturbation scale (0 = classical KdV)")
      ->capture_default_str();
  si->add_option("--dt", sio.dt, "Time step")->capture_default_str();
  si->add_option("--t-end", sio.t_end, "Final time")->capture_default_str();
  si->add_option("--L", sio.L, "Domain half-length")->capture_default_str();
  si->add_option("--n", sio.n_points, "Grid points (power of two >= 256)")
      ->capture_default_str();
  si->add_flag("--dealias,!--no-dealias", sio.dealias, "2/3-rule dealiasing")
      ->capture_default_str();
  si->add_option("--splitting", sio.splitting, "strang or lie")
      ->check(CLI::IsMember({"strang", "lie"}))
      ->capture_default_str();
  si->add_option("--snapshots", sio.snapshots, "Snapshot count (0 = none)")
      ->capture_default_str();
  si->add_option("--out-prefix", sio.out_prefix, "Prefix for emitted files")
      ->capture_default_str();

  compare_options co;
  auto* cp = app.add_subcommand("compare",
                                "Numeric versus predicted far-field amplitude sweep");
  cp->add_option("--lambda", co.lambda, "Seventh-order coefficient (0 < lambda <= 1/4)")
      ->capture_default_str();
  cp->add_option("--c", co.c, "Wave speed")->capture_default_str();
  cp->add_option("--eps", co.eps, "Perturbation scales")->delimiter(',')
      ->capture_default_str();
  cp->add_option("--dt", co.dt, "Time step")->capture_default_str();
  cp->add_option("--prefactor", co.prefactor, "Prefactor re[,im]; computed if omitted")
      ->expected(1, 2)
      ->delimiter(',');
  cp->add_option("--recurrence", co.recurrence, "Recurrence variant when computing")
      ->check(CLI::IsMember({"reference", "rederived"}))
      ->capture_default_str();
  cp->add_option("--out", co.out, "CSV output path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sing)) return cmd_singulant(so, out_dir);
    if (app.got_subcommand(lc)) return cmd_lambda_crit(lo, out_dir);
    if (app.got_subcommand(pf)) return cmd_prefactor(po, out_dir);
    if (app.got_subcommand(am)) return cmd_amplitude(ao, out_dir);
    if (app.got_subcommand(en)) return cmd_envelope(eo, out_dir);
    if (app.got_subcommand(st)) return cmd_stokes(sto, out_dir);
    if (app.got_subcommand(tr)) return cmd_truncation(tro, out_dir);
    if (app.got_subcommand(si)) return cmd_simulate(sio, out_dir);
    if (app.got_subcommand(cp)) return cmd_compare(co, out_dir);
  } catch (const usage_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
