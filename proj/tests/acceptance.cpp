// Acceptance gate: one numbered criterion per run (no argument = all).
// Each criterion prints exactly one [PASS]/[FAIL] line with computed-vs-
// expected figures; indented lines above it are diagnostics.  The process
// exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "exact_rational_oracle.hpp"
#include "nanoptera/asymptotics.hpp"
#include "nanoptera/inner.hpp"
#include "nanoptera/models.hpp"
#include "nanoptera/singulant.hpp"
#include "nanoptera/solver.hpp"

namespace {

using nanoptera::complex;
using nanoptera::recurrence_variant;
using std::numbers::pi;

struct criterion_result {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::string cstr(const complex& z) {
  return fmt("%.6g %+.6gi", z.real(), z.imag());
}

complex first_quadrant_root(double lambda) {
  for (const auto& r : nanoptera::solve_7kdv_singulant(lambda)) {
    if (r.value.real() > 0.0 && r.value.imag() > 0.0) return r.value;
  }
  throw std::logic_error("no first-quadrant root");
}

complex dominant_root(double lambda) {
  return nanoptera::solve_7kdv_singulant(lambda)[0].value;
}

// ---------------------------------------------------------------------------
// 1. Regime threshold at k = 2.
// ---------------------------------------------------------------------------
criterion_result c01() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = nanoptera::lambda_crit(2, 1e-10);
  const double wall = seconds_since(t0);
  const double err = std::abs(res.critical_value - 0.25);
  const bool pass = err <= 1e-8 && wall < 1.0;
  return {pass, fmt("lambda_crit(k=2) = %.12f (|err| = %.2e vs 1e-8 budget), "
                    "%d iterations in %.3f s (< 1 s required)",
                    res.critical_value, err, res.iterations, wall)};
}

// ---------------------------------------------------------------------------
// Shared helper for criteria 2-4: evaluate one prefactor target under both
// recurrence variants and report every estimate before judging.
// ---------------------------------------------------------------------------
struct variant_report {
  bool computed = false;
  complex value{};
  complex second{};  // conjugate-branch partner where applicable
  bool has_second = false;
  std::string note;
};

variant_report run_variant(const std::function<void(variant_report&)>& compute) {
  variant_report r;
  try {
    compute(r);
    r.computed = true;
  } catch (const std::exception& e) {
    r.note = e.what();
  }
  return r;
}

// ---------------------------------------------------------------------------
// 2. Decaying-regime prefactor at lambda = 1, depth 600.
// ---------------------------------------------------------------------------
criterion_result c02() {
  const auto t0 = std::chrono::steady_clock::now();
  const complex expected(0.711, 0.694);
  bool pass = false;
  for (auto variant : {recurrence_variant::reference, recurrence_variant::rederived}) {
    const auto rep = run_variant([&](variant_report& r) {
      const auto pair = nanoptera::prefactor_caseA(1.0, 600, variant);
      r.value = pair.first.value;
      r.second = pair.second.value;
      r.has_second = true;
      r.note = pair.first.converged ? "converged" : "not converged";
    });
    if (!rep.computed) {
      std::printf("  variant %-9s: failed (%s)\n", to_string(variant), rep.note.c_str());
      continue;
    }
    std::printf("  variant %-9s: Lambda_1 = %s, Lambda_2 = %s (%s)\n", to_string(variant),
                cstr(rep.value).c_str(), cstr(rep.second).c_str(), rep.note.c_str());
    const bool re_ok = std::abs(rep.value.real() - expected.real()) <=
                       0.005 * std::abs(expected.real());
    const bool im_ok = std::abs(rep.value.imag() - expected.imag()) <=
                       0.005 * std::abs(expected.imag());
    const bool conj_ok =
        std::abs(rep.second - std::conj(rep.value)) <= 1e-6 * std::max(1.0, std::abs(rep.value));
    if (re_ok && im_ok && conj_ok) pass = true;
  }
  const double wall = seconds_since(t0);
  pass = pass && wall < 30.0;
  return {pass, fmt("prefactor(lambda=1, j=600) target 0.711 + 0.694i within 0.5%% "
                    "componentwise with conjugate partner; no variant matches "
                    "(values printed above), wall %.1f s (< 30 s)",
                    wall)};
}

// ---------------------------------------------------------------------------
// 3. Oscillatory-regime prefactor at lambda = 1/8, depth 600.
// ---------------------------------------------------------------------------
criterion_result c03() {
  const double expected = -11.70;
  bool pass = false;
  for (auto variant : {recurrence_variant::reference, recurrence_variant::rederived}) {
    const auto rep = run_variant([&](variant_report& r) {
      const auto est = nanoptera::prefactor_caseB(0.125, 600, variant);
      r.value = est.value;
      r.note = est.converged ? "converged"
                             : fmt("not converged, rel change %.2e", est.rel_change_last);
    });
    if (!rep.computed) {
      std::printf("  variant %-9s: failed (%s)\n", to_string(variant), rep.note.c_str());
      continue;
    }
    std::printf("  variant %-9s: Lambda = %s (%s)\n", to_string(variant),
                cstr(rep.value).c_str(), rep.note.c_str());
    const bool val_ok = std::abs(rep.value.real() - expected) <= 0.005 * std::abs(expected);
    const bool imag_ok = std::abs(rep.value.imag()) < 1e-9;
    if (val_ok && imag_ok) pass = true;
  }
  return {pass, fmt("prefactor(lambda=1/8, j=600) target %.2f within 0.5%% with "
                    "|Im| < 1e-9; no variant matches (values printed above)",
                    expected)};
}

// ---------------------------------------------------------------------------
// 4. Lattice prefactor at depth 200.
// ---------------------------------------------------------------------------
criterion_result c04() {
  const double expected = -2.68e3;
  bool pass = false;
  for (auto variant : {recurrence_variant::reference, recurrence_variant::rederived}) {
    const auto rep = run_variant([&](variant_report& r) {
      const auto est = nanoptera::prefactor_lattice(200, variant);
      r.value = est.value;
      r.note = est.converged ? "converged"
                             : fmt("plateau, rel change %.2e", est.rel_change_last);
    });
    if (!rep.computed) {
      std::printf("  variant %-9s: failed (%s)\n", to_string(variant), rep.note.c_str());
      continue;
    }
    std::printf("  variant %-9s: Lambda = %s (%s)\n", to_string(variant),
                cstr(rep.value).c_str(), rep.note.c_str());
    if (std::abs(rep.value.real() - expected) <= 0.01 * std::abs(expected) &&
        std::abs(rep.value.imag()) <= 0.01 * std::abs(expected)) {
      pass = true;
    }
  }
  return {pass, fmt("lattice prefactor(j=200) target %.3g within 1%%; no variant "
                    "matches (values printed above)",
                    expected)};
}

// ---------------------------------------------------------------------------
// 5. Exact-rational oracle for the scaled recurrences, j <= 15.
// ---------------------------------------------------------------------------
criterion_result c05() {
  double worst = 0.0;
  int checked = 0;

  const auto raw_coefficient = [](const nanoptera::inner_series& s, int j) {
    complex p = 1.0;
    for (int i = 0; i < 2 * j + 2; ++i) p *= s.chi_x;
    double g = 1.0;
    for (int i = 2; i <= 2 * j + 1; ++i) g *= i;
    return s.scaled_terms[j] * g / p;
  };
  const auto check_series = [&](const nanoptera::inner_series& series,
                                const std::vector<oracle::rational>& exact) {
    for (int j = 0; j <= 15; ++j) {
      const double expected = exact[j].convert_to<double>();
      const double rel = std::abs(raw_coefficient(series, j) - expected) / std::abs(expected);
      worst = std::max(worst, rel);
      ++checked;
    }
  };

  for (auto variant : {recurrence_variant::reference, recurrence_variant::rederived}) {
    check_series(nanoptera::kdv7_inner_terms(1.0, first_quadrant_root(1.0), 15, variant),
                 oracle::kdv7_exact_terms(oracle::rational(1), 15, variant));
    check_series(nanoptera::kdv7_inner_terms(0.125, dominant_root(0.125), 15, variant),
                 oracle::kdv7_exact_terms(oracle::rational(1, 8), 15, variant));
    check_series(nanoptera::lattice_inner_terms(15, variant),
                 oracle::lattice_exact_terms(15, variant));
  }

  const bool v1_ok =
      oracle::kdv7_exact_terms(oracle::rational(1), 1, recurrence_variant::reference)[1] ==
      oracle::rational(-15);
  const bool pass = worst < 1e-12 && v1_ok;
  return {pass, fmt("scaled terms vs exact rationals: %d comparisons across both "
                    "recurrences (lambda in {1, 1/8} and lattice), worst relative "
                    "deviation %.2e (< 1e-12 required); hand-checkable v_1 = -15: %s",
                    checked, worst, v1_ok ? "confirmed" : "VIOLATED")};
}

// ---------------------------------------------------------------------------
// 6. Odd/even imaginary-root dichotomy at lambda = 1.
// ---------------------------------------------------------------------------
criterion_result c06() {
  double worst_residual = 0.0;
  for (int k : {1, 3, 5, 7}) {
    for (const complex chi : {complex(0.0, 1.0), complex(0.0, -1.0)}) {
      worst_residual = std::max(worst_residual, nanoptera::hierarchy_residual(k, 1.0, chi));
    }
  }
  double min_re = std::numeric_limits<double>::infinity();
  int imaginary_count = 0;
  for (int k : {2, 4, 6, 8}) {
    for (const auto& r : nanoptera::hierarchy_singulant_roots(k, 1.0)) {
      min_re = std::min(min_re, std::abs(r.value.real()));
      if (r.regime == nanoptera::root_regime::pure_imaginary) ++imaginary_count;
    }
  }
  const bool pass = worst_residual < 1e-12 && min_re > 1e-3 && imaginary_count == 0;
  return {pass, fmt("odd k in {1,3,5,7}: +-i residual %.2e (< 1e-12); even k in "
                    "{2,4,6,8}: %d imaginary roots, min |Re| = %.4f (> 1e-3)",
                    worst_residual, imaginary_count, min_re)};
}

// ---------------------------------------------------------------------------
// 7. Threshold monotonicity over k.
// ---------------------------------------------------------------------------
criterion_result c07() {
  std::vector<double> values;
  std::string listing;
  for (int k : {2, 4, 6, 8, 10}) {
    values.push_back(nanoptera::lambda_crit(k).critical_value);
    listing += fmt("%s%.6f", listing.empty() ? "" : ", ", values.back());
  }
  bool increasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) increasing = false;
  }
  const bool bounded =
      std::all_of(values.begin(), values.end(),
                  [](double v) { return v > 0.25 - 1e-8 && v < 0.5; });
  return {increasing && bounded,
          fmt("lambda_crit over k = 2,4,6,8,10: [%s]; strictly increasing: %s, all in "
              "(0.25 - 1e-8, 0.5): %s",
              listing.c_str(), increasing ? "yes" : "NO", bounded ? "yes" : "NO")};
}

// ---------------------------------------------------------------------------
// 8. Fifth-order lattice frequency selection and regime flip.
// ---------------------------------------------------------------------------
criterion_result c08() {
  const double f_small = nanoptera::lattice_5kdv_dominant_frequency(0.125);
  const double f_large = nanoptera::lattice_5kdv_dominant_frequency(1.0);

  const auto family2_imaginary = [](double kappa) {
    const auto roots = nanoptera::lattice_5kdv_singulants(kappa, 1);
    return std::any_of(roots.family2.begin(), roots.family2.end(), [](const auto& r) {
      return r.regime == nanoptera::root_regime::pure_imaginary;
    });
  };
  const bool attribution_ok = !family2_imaginary(0.125) && family2_imaginary(1.0);

  const auto flip = nanoptera::kappa_crit(1e-8);
  const bool freq_ok = std::abs(f_small - pi) < 1e-9 && std::abs(f_large - pi / 6.0) < 1e-9;
  const bool flip_ok = std::abs(flip.critical_value - 0.25) <= 1e-6 &&
                       flip.bracket.first <= 0.25 && 0.25 <= flip.bracket.second;
  return {freq_ok && attribution_ok && flip_ok,
          fmt("dominant frequency: %.9f at kappa=1/8 (target pi, first family) and "
              "%.9f at kappa=1 (target pi/6, second family switched on: %s); regime "
              "flip at kappa = %.9f (target 0.25 +- 1e-6)",
              f_small, f_large, attribution_ok ? "yes" : "NO", flip.critical_value)};
}

// ---------------------------------------------------------------------------
// 9. Classical-limit solver baseline and Strang order.
// ---------------------------------------------------------------------------
double linf_vs_travelling_soliton(const nanoptera::spectral_field& f, double c) {
  double worst = 0.0;
  for (int i = 0; i < f.n_points; ++i) {
    worst = std::max(worst, std::abs(f.samples[i] - nanoptera::soliton(f.x(i), f.time, c)));
  }
  return worst;
}

criterion_result c09() {
  const auto t0 = std::chrono::steady_clock::now();
  nanoptera::simulation_config cfg;
  cfg.model = nanoptera::model_spec::seventh_order_kdv(0.125, 1.0);
  cfg.eps = 0.0;
  cfg.L = 50.0;
  cfg.n_points = 4096;
  cfg.dt = 1e-4;
  cfg.t_end = 1.0;
  const double fidelity = linf_vs_travelling_soliton(nanoptera::run(cfg).final, 1.0);

  std::vector<double> errs;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    auto c2 = cfg;
    c2.dt = dt;
    c2.t_end = 0.5;
    errs.push_back(linf_vs_travelling_soliton(nanoptera::run(c2).final, 1.0));
  }
  const double r1 = errs[0] / errs[1];
  const double r2 = errs[1] / errs[2];
  const double wall = seconds_since(t0);
  const bool pass = fidelity <= 1e-6 && std::abs(r1 - 4.0) <= 0.5 &&
                    std::abs(r2 - 4.0) <= 0.5 && wall < 120.0;
  return {pass, fmt("classical-limit soliton: L_inf shape error %.3e at dt=1e-4, t=1 "
                    "(<= 1e-6); Strang halving ratios %.3f, %.3f (target 4 +- 0.5); "
                    "wall %.1f s (< 120 s)",
                    fidelity, r1, r2, wall)};
}

// ---------------------------------------------------------------------------
// 10. Numeric tail amplitude versus closed-form prediction over eps.
// ---------------------------------------------------------------------------
criterion_result c10() {
  const auto t0 = std::chrono::steady_clock::now();
  const complex supplied(-11.70, 0.0);
  const auto estimate = nanoptera::prefactor_caseB(0.125, 600, recurrence_variant::rederived);
  std::printf("  prediction uses the supplied prefactor %.2f; the settling recurrence "
              "variant estimates %s instead\n",
              supplied.real(), cstr(estimate.value).c_str());

  nanoptera::simulation_config base;
  const auto rows =
      nanoptera::compare_sweep(0.125, 1.0, {0.8, 0.7, 0.6, 0.5}, base, supplied);
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::printf("  eps = %.1f: numeric %.4e vs predicted %.4e, rel error %.4f, "
                "window steady: %s\n",
                r.eps, r.numeric_amplitude, r.asymptotic_amplitude, r.rel_error,
                r.measurement.steady ? "yes" : "no");
    if (i > 0 && !(r.rel_error < rows[i - 1].rel_error)) decreasing = false;
  }
  const double smallest = rows.back().rel_error;
  const double wall = seconds_since(t0);
  const bool pass = decreasing && smallest <= 0.30 && wall < 900.0;
  return {pass, fmt("relative error decreasing toward small eps: %s; smallest-eps "
                    "error %.4f (target <= 0.30); wall %.0f s (< 900 s)",
                    decreasing ? "yes" : "NO", smallest, wall)};
}

// ---------------------------------------------------------------------------
// 11. Cross-cutting property suites.
// ---------------------------------------------------------------------------
bool root_set_closed(const std::vector<nanoptera::singulant_root>& roots) {
  const auto contains = [&](complex z) {
    return std::any_of(roots.begin(), roots.end(), [&](const auto& r) {
      return std::abs(r.value - z) < 1e-9 * std::max(1.0, std::abs(z));
    });
  };
  return std::all_of(roots.begin(), roots.end(), [&](const auto& r) {
    return contains(std::conj(r.value)) && contains(-r.value);
  });
}

criterion_result c11() {
  // Conjugate/negation closure across regimes and models.
  bool closure = true;
  for (double lambda : {0.125, 0.3, 1.0}) {
    closure = closure && root_set_closed(nanoptera::solve_7kdv_singulant(lambda));
  }
  for (int k : {4, 6}) {
    closure = closure && root_set_closed(nanoptera::hierarchy_singulant_roots(k, 1.0));
  }
  std::printf("  root-set conjugate/negation closure: %s\n", closure ? "yes" : "NO");

  // Remainder symmetry about the core.
  const auto model_a = nanoptera::model_spec::seventh_order_kdv(1.0, 1.0);
  const auto [left, right] = nanoptera::remainder_caseA(model_a, 0.1, complex(0.711, 0.694));
  const bool symmetric = left.amplitude == right.amplitude &&
                         left.frequency == right.frequency &&
                         left.envelope_rate == right.envelope_rate;
  const auto osc = nanoptera::remainder_caseB(
      nanoptera::model_spec::seventh_order_kdv(0.125, 1.0), 0.5, complex(-11.7, 0.0));
  const bool two_sided = osc.side == nanoptera::oscillation_side::both &&
                         osc.one_sided_amplitude == 2.0 * osc.amplitude;
  std::printf("  remainder reflection symmetry about x = ct: %s (decaying pair), %s "
              "(oscillatory one-sided doubling)\n",
              symmetric ? "yes" : "NO", two_sided ? "yes" : "NO");

  // Stokes jump is s0-independent and matches the closed form.
  const complex chi_x(0.0, 1.0823922002923939);
  const complex mu = nanoptera::mu_factor(0.125, chi_x);
  const complex lam(-11.7, 0.0);
  const complex expected_jump = nanoptera::stokes_jump(chi_x, lam, mu, 0.1);
  bool jump_ok = true;
  for (const complex s0 : {complex(0.0, 0.0),
                           nanoptera::symmetric_stokes_s0(chi_x, lam, mu, 0.1),
                           complex(7.0, 3.0)}) {
    const auto prof = nanoptera::stokes_profile(pi, 0.1, chi_x, lam, mu, s0, {-2.0, 2.0}, 65);
    const complex measured = prof.multiplier_values.back() - prof.multiplier_values.front();
    if (std::abs(prof.jump - expected_jump) > 1e-12 * std::abs(expected_jump) ||
        std::abs(measured - expected_jump) > 1e-10 * std::abs(expected_jump)) {
      jump_ok = false;
    }
  }
  std::printf("  Stokes jump independent of integration constant: %s\n",
              jump_ok ? "yes" : "NO");

  // Linear step preserves the L2 norm.
  nanoptera::spectral_field field;
  field.L = 25.0;
  field.n_points = 512;
  field.samples.resize(field.n_points);
  for (int i = 0; i < field.n_points; ++i) {
    const double x = field.x(i);
    field.samples[i] = 0.3 * std::sin(2.0 * pi * x / field.L) +
                       0.11 * std::cos(14.0 * pi * x / field.L) +
                       0.07 * std::sin(40.0 * pi * x / field.L + 0.4);
  }
  const double l2_before = nanoptera::field_l2(field);
  const auto stepped = nanoptera::linear_step(
      field, nanoptera::model_spec::seventh_order_kdv(0.125, 1.0), 0.5, 0.37);
  const double l2_drift = std::abs(nanoptera::field_l2(stepped) - l2_before) / l2_before;
  std::printf("  linear-step L2 drift: %.2e (< 1e-12)\n", l2_drift);

  // Full split-step run conserves mass.
  nanoptera::simulation_config cfg;
  cfg.model = nanoptera::model_spec::seventh_order_kdv(0.125, 1.0);
  cfg.eps = 0.5;
  cfg.L = 30.0;
  cfg.n_points = 1024;
  cfg.dt = 5e-4;
  cfg.t_end = 0.5;
  nanoptera::spectral_field init;
  init.L = cfg.L;
  init.n_points = cfg.n_points;
  init.samples.resize(cfg.n_points);
  for (int i = 0; i < cfg.n_points; ++i) {
    init.samples[i] = nanoptera::soliton(init.x(i), 0.0, 1.0);
  }
  const double mass_drift =
      std::abs(nanoptera::field_mass(nanoptera::run(cfg).final) - nanoptera::field_mass(init));
  std::printf("  split-step mass drift over t = 0.5: %.2e (< 1e-8)\n", mass_drift);

  // Least-term location tracks the truncation rule on the lattice model.
  bool truncation_ok = true;
  std::string trunc_note;
  const auto series = nanoptera::lattice_inner_terms(60, recurrence_variant::reference);
  const auto [upper, lower] = nanoptera::singularity_locations(1.0, 0.0);
  const double chi_mag = std::abs(nanoptera::singulant_value(series.chi_x, upper, 1.0));
  for (double h : {0.5, 0.4, 0.3}) {
    const int n_rule = nanoptera::optimal_truncation(chi_mag, h);
    int argmin = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= 60; ++j) {
      const double mag = std::abs(series.scaled_terms[j]);
      if (mag == 0.0) continue;
      const double v = nanoptera::late_order_term_log_magnitude(j, h, chi_mag, mag);
      if (v < best) {
        best = v;
        argmin = j;
      }
    }
    if (std::abs(argmin - n_rule) > 2) truncation_ok = false;
    trunc_note += fmt("%sh=%.1f: least term j=%d vs rule N=%d", trunc_note.empty() ? "" : "; ",
                      h, argmin, n_rule);
  }
  std::printf("  truncation-minimum vs N = |chi|/2eps: %s\n", trunc_note.c_str());

  const bool pass = closure && symmetric && two_sided && jump_ok && l2_drift < 1e-12 &&
                    mass_drift < 1e-8 && truncation_ok;
  return {pass, fmt("property suites (root closure, remainder symmetry, Stokes jump, "
                    "L2 invariance %.1e, mass drift %.1e, truncation rule): %s",
                    l2_drift, mass_drift, pass ? "all hold" : "violations above")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<criterion_result()>> criteria = {
      c01, c02, c03, c04, c05, c06, c07, c08, c09, c10, c11};

  std::vector<int> to_run;
  if (argc <= 1) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) to_run.push_back(i);
  } else {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [criterion 1..%zu]\n", argv[0], criteria.size());
      return 2;
    }
    to_run.push_back(n);
  }

  int failures = 0;
  for (int n : to_run) {
    criterion_result result;
    try {
      result = criteria[n - 1]();
    } catch (const std::exception& e) {
      result = {false, std::string("unexpected exception: ") + e.what()};
    }
    std::printf("[%s] criterion %02d: %s\n", result.pass ? "PASS" : "FAIL", n,
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  return failures;
}
