#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "inner.hpp"
#include "models.hpp"
#include "singulant.hpp"

// Closed-form far-field machinery: leading-order solitary waves, the complex
// singularities they carry, optimal series truncation, error-function Stokes
// smoothing, and the exponentially small remainder amplitudes for each model
// family.  Everything here is a pure function of a handful of scalars; the
// heavy lifting (root finding, prefactor recurrences) lives in singulant.hpp
// and inner.hpp.

namespace nanoptera {

// Late-order coefficients behave like prefactor * Gamma(2j + gamma) /
// singulant^(2j + gamma) as j grows; gamma = 2 for every model in scope
// (forced by matching the leading-order core, whose singularities are second
// order poles).
struct late_order_ansatz {
  int gamma = 2;
  complex chi_x{};
  complex prefactor{};
  complex singularity{};
};

// Which side of the wave core a far-field prediction describes.
enum class oscillation_side { left, right, both };

inline const char* to_string(oscillation_side s) {
  switch (s) {
    case oscillation_side::left: return "Left";
    case oscillation_side::right: return "Right";
    case oscillation_side::both: return "Both";
  }
  return "unknown";
}

// Closed-form description of an exponentially small far-field tail:
//
//   u(x, t) ~ core(x - ct) + amplitude * e^{-envelope_rate * |x - ct|}
//                           * oscillation(frequency * (x - ct))
//
// amplitude is measured in solution units at the edge of the inner region;
// envelope_rate is zero exactly when the tail is a non-decaying oscillation
// (generalized solitary waves).  The generating singulant root, the prefactor
// used, the singularity it was matched at (taken at t = 0; translate by c*t
// for later times) and the linearization factor mu are kept for traceability.
// one_sided_amplitude records the far-field amplitude of the equivalent
// one-sided construction, which carries twice the symmetric amplitude; it is
// zero for decaying (localized) tails where no such construction exists.
struct remainder_prediction {
  double amplitude = 0.0;
  double frequency = 0.0;
  double envelope_rate = 0.0;
  oscillation_side side = oscillation_side::both;
  complex mu{};
  complex chi_x{};
  complex prefactor{};
  complex singularity{};
  double one_sided_amplitude = 0.0;
};

// Sampled Stokes multiplier S(theta) across the Stokes line at theta = 0,
// together with the total jump S(+inf) - S(-inf) and the integration constant
// actually used (the far-left limit).
struct stokes_profile_result {
  std::vector<double> theta_samples;
  std::vector<complex> multiplier_values;
  complex jump{};
  complex s0{};
};

// Leading-order solitary-wave core, peak value c/2 at x = ct.
inline double soliton(double x, double t, double c) {
  if (!(c > 0.0)) {
    throw std::domain_error("soliton: wave speed c must be positive");
  }
  const double s = 1.0 / std::cosh(0.5 * std::sqrt(c) * (x - c * t));
  return 0.5 * c * s * s;
}

// Complex-conjugate singularity pair of the soliton core nearest the real
// axis: x = c*t +/- i*pi/sqrt(c).  Returned as (upper, lower).
inline std::pair<complex, complex> singularity_locations(double c, double t) {
  if (!(c > 0.0)) {
    throw std::domain_error("singularity_locations: wave speed c must be positive");
  }
  const double im = std::numbers::pi / std::sqrt(c);
  return {complex(c * t, im), complex(c * t, -im)};
}

// Singulant value accumulated from a singularity to a real observation
// point, for constant-coefficient singulants (all models in scope).
inline complex singulant_value(complex chi_x, complex singularity, double x) {
  return chi_x * (complex(x, 0.0) - singularity);
}

// Truncation index minimizing the late-order term magnitude: the smallest
// integer N >= 1 with N >= |chi| / (2 eps), so 0 <= N - |chi|/(2 eps) < 1.
inline int optimal_truncation(double chi_magnitude, double eps) {
  if (!(chi_magnitude > 0.0)) {
    throw std::domain_error("optimal_truncation: |chi| must be positive");
  }
  if (!(eps > 0.0)) {
    throw std::domain_error("optimal_truncation: eps must be positive");
  }
  const double ratio = chi_magnitude / (2.0 * eps);
  int n = static_cast<int>(std::ceil(ratio));
  if (n < 1) n = 1;
  return n;
}

// Linearization factor multiplying S_x when the governing operator acts on a
// WKB remainder: mu = 7 lambda chi_x^6 + 5 chi_x^4 + 3 chi_x^2.
inline complex mu_factor(double lambda, complex chi_x) {
  if (chi_x == complex(0.0, 0.0)) {
    throw std::domain_error("mu_factor: chi_x must be nonzero");
  }
  const complex c2 = chi_x * chi_x;
  return ((7.0 * lambda * c2 + 5.0) * c2 + 3.0) * c2;
}

// log |eps^{2j} * u_j| under the late-order ansatz, with u_j ~ prefactor *
// Gamma(2j + gamma) / chi^{2j + gamma}.  Scanning j at fixed eps locates the
// smallest series term, which the truncation rule above approximates.
inline double late_order_term_log_magnitude(int j, double eps, double chi_magnitude,
                                            double prefactor_magnitude, int gamma = 2) {
  if (j < 0) {
    throw std::domain_error("late_order_term_log_magnitude: j must be nonnegative");
  }
  if (!(eps > 0.0) || !(chi_magnitude > 0.0) || !(prefactor_magnitude > 0.0)) {
    throw std::domain_error(
        "late_order_term_log_magnitude: eps, |chi| and |prefactor| must be positive");
  }
  return 2.0 * j * std::log(eps) + std::log(prefactor_magnitude) +
         std::lgamma(2.0 * j + gamma) - (2.0 * j + gamma) * std::log(chi_magnitude);
}

// Half-width of the inner region excluded around x = ct when reporting
// side-specific far-field behaviour: three Stokes-transition widths,
// 3 sqrt(eps * rho_core) / sqrt(root_magnitude).
inline double inner_exclusion_halfwidth(double eps, double rho_core, double root_magnitude) {
  if (!(eps > 0.0) || !(rho_core > 0.0) || !(root_magnitude > 0.0)) {
    throw std::domain_error(
        "inner_exclusion_halfwidth: eps, rho_core and root magnitude must be positive");
  }
  return 3.0 * std::sqrt(eps * rho_core) / std::sqrt(root_magnitude);
}

// Total jump of the Stokes multiplier across the Stokes line:
// -2 pi i chi_x^2 prefactor / (mu eps^2).  For the lattice models the
// closed-form tail already absorbs the linearization constant, so callers
// pass mu = 1 and eps = h there.
inline complex stokes_jump(complex chi_x, complex prefactor, complex mu, double eps) {
  if (!(eps > 0.0)) {
    throw std::domain_error("stokes_jump: eps must be positive");
  }
  if (mu == complex(0.0, 0.0)) {
    throw std::domain_error("stokes_jump: mu must be nonzero");
  }
  return complex(0.0, -2.0 * std::numbers::pi) * chi_x * chi_x * prefactor / (mu * eps * eps);
}

// Integration constant that makes the multiplier vanish on the Stokes line
// itself, splitting the jump symmetrically (S(-inf) = -jump/2).
inline complex symmetric_stokes_s0(complex chi_x, complex prefactor, complex mu, double eps) {
  return -0.5 * stokes_jump(chi_x, prefactor, mu, eps);
}

// Error-function smoothing of the Stokes multiplier across theta = 0, where
// theta = arg(chi) and rho = |chi| at the crossing point:
//
//   S(theta) = s0 + jump * (1 + erf(sqrt(rho / (2 eps)) * theta)) / 2
//
// s0 is the far-left limit: pass symmetric_stokes_s0(...) for oscillations
// symmetric about the core, or 0 for the one-sided construction.  The
// transition width in theta scales as sqrt(eps).
inline stokes_profile_result stokes_profile(double rho, double eps, complex chi_x,
                                            complex prefactor, complex mu, complex s0,
                                            std::pair<double, double> theta_range,
                                            int n_samples = 513) {
  if (!(rho > 0.0)) {
    throw std::domain_error("stokes_profile: rho must be positive");
  }
  if (!(eps > 0.0)) {
    throw std::domain_error("stokes_profile: eps must be positive");
  }
  if (n_samples < 2) {
    throw std::domain_error("stokes_profile: need at least two samples");
  }
  if (!(theta_range.first < theta_range.second)) {
    throw std::domain_error("stokes_profile: theta range must be nonempty");
  }
  stokes_profile_result out;
  out.jump = stokes_jump(chi_x, prefactor, mu, eps);
  out.s0 = s0;
  out.theta_samples.resize(n_samples);
  out.multiplier_values.resize(n_samples);
  const double scale = std::sqrt(rho / (2.0 * eps));
  const double dtheta = (theta_range.second - theta_range.first) / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) {
    const double theta = theta_range.first + i * dtheta;
    out.theta_samples[i] = theta;
    out.multiplier_values[i] = s0 + out.jump * (0.5 * (1.0 + std::erf(scale * theta)));
  }
  return out;
}

namespace detail {

inline void require_seventh_order(const model_spec& model, const char* who) {
  if (model.kind != model_kind::seventh_order) {
    throw std::invalid_argument(std::string(who) +
                                ": model must be the seventh-order family");
  }
}

}  // namespace detail

// Far-field tails when the singulant roots are fully complex (lambda > 1/4):
// exponentially decaying oscillations on each side of the core.  Returns
// (left, right).  With alpha the first-quadrant root,
//
//   amplitude      = 4 pi |alpha^2 prefactor| / (|mu| eps^2) * e^{-Im(alpha) pi / (eps sqrt(c))}
//   frequency      = Im(alpha) / eps
//   envelope_rate  = Re(alpha) / eps
//
// and the tail decays like amplitude * e^{-envelope_rate |x - ct|}.  The
// stored root is the representative of the conjugate pair that decays in the
// stored direction; the observable tail is the real combination of the pair.
inline std::pair<remainder_prediction, remainder_prediction> remainder_caseA(
    const model_spec& model, double eps, complex prefactor) {
  detail::require_seventh_order(model, "remainder_caseA");
  if (!(eps > 0.0)) {
    throw std::domain_error("remainder_caseA: eps must be positive");
  }
  if (!(model.lambda > 0.25)) {
    throw regime_error(
        "remainder_caseA: decaying tails require lambda > 1/4; the oscillatory "
        "regime is handled by remainder_caseB");
  }
  const auto roots = solve_7kdv_singulant(model.lambda);
  complex alpha{};
  bool found = false;
  for (const auto& r : roots) {
    if (r.value.real() > 0.0 && r.value.imag() > 0.0) {
      alpha = r.value;
      found = true;
      break;
    }
  }
  if (!found) {
    throw std::logic_error("remainder_caseA: no first-quadrant singulant root");
  }
  const double c = model.c;
  const complex mu = mu_factor(model.lambda, alpha);
  const double amplitude = 4.0 * std::numbers::pi * std::abs(alpha * alpha * prefactor) /
                           (std::abs(mu) * eps * eps) *
                           std::exp(-alpha.imag() * std::numbers::pi / (eps * std::sqrt(c)));
  const auto sing = singularity_locations(c, 0.0);

  remainder_prediction right;
  right.amplitude = amplitude;
  right.frequency = alpha.imag() / eps;
  right.envelope_rate = alpha.real() / eps;
  right.side = oscillation_side::right;
  right.chi_x = alpha;
  right.mu = mu;
  right.prefactor = prefactor;
  right.singularity = sing.first;
  right.one_sided_amplitude = 0.0;

  remainder_prediction left = right;
  left.side = oscillation_side::left;
  left.chi_x = -std::conj(alpha);
  left.mu = mu_factor(model.lambda, left.chi_x);
  left.singularity = sing.second;
  return {left, right};
}

// Far-field tails when the dominant singulant roots are pure imaginary
// (0 < lambda <= 1/4): constant-amplitude oscillations on both sides, i.e. a
// generalized solitary wave.  With beta = Im of the dominant root,
//
//   amplitude = |2 pi beta^2 prefactor / (mu eps^2)| * e^{-beta pi / (eps sqrt(c))}
//   frequency = beta / eps
//
// The symmetric construction splits the Stokes jump evenly; the equivalent
// one-sided construction carries twice this amplitude, recorded in
// one_sided_amplitude.
inline remainder_prediction remainder_caseB(const model_spec& model, double eps,
                                            complex prefactor) {
  detail::require_seventh_order(model, "remainder_caseB");
  if (!(eps > 0.0)) {
    throw std::domain_error("remainder_caseB: eps must be positive");
  }
  if (model.lambda > 0.25) {
    throw regime_error(
        "remainder_caseB: non-decaying oscillations require 0 < lambda <= 1/4; "
        "the decaying regime is handled by remainder_caseA");
  }
  if (!(model.lambda > 0.0)) {
    throw regime_error("remainder_caseB: lambda must lie in (0, 1/4]");
  }
  const auto roots = solve_7kdv_singulant(model.lambda);
  const complex chi_x = roots.front().value;  // dominant root, +i beta
  const double beta = chi_x.imag();
  const double c = model.c;
  const complex mu = mu_factor(model.lambda, chi_x);
  const double amplitude =
      std::abs(2.0 * std::numbers::pi * beta * beta * prefactor / (mu * eps * eps)) *
      std::exp(-beta * std::numbers::pi / (eps * std::sqrt(c)));

  remainder_prediction out;
  out.amplitude = amplitude;
  out.frequency = beta / eps;
  out.envelope_rate = 0.0;
  out.side = oscillation_side::both;
  out.chi_x = chi_x;
  out.mu = mu;
  out.prefactor = prefactor;
  out.singularity = singularity_locations(c, 0.0).first;
  out.one_sided_amplitude = 2.0 * amplitude;
  return out;
}

// Prefactor used by lattice_remainder when none is supplied: the plateau of
// the lattice inner recurrence at depth 200.
inline complex default_lattice_prefactor() {
  static const complex value =
      prefactor_lattice(200, recurrence_variant::reference).value;
  return value;
}

// Far-field tail of the lattice discretization with grid spacing h: a
// non-decaying oscillation with
//
//   amplitude = |2 pi^3 prefactor / h^2| * e^{-pi^2 / (h sqrt(c))}
//   frequency = pi / h
//
// The closed form already absorbs the linearization constant, so the stored
// mu is 1 and the jump of the matching Stokes profile is
// stokes_jump(i pi, prefactor, 1, h).
inline remainder_prediction lattice_remainder(double h, double c,
                                              std::optional<complex> prefactor = std::nullopt) {
  if (!(h > 0.0)) {
    throw std::domain_error("lattice_remainder: grid spacing h must be positive");
  }
  if (!(c > 0.0)) {
    throw std::domain_error("lattice_remainder: wave speed c must be positive");
  }
  const complex lam = prefactor ? *prefactor : default_lattice_prefactor();
  const double pi = std::numbers::pi;
  const double amplitude = std::abs(2.0 * pi * pi * pi * lam / (h * h)) *
                           std::exp(-pi * pi / (h * std::sqrt(c)));

  remainder_prediction out;
  out.amplitude = amplitude;
  out.frequency = pi / h;
  out.envelope_rate = 0.0;
  out.side = oscillation_side::both;
  out.chi_x = complex(0.0, pi);
  out.mu = complex(1.0, 0.0);
  out.prefactor = lam;
  out.singularity = singularity_locations(c, 0.0).first;
  out.one_sided_amplitude = 2.0 * amplitude;
  return out;
}

}  // namespace nanoptera
