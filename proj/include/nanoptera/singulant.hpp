#pragma once

// Singulant (late-order phase) roots, regime classification, and bifurcation
// thresholds for the model families in models.hpp.
//
// Late-order terms of the outer expansions have factorial-over-power form
// with a phase chi whose x-derivative satisfies an algebraic (or, for the
// lattice models, transcendental) equation:
//
//   seventh order : lambda*chi_x^4 + chi_x^2 + 1 = 0
//   hierarchy     : lambda*chi_x^{2k} + sum_{r=0}^{k-1} chi_x^{2r} = 0
//   lattice KdV   : [1 - cosh(chi_x)] sinh(chi_x) = 0
//   lattice 5KdV  : family 1 solves sinh(chi_x) = 0, family 2 solves
//                   1 + 4*kappa*sinh^2(chi_x) = 0
//
// A root with vanishing real part generates non-decaying far-field
// oscillations (a generalized solitary wave); a root with nonzero real part
// generates exponentially decaying oscillations.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "models.hpp"

namespace nanoptera {

// Absolute tolerance on |Re chi_x| separating pure-imaginary roots from
// complex ones. Roots come from double-precision eigenvalue solves with
// ~1e-12 backward error, and no model here has roots with 0 < |Re| < 1e-6
// except exactly at criticality.
inline constexpr double class_tol = 1e-9;

enum class root_regime { pure_imaginary, complex_decaying };
enum class root_family { primary, secondary };

struct singulant_root {
  complex value{};
  root_regime regime = root_regime::pure_imaginary;
  root_family family = root_family::primary;
  // Enumeration index. Polynomial models: position in the dominance-sorted
  // list. Lattice families: the integer N labelling the branch.
  int branch_index = 0;
};

struct bifurcation_result {
  std::string parameter_name;
  double critical_value = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  int iterations = 0;
};

enum class wave_regime {
  generalized_solitary_wave,
  localized_soliton,
  kappa_independent_oscillations,
  kappa_dependent_oscillations,
};

namespace detail {

inline root_regime classify_value(const complex& chi) {
  return std::abs(chi.real()) < class_tol ? root_regime::pure_imaginary
                                          : root_regime::complex_decaying;
}

// Dominance order: small |Im| first (weakest exponential suppression),
// positive imaginary part before its conjugate, then by real part.
inline bool dominance_less(const complex& a, const complex& b) {
  const double ia = std::abs(a.imag()), ib = std::abs(b.imag());
  if (std::abs(ia - ib) > 1e-12 * (1.0 + std::max(ia, ib))) return ia < ib;
  if (a.imag() != b.imag()) return a.imag() > b.imag();
  return a.real() > b.real();
}

// Eigenvalues of the companion matrix of the monic polynomial
// y^n + c_{n-1} y^{n-1} + ... + c_0.
inline std::vector<complex> companion_roots(const std::vector<double>& monic_tail) {
  const int n = static_cast<int>(monic_tail.size());
  if (n == 0) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -monic_tail[i];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  std::vector<complex> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()[i];
  return roots;
}

// Value of the hierarchy singulant polynomial and its chi-derivative.
inline std::pair<complex, complex> hierarchy_poly(int k, double lambda, const complex& chi) {
  const complex chi2 = chi * chi;
  complex p = 0.0, dp = 0.0;  // p = lambda*chi^{2k} + sum_{r<k} chi^{2r}
  complex pw = 1.0;           // chi^{2r}
  for (int r = 0; r < k; ++r) {
    p += pw;
    if (r >= 1) dp += 2.0 * r * pw / chi;
    pw *= chi2;
  }
  p += lambda * pw;
  dp += 2.0 * k * lambda * pw / chi;
  return {p, dp};
}

// Largest monomial magnitude of the hierarchy polynomial at chi, used to
// express residuals relative to the scale of the evaluation.
inline double hierarchy_scale(int k, double lambda, const complex& chi) {
  const double a2 = std::norm(chi);
  double scale = 1.0, pw = 1.0;
  for (int r = 0; r < k; ++r) {
    scale = std::max(scale, pw);
    pw *= a2;
  }
  return std::max(scale, std::abs(lambda) * pw);
}

// Real polynomial g(y) = sum_{r=0}^{k-1} (-1)^r y^{2r} + lambda (-1)^k y^{2k},
// the hierarchy singulant evaluated on the imaginary axis chi = i*y.
inline std::pair<double, double> hierarchy_imag_axis(int k, double lambda, double y) {
  const double y2 = y * y;
  double g = 0.0, dg = 0.0, pw = 1.0, sign = 1.0;
  for (int r = 0; r < k; ++r) {
    g += sign * pw;
    if (r >= 1) dg += sign * 2.0 * r * pw / y;
    pw *= y2;
    sign = -sign;
  }
  g += lambda * sign * pw;
  dg += lambda * sign * 2.0 * k * pw / y;
  return {g, dg};
}

inline complex polish_hierarchy_root(int k, double lambda, complex chi) {
  for (int it = 0; it < 8; ++it) {
    auto [p, dp] = hierarchy_poly(k, lambda, chi);
    if (std::abs(dp) == 0.0) break;
    const complex step = p / dp;
    chi -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(chi))) break;
  }
  // Snap near-imaginary roots onto the axis and re-polish there, so that the
  // pure-imaginary structure survives in exact floating point.
  if (std::abs(chi.real()) < class_tol && std::abs(chi.imag()) > class_tol) {
    double y = chi.imag();
    for (int it = 0; it < 6; ++it) {
      auto [g, dg] = hierarchy_imag_axis(k, lambda, y);
      if (dg == 0.0) break;
      const double step = g / dg;
      y -= step;
      if (std::abs(step) < 1e-16 * (1.0 + std::abs(y))) break;
    }
    chi = complex(0.0, y);
  }
  return chi;
}

}  // namespace detail

// Relative residual of chi in the hierarchy singulant equation (k = 2 with
// the seventh-order coefficient reproduces the 7KdV quartic).
inline double hierarchy_residual(int k, double lambda, const complex& chi) {
  auto [p, dp] = detail::hierarchy_poly(k, lambda, chi);
  (void)dp;
  return std::abs(p) / detail::hierarchy_scale(k, lambda, chi);
}

inline double kdv7_residual(double lambda, const complex& chi) {
  return hierarchy_residual(2, lambda, chi);
}

// Roots of lambda*chi_x^4 + chi_x^2 + 1 = 0 via the closed-form quadratic in
// y = chi_x^2. Four roots. For lambda <= 1/4 all four are pure imaginary
// (generalized-solitary-wave regime); for lambda > 1/4 they form the
// conjugate quadruple {alpha, -alpha, conj(alpha), -conj(alpha)}.
// family::primary marks the branch y = (-1 + sqrt(1-4*lambda))/(2*lambda):
// the smaller-magnitude (dominant) pair for lambda < 1/4 and the
// positive-imaginary-part pair alpha^2 for lambda > 1/4.
inline std::vector<singulant_root> solve_7kdv_singulant(double lambda) {
  if (lambda == 0.0) throw std::domain_error("solve_7kdv_singulant: lambda must be nonzero");
  const complex disc = std::sqrt(complex(1.0 - 4.0 * lambda, 0.0));
  const complex y_primary = (-1.0 + disc) / (2.0 * lambda);
  const complex y_secondary = (-1.0 - disc) / (2.0 * lambda);

  std::vector<singulant_root> roots;
  for (const auto& [y, fam] : {std::pair{y_primary, root_family::primary},
                               std::pair{y_secondary, root_family::secondary}}) {
    complex chi = std::sqrt(y);
    chi = detail::polish_hierarchy_root(2, lambda, chi);
    for (const complex& r : {chi, -chi}) {
      const complex v = std::abs(r.real()) < class_tol ? complex(0.0, r.imag()) : r;
      roots.push_back({v, detail::classify_value(v), fam, 0});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const singulant_root& a, const singulant_root& b) {
    return detail::dominance_less(a.value, b.value);
  });
  for (std::size_t i = 0; i < roots.size(); ++i) roots[i].branch_index = static_cast<int>(i);
  return roots;
}

// All 2k roots of lambda*chi_x^{2k} + sum_{r=0}^{k-1} chi_x^{2r} = 0,
// computed as companion-matrix eigenvalues of the degree-k polynomial in
// y = chi_x^2 followed by square roots and Newton polish.
inline std::vector<singulant_root> hierarchy_singulant_roots(int k, double lambda) {
  if (k < 1) throw std::domain_error("hierarchy_singulant_roots: k must be >= 1");
  if (lambda == 0.0) throw std::domain_error("hierarchy_singulant_roots: lambda must be nonzero");

  // Monic tail of y^k + (1/lambda)(y^{k-1} + ... + 1).
  std::vector<double> tail(k, 1.0 / lambda);
  std::vector<complex> ys = detail::companion_roots(tail);

  std::vector<singulant_root> roots;
  roots.reserve(2 * k);
  // The primary family is the dominant pair: smallest |Im chi| among
  // pure-imaginary roots if any exist, otherwise smallest |y|.
  for (const complex& y : ys) {
    complex chi = detail::polish_hierarchy_root(k, lambda, std::sqrt(y));
    for (const complex& r : {chi, -chi}) {
      const complex v = std::abs(r.real()) < class_tol ? complex(0.0, r.imag()) : r;
      roots.push_back({v, detail::classify_value(v), root_family::secondary, 0});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const singulant_root& a, const singulant_root& b) {
    return detail::dominance_less(a.value, b.value);
  });
  for (std::size_t i = 0; i < roots.size(); ++i) roots[i].branch_index = static_cast<int>(i);
  // Flag the dominant conjugate pair as primary.
  for (std::size_t i = 0; i < roots.size() && i < 2; ++i) roots[i].family = root_family::primary;
  return roots;
}

// Supremum of lambda for which chi_x = i*y has a real solution y > 0, i.e.
// for which sum_{r=0}^{k-1} (-1)^r y^{2r} + lambda (-1)^k y^{2k} = 0 admits a
// positive real root. Defined for even k only: for odd k imaginary roots
// exist for every lambda > 0 and the threshold does not exist in this
// parametrization.
inline bifurcation_result lambda_crit(int k, double tol = 1e-10) {
  if (k < 2 || k % 2 != 0)
    throw std::domain_error("lambda_crit: defined for even k >= 2 only");
  if (!(tol > 0.0)) throw std::domain_error("lambda_crit: tol must be positive");

  // Predicate: the degree-k polynomial in z = y^2,
  //   lambda z^k + sum_{r=0}^{k-1} (-1)^r z^r   (k even),
  // has a real root z > 0.
  const auto has_positive_real_root = [k](double lambda) {
    std::vector<double> tail(k);
    for (int r = 0; r < k; ++r) tail[r] = ((r % 2 == 0) ? 1.0 : -1.0) / lambda;
    const std::vector<complex> zs = detail::companion_roots(tail);
    for (const complex& z : zs) {
      if (std::abs(z.imag()) < 1e-9 * std::max(1.0, std::abs(z.real())) && z.real() > 1e-12)
        return true;
    }
    return false;
  };

  double lo = 1e-6, hi = 1.0;
  int expand = 0;
  while (!has_positive_real_root(lo)) {
    lo *= 0.125;
    if (++expand > 60) throw std::runtime_error("lambda_crit: no GSW regime found");
  }
  expand = 0;
  while (has_positive_real_root(hi)) {
    hi *= 8.0;
    if (++expand > 60) throw std::runtime_error("lambda_crit: GSW regime unbounded");
  }

  int iters = 0;
  while (hi - lo > tol && iters < 200) {
    const double mid = 0.5 * (lo + hi);
    (has_positive_real_root(mid) ? lo : hi) = mid;
    ++iters;
  }
  return {"lambda", 0.5 * (lo + hi), {lo, hi}, iters};
}

// Residual of the lattice KdV singulant equation [1 - cosh(chi)] sinh(chi).
inline double lattice_kdv_residual(const complex& chi) {
  const complex s = std::sinh(chi), c = std::cosh(chi);
  const double scale = std::max(1.0, std::abs(c) * std::abs(s));
  return std::abs((1.0 - c) * s) / scale;
}

// The lattice KdV singulant roots chi_x = i*pi*N for N = +-1..+-n_max.
// All pure imaginary: the lattice KdV always supports generalized solitary
// waves. N = +-1 are the dominant (least suppressed) branches.
inline std::vector<singulant_root> lattice_kdv_singulants(int n_max) {
  if (n_max < 1) throw std::domain_error("lattice_kdv_singulants: n_max must be >= 1");
  std::vector<singulant_root> roots;
  for (int n = 1; n <= n_max; ++n) {
    for (int sgn : {+1, -1}) {
      singulant_root r;
      r.value = complex(0.0, sgn * n * std::numbers::pi);
      r.regime = root_regime::pure_imaginary;
      r.family = root_family::primary;
      r.branch_index = sgn * n;
      roots.push_back(r);
    }
  }
  return roots;
}

// Residual of the family-2 equation for the discretized fifth-order KdV,
// 1 + 4*kappa*sinh^2(chi_x) = 0 (the equation satisfied by the closed-form
// branch values; see lattice_5kdv_singulants).
inline double lattice_5kdv_family2_residual(double kappa, const complex& chi) {
  const complex s = std::sinh(chi);
  const complex val = 1.0 + 4.0 * kappa * s * s;
  return std::abs(val) / std::max(1.0, std::abs(4.0 * kappa * s * s));
}

struct lattice_5kdv_roots {
  std::vector<singulant_root> family1;  // sinh(chi_x) = 0: chi_x = i*pi*N
  std::vector<singulant_root> family2;  // 1 + 4*kappa*sinh^2(chi_x) = 0
};

// Singulant roots of the discretized fifth-order KdV. Family 1 is the
// kappa-independent set i*pi*N inherited from the lattice KdV. Family 2
// evaluates every independent sign choice of the closed-form branch
//   chi_x = 4*i*pi*N +- log(+- sqrt(1 - (1 +- sqrt(1-4*kappa))/(2*kappa))),
// reduced modulo the 4*pi*i periodicity to the strip Im in (-2*pi, 2*pi] and
// deduplicated. For kappa < 1/4 every family-2 root has |Re| > 0; for
// kappa >= 1/4 all of them are pure imaginary with kappa-dependent frequency.
inline lattice_5kdv_roots lattice_5kdv_singulants(double kappa, int n_max = 1) {
  if (kappa == 0.0)
    throw std::domain_error(
        "lattice_5kdv_singulants: kappa must be nonzero (use lattice_kdv_singulants)");

  lattice_5kdv_roots out;
  out.family1 = lattice_kdv_singulants(n_max);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const complex disc = std::sqrt(complex(1.0 - 4.0 * kappa, 0.0));
  std::vector<complex> values;
  for (int s1 : {+1, -1}) {
    const complex w = 1.0 - (1.0 + double(s1) * disc) / (2.0 * kappa);
    const complex z = std::sqrt(w);
    for (int s2 : {+1, -1}) {
      const complex l = std::log(double(s2) * z);
      for (int s3 : {+1, -1}) {
        complex chi = double(s3) * l;
        // Reduce to the fundamental strip Im in (-2*pi, 2*pi].
        double im = chi.imag();
        im = std::remainder(im, 2.0 * two_pi);
        if (im <= -two_pi) im += 2.0 * two_pi;
        if (im > two_pi) im -= 2.0 * two_pi;
        chi = complex(std::abs(chi.real()) < class_tol ? 0.0 : chi.real(), im);
        const bool dup = std::any_of(values.begin(), values.end(), [&](const complex& v) {
          return std::abs(v - chi) < 1e-10 * (1.0 + std::abs(chi));
        });
        if (!dup) values.push_back(chi);
      }
    }
  }
  std::sort(values.begin(), values.end(), detail::dominance_less);
  for (std::size_t i = 0; i < values.size(); ++i) {
    singulant_root r;
    r.value = values[i];
    r.regime = detail::classify_value(values[i]);
    r.family = root_family::secondary;
    r.branch_index = static_cast<int>(i);
    out.family2.push_back(r);
  }
  return out;
}

// Spatial frequency of the dominant far-field oscillation of the discretized
// fifth-order KdV: the pure-imaginary singulant root of smallest |Im| across
// both families (per grid unit; divide by h for a physical wavenumber).
inline double lattice_5kdv_dominant_frequency(double kappa) {
  const lattice_5kdv_roots roots = lattice_5kdv_singulants(kappa, 1);
  double best = std::numeric_limits<double>::infinity();
  const auto consider = [&](const std::vector<singulant_root>& fam) {
    for (const singulant_root& r : fam) {
      if (r.regime != root_regime::pure_imaginary) continue;
      const double f = std::abs(r.value.imag());
      if (f > class_tol && f < best) best = f;
    }
  };
  consider(roots.family1);
  consider(roots.family2);
  return best;
}

// Threshold of kappa at which family 2 acquires pure-imaginary roots and the
// dominant far-field frequency becomes kappa-dependent.
inline bifurcation_result kappa_crit(double tol = 1e-8) {
  if (!(tol > 0.0)) throw std::domain_error("kappa_crit: tol must be positive");
  const auto family2_has_imaginary = [](double kappa) {
    const lattice_5kdv_roots roots = lattice_5kdv_singulants(kappa, 1);
    return std::any_of(roots.family2.begin(), roots.family2.end(), [](const singulant_root& r) {
      return r.regime == root_regime::pure_imaginary;
    });
  };
  double lo = 1e-6, hi = 1.0;
  int expand = 0;
  while (family2_has_imaginary(lo)) {
    lo *= 0.125;
    if (++expand > 60) throw std::runtime_error("kappa_crit: lower bracket not found");
  }
  expand = 0;
  while (!family2_has_imaginary(hi)) {
    hi *= 8.0;
    if (++expand > 60) throw std::runtime_error("kappa_crit: upper bracket not found");
  }
  int iters = 0;
  while (hi - lo > tol && iters < 200) {
    const double mid = 0.5 * (lo + hi);
    (family2_has_imaginary(mid) ? hi : lo) = mid;
    ++iters;
  }
  return {"kappa", 0.5 * (lo + hi), {lo, hi}, iters};
}

// Far-field character of the travelling wave for a model configuration.
// Seventh-order/hierarchy: generalized solitary wave exactly when a
// pure-imaginary singulant root exists (at criticality the double root is
// pure imaginary, so equality belongs to the GSW side). Lattice KdV: always
// a generalized solitary wave. Discretized 5KdV: oscillations never switch
// off; the classification records whether their dominant frequency depends
// on kappa (kappa >= 1/4) or not (kappa < 1/4).
inline wave_regime classify_regime(const model_spec& model) {
  switch (model.kind) {
    case model_kind::seventh_order:
    case model_kind::hierarchy: {
      const auto roots = model.kind == model_kind::seventh_order
                             ? solve_7kdv_singulant(model.lambda)
                             : hierarchy_singulant_roots(model.k, model.lambda);
      const bool gsw = std::any_of(roots.begin(), roots.end(), [](const singulant_root& r) {
        return r.regime == root_regime::pure_imaginary;
      });
      return gsw ? wave_regime::generalized_solitary_wave : wave_regime::localized_soliton;
    }
    case model_kind::lattice_kdv:
      return wave_regime::generalized_solitary_wave;
    case model_kind::lattice_5kdv:
      return model.kappa < 0.25 ? wave_regime::kappa_independent_oscillations
                                : wave_regime::kappa_dependent_oscillations;
  }
  throw std::logic_error("classify_regime: unknown model kind");
}

inline const char* to_string(wave_regime r) {
  switch (r) {
    case wave_regime::generalized_solitary_wave: return "GeneralizedSolitaryWave";
    case wave_regime::localized_soliton: return "LocalizedSoliton";
    case wave_regime::kappa_independent_oscillations: return "KappaIndependentOscillations";
    case wave_regime::kappa_dependent_oscillations: return "KappaDependentOscillations";
  }
  return "unknown";
}

inline const char* to_string(root_regime r) {
  return r == root_regime::pure_imaginary ? "PureImaginary" : "ComplexDecaying";
}

inline const char* to_string(root_family f) {
  return f == root_family::primary ? "Primary" : "Secondary";
}

}  // namespace nanoptera
