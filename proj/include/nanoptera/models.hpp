#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace nanoptera {

using complex = std::complex<double>;

// Raised when an operation is invoked outside its parameter regime (e.g. a
// decaying-tail prediction requested in the oscillatory regime). Distinct
// from std::invalid_argument-style usage errors so callers can map the two
// onto different exit codes.
class regime_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Families of singularly perturbed KdV-type travelling-wave problems handled
// by this toolkit.
//
//   seventh_order : lambda*eps^4 u_7x + eps^2 u_5x + u_3x + 6 u u_x + u_t = 0
//   hierarchy     : the order-(2k+3) member, lambda*eps^{2k} u_{(2k+3)x}
//                   + sum of lower odd derivatives down to u_3x
//   lattice_kdv   : central-difference discretization of KdV on a grid of
//                   spacing h (the grid spacing plays the role of eps)
//   lattice_5kdv  : central-difference discretization of the fifth-order KdV
//                   with bifurcation parameter kappa
enum class model_kind { seventh_order, hierarchy, lattice_kdv, lattice_5kdv };

struct model_spec {
  model_kind kind = model_kind::seventh_order;
  double lambda = 1.0;  // highest-derivative coefficient (seventh_order, hierarchy)
  int k = 2;            // hierarchy index; equation order is 2k+3
  double kappa = 0.0;   // fifth-derivative coefficient (lattice_5kdv)
  double sigma = 0.0;   // lattice advection weight; carried for the solver,
                        // drops out of every singulant equation at this order
  double c = 1.0;       // travelling-wave speed

  static model_spec seventh_order_kdv(double lambda, double c = 1.0) {
    model_spec m;
    m.kind = model_kind::seventh_order;
    m.lambda = lambda;
    m.k = 2;
    m.c = c;
    return m;
  }
  static model_spec hierarchy_kdv(int k, double lambda, double c = 1.0) {
    model_spec m;
    m.kind = model_kind::hierarchy;
    m.k = k;
    m.lambda = lambda;
    m.c = c;
    return m;
  }
  static model_spec lattice(double c = 1.0) {
    model_spec m;
    m.kind = model_kind::lattice_kdv;
    m.c = c;
    return m;
  }
  static model_spec lattice_fifth_order(double kappa, double c = 1.0) {
    model_spec m;
    m.kind = model_kind::lattice_5kdv;
    m.kappa = kappa;
    m.c = c;
    return m;
  }
};

inline const char* to_string(model_kind k) {
  switch (k) {
    case model_kind::seventh_order: return "7kdv";
    case model_kind::hierarchy: return "hierarchy";
    case model_kind::lattice_kdv: return "lattice-kdv";
    case model_kind::lattice_5kdv: return "lattice-5kdv";
  }
  return "unknown";
}

}  // namespace nanoptera
