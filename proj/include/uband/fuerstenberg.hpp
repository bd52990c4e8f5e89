#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "uband/operator_core.hpp"

namespace uband {

/// Real 4x4 lift of a complex 2x2 matrix: each entry a becomes the block
/// Re(a) I + Im(a) J with J = [[0, 1], [-1, 0]]. A group homomorphism on
/// matrices with unimodular determinant.
struct RealLift {
  Eigen::Matrix4d matrix;
};

RealLift tau_lift(const Eigen::Matrix2cd& m);

/// Structure matrices of the lifted one-parameter families:
///   tau(T(theta, theta))                      = A0 + A1 sin + A2 cos,
///   d/dtheta tau(T(theta, eta))|_{eta=theta}  = B0 + B1 sin + B2 cos.
struct StructureMatrices {
  Eigen::Matrix4d a0, a1, a2, b0, b1, b2;
};

StructureMatrices structure_matrices(BandParameters p);

/// Analytic derivative of T(theta, eta) with respect to theta.
Eigen::Matrix2cd transfer_dtheta(double theta, double eta, BandParameters p);

/// Non-compactness certificate built from the group elements
///   C = T(th,th) T(th,et)^{-1},  E = T(et,th)^{-1} T(th,th),
///   L = CE,  J = EC,  K = J^{-1} L,
/// each computed both from the closed forms (with x = e^{-i theta},
/// z = e^{-i eta}) and from the defining products.
struct FuerstenbergCertificate {
  BandParameters p;
  double theta = 0.0;
  double eta = 0.0;
  Eigen::Matrix2cd c, e, l, j, k;
  double trace_k = 0.0;
  double max_eigenvalue_k = 0.0;
  std::map<std::string, double> identity_defects;

  bool noncompact_witnessed() const { return max_eigenvalue_k > 1.0 + 1e-9; }
  std::string to_json() const;
};

FuerstenbergCertificate group_elements(double theta, double eta, BandParameters p);

/// ||K^n||^{1/n}; exceeds 1 when theta != eta (unbounded group orbit).
double noncompactness_probe(double theta, double eta, BandParameters p,
                            std::int64_t powers);

}  // namespace uband
