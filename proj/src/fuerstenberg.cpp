#include "uband/fuerstenberg.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "uband/angles.hpp"
#include "uband/transfer.hpp"

namespace uband {

using Complex = std::complex<double>;

RealLift tau_lift(const Eigen::Matrix2cd& m) {
  Eigen::Matrix2d i2 = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d j2;
  j2 << 0.0, 1.0, -1.0, 0.0;
  RealLift out;
  for (int bi = 0; bi < 2; ++bi)
    for (int bj = 0; bj < 2; ++bj)
      out.matrix.block<2, 2>(2 * bi, 2 * bj) =
          m(bi, bj).real() * i2 + m(bi, bj).imag() * j2;
  return out;
}

StructureMatrices structure_matrices(BandParameters p) {
  if (!(p.t > 0.0 && p.t < 1.0))
    throw std::domain_error("structure matrices require t in (0, 1)");
  const double rt = p.r / p.t;
  const double rt2 = (p.r * p.r) / (p.t * p.t);
  const double it2 = 1.0 / (p.t * p.t);
  StructureMatrices s;
  s.a0 << 0, 0, rt, 0,
          0, 0, 0, rt,
          rt, 0, 2 * rt2, 0,
          0, rt, 0, 2 * rt2;
  s.a1 << 0, 1, 0, rt,
          -1, 0, -rt, 0,
          0, rt, 0, -1,
          -rt, 0, 1, 0;
  s.a2 = -(s.a0 + Eigen::Matrix4d::Identity());
  s.b0 << 0, 0, 0, rt,
          0, 0, -rt, 0,
          0, 0, 0, rt2,
          0, 0, -rt2, 0;
  s.b1 << 0, 0, 0, 0,
          0, 0, 0, 0,
          0, 0, it2, 0,
          0, 0, 0, it2;
  s.b2 << 0, 0, 0, 0,
          0, 0, 0, 0,
          0, 0, 0, -it2,
          0, 0, it2, 0;
  return s;
}

Eigen::Matrix2cd transfer_dtheta(double theta, double eta, BandParameters p) {
  const double t = p.t;
  const double r = p.r;
  const Complex i(0.0, 1.0);
  const Complex eit = std::exp(Complex(0.0, theta));
  const Complex emie = std::exp(Complex(0.0, -eta));
  Eigen::Matrix2cd d;
  d(0, 0) = 0.0;
  d(0, 1) = (r / t) * i * eit * emie;
  d(1, 0) = 0.0;
  d(1, 1) = -i * eit / (t * t) + (r * r) / (t * t) * i * eit * emie;
  return d;
}

FuerstenbergCertificate group_elements(double theta, double eta,
                                       BandParameters p) {
  if (!(p.t > 0.0 && p.t < 1.0))
    throw std::domain_error("group elements require t in (0, 1)");
  const double t = p.t;
  const double r = p.r;
  const Complex x = std::exp(Complex(0.0, -theta));
  const Complex z = std::exp(Complex(0.0, -eta));
  const Complex xzb = x * std::conj(z);
  const Complex xbz = std::conj(x) * z;
  const double q2 = (r * r) / (t * t);

  FuerstenbergCertificate cert;
  cert.p = p;
  cert.theta = theta;
  cert.eta = eta;

  cert.c << xzb, 0.0, (r / t) * (xzb - 1.0), 1.0;
  cert.e << 1.0, (r / t) * (1.0 - xbz), 0.0, xbz;
  cert.l << xzb, (r / t) * (xzb - 1.0),
            (r / t) * (xzb - 1.0), xbz - q2 * std::norm(xzb - 1.0);
  cert.j << xzb - q2 * std::norm(xbz - 1.0), (r / t) * (1.0 - xbz),
            (r / t) * (1.0 - xbz), xbz;
  cert.k = cert.j.inverse() * cert.l;

  const Eigen::Matrix2cd t_tt = transfer_matrix(theta, theta, p).m;
  const Eigen::Matrix2cd c_prod = t_tt * transfer_matrix(theta, eta, p).m.inverse();
  const Eigen::Matrix2cd e_prod = transfer_matrix(eta, theta, p).m.inverse() * t_tt;

  auto maxabs = [](const Eigen::Matrix2cd& m) { return m.cwiseAbs().maxCoeff(); };
  auto& d = cert.identity_defects;
  d["c_closed_vs_product"] = maxabs(cert.c - c_prod);
  d["e_closed_vs_product"] = maxabs(cert.e - e_prod);
  d["l_closed_vs_product"] = maxabs(cert.l - c_prod * e_prod);
  d["j_closed_vs_product"] = maxabs(cert.j - e_prod * c_prod);
  d["jinv_minus_lstar"] = maxabs(cert.j.inverse() - cert.l.adjoint());
  d["det_l"] = std::abs(cert.l.determinant() - 1.0);
  d["det_j"] = std::abs(cert.j.determinant() - 1.0);
  d["det_k"] = std::abs(cert.k.determinant() - 1.0);
  d["k_selfadjoint"] = maxabs(cert.k - cert.k.adjoint());

  cert.trace_k = cert.k.trace().real();
  const double ref_trace = 2.0 + (r * r) / (t * t * t * t) *
                                     std::pow(std::abs(xzb - 1.0), 4);
  d["trace_formula"] = std::abs(cert.trace_k - ref_trace);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(
      0.5 * (cert.k + cert.k.adjoint()));
  cert.max_eigenvalue_k = es.eigenvalues().maxCoeff();
  return cert;
}

double noncompactness_probe(double theta, double eta, BandParameters p,
                            std::int64_t powers) {
  if (circular_distance(theta, eta) < 1e-12)
    throw std::domain_error("degenerate input: theta == eta gives K = I");
  if (powers < 1) throw std::invalid_argument("powers must be >= 1");
  const FuerstenbergCertificate cert = group_elements(theta, eta, p);
  Eigen::Matrix2cd pw = Eigen::Matrix2cd::Identity();
  double log_norm = 0.0;
  for (std::int64_t n = 0; n < powers; ++n) {
    pw = cert.k * pw;
    const double s = pw.norm();
    pw /= s;
    log_norm += std::log(s);
  }
  // Frobenius-to-spectral correction stays bounded; the 1/n root removes it.
  return std::exp(log_norm / static_cast<double>(powers));
}

std::string FuerstenbergCertificate::to_json() const {
  nlohmann::json j2;
  j2["t"] = p.t;
  j2["r"] = p.r;
  j2["theta"] = theta;
  j2["eta"] = eta;
  j2["trace_K"] = trace_k;
  j2["max_eigenvalue_K"] = max_eigenvalue_k;
  j2["noncompact_witnessed"] = noncompact_witnessed();
  for (const auto& [name, v] : identity_defects) j2["defects"][name] = v;
  auto dump2 = [](const Eigen::Matrix2cd& m) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < 2; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int jj = 0; jj < 2; ++jj)
        row.push_back({m(i, jj).real(), m(i, jj).imag()});
      arr.push_back(row);
    }
    return arr;
  };
  j2["C"] = dump2(c);
  j2["E"] = dump2(e);
  j2["L"] = dump2(l);
  j2["J"] = dump2(j);
  j2["K"] = dump2(k);
  return j2.dump(2);
}

}  // namespace uband
