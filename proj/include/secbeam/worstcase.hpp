#ifndef SECBEAM_WORSTCASE_HPP
#define SECBEAM_WORSTCASE_HPP

// Bounded-error (worst-case) design.  The eavesdropper/PU channels are known
// only up to a ball of radius xi around the estimate; each robust constraint
// is certified over the whole ball by an S-Procedure LMI.  This header builds
// the fixed-beta inner problems (power minimization and max-min harvesting)
// and provides the exact extremum of a quadratic over the error ball -- the
// trust-region subproblem -- used to verify the LMIs independently.

#include <secbeam/conic/ir.hpp>
#include <secbeam/metrics.hpp>
#include <secbeam/scenario.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace secbeam {

enum class ProblemKind { PowerMin, MaxMinEH };

namespace detail {

// The beamformer enters every constraint as <C, W> or basis'. W .basis.  When
// re-solving with the beamformer locked to a fixed unit direction u (W = p
// uu'), the same terms collapse to coefficients on the scalar power p.
struct WHandle {
  int matrix = -1;
  int scalar = -1;
  ComplexVector dir;

  void add_to(conic::LinExpr& e, const HermitianMatrix& c, double scale = 1.0) const {
    if (matrix >= 0)
      e.add(matrix, HermitianMatrix(scale * c.mat()));
    else
      e.add(scalar, scale * quadratic_form(c, dir));
  }
  void add_to(conic::LmiExpr& l, double scale, const Eigen::MatrixXcd& basis) const {
    if (matrix >= 0) {
      l.matrix_terms.push_back({matrix, scale, basis});
    } else {
      const ComplexVector v = basis.adjoint() * dir;
      l.scalar_terms.emplace_back(scalar, HermitianMatrix(scale * (v * v.adjoint())));
    }
  }
};

// [I, v]: congruence through it evaluates a quadratic at (v + delta) with
// delta running over the first block
inline Eigen::MatrixXcd ball_basis(const ComplexVector& v) {
  const int n = static_cast<int>(v.size());
  Eigen::MatrixXcd b(n, n + 1);
  b << Eigen::MatrixXcd::Identity(n, n), v;
  return b;
}

} // namespace detail

// SU-side rate row (own CSI is perfect) plus, per EHR, an LMI certifying the
// eavesdropping-rate cap over the whole error ball.  t stands for 1/rho.
// Returns the ids of the per-EHR multiplier slacks.
inline std::vector<int> build_secrecy_constraints(conic::ConicProgram& p,
                                                  const detail::WHandle& w, int sigma, int t,
                                                  double beta, const Scenario& sc,
                                                  const ChannelSet& ch,
                                                  const BoundedRadii& xi) {
  const double a = 1.0 - std::exp2(sc.r_min) * beta;
  const HermitianMatrix hh(ch.h * ch.h.adjoint());
  conic::LinExpr row;
  row.constant = a * sc.sigma_s2;
  row.add(t, a * sc.sigma_sp2);
  w.add_to(row, hh);
  row.add(sigma, HermitianMatrix(a * hh.mat()));
  p.ineq_constraints.push_back(row);

  std::vector<int> omegas;
  for (int k = 0; k < sc.n_ehr; ++k) {
    const int om = p.add_scalar_var("omega_" + std::to_string(k), 0.0);
    omegas.push_back(om);
    const int d = sc.n_t + 1;
    conic::LmiExpr lmi;
    lmi.dim = d;
    Eigen::MatrixXcd c0 = Eigen::MatrixXcd::Zero(d, d);
    c0(d - 1, d - 1) = (beta - 1.0) * sc.sigma_e2;
    lmi.constant = HermitianMatrix(c0);
    Eigen::MatrixXcd omc = Eigen::MatrixXcd::Identity(d, d);
    omc(d - 1, d - 1) = -xi.xi_e[k] * xi.xi_e[k];
    lmi.scalar_terms.emplace_back(om, HermitianMatrix(omc));
    // -(W - (beta-1) Sigma) evaluated at g + delta
    const Eigen::MatrixXcd lam = detail::ball_basis(ch.g[k]);
    w.add_to(lmi, -1.0, lam);
    lmi.matrix_terms.push_back({sigma, beta - 1.0, lam});
    p.lmi_constraints.push_back(lmi);
  }
  return omegas;
}

// Per-EHR harvested-energy floor over the error ball.  The target is the
// constant psi_e[k]/eta, or target_var/eta when target_var >= 0.
inline std::vector<int> build_eh_lmi(conic::ConicProgram& p, const detail::WHandle& w, int sigma,
                                     int target_var, const Scenario& sc, const ChannelSet& ch,
                                     const BoundedRadii& xi) {
  std::vector<int> mus;
  for (int k = 0; k < sc.n_ehr; ++k) {
    const int mu = p.add_scalar_var("mu_" + std::to_string(k), 0.0);
    mus.push_back(mu);
    const int d = sc.n_t + 1;
    conic::LmiExpr lmi;
    lmi.dim = d;
    Eigen::MatrixXcd c0 = Eigen::MatrixXcd::Zero(d, d);
    c0(d - 1, d - 1) = sc.sigma_e2 - (target_var >= 0 ? 0.0 : sc.psi_e[k] / sc.eta);
    lmi.constant = HermitianMatrix(c0);
    Eigen::MatrixXcd muc = Eigen::MatrixXcd::Identity(d, d);
    muc(d - 1, d - 1) = -xi.xi_e[k] * xi.xi_e[k];
    lmi.scalar_terms.emplace_back(mu, HermitianMatrix(muc));
    if (target_var >= 0) {
      Eigen::MatrixXcd tc = Eigen::MatrixXcd::Zero(d, d);
      tc(d - 1, d - 1) = -1.0 / sc.eta;
      lmi.scalar_terms.emplace_back(target_var, HermitianMatrix(tc));
    }
    const Eigen::MatrixXcd lam = detail::ball_basis(ch.g[k]);
    w.add_to(lmi, 1.0, lam);
    lmi.matrix_terms.push_back({sigma, 1.0, lam});
    p.lmi_constraints.push_back(lmi);
  }
  return mus;
}

// Per-PU interference cap over the error ball.
inline std::vector<int> build_interference_lmi(conic::ConicProgram& p, const detail::WHandle& w,
                                               int sigma, const Scenario& sc,
                                               const ChannelSet& ch, const BoundedRadii& xi) {
  std::vector<int> deltas;
  for (int i = 0; i < sc.n_pu; ++i) {
    const int de = p.add_scalar_var("delta_" + std::to_string(i), 0.0);
    deltas.push_back(de);
    const int d = sc.n_t + 1;
    conic::LmiExpr lmi;
    lmi.dim = d;
    Eigen::MatrixXcd c0 = Eigen::MatrixXcd::Zero(d, d);
    c0(d - 1, d - 1) = sc.p_in[i];
    lmi.constant = HermitianMatrix(c0);
    Eigen::MatrixXcd dc = Eigen::MatrixXcd::Identity(d, d);
    dc(d - 1, d - 1) = -xi.xi_p[i] * xi.xi_p[i];
    lmi.scalar_terms.emplace_back(de, HermitianMatrix(dc));
    const Eigen::MatrixXcd ups = detail::ball_basis(ch.q[i]);
    w.add_to(lmi, -1.0, ups);
    lmi.matrix_terms.push_back({sigma, -1.0, ups});
    p.lmi_constraints.push_back(lmi);
  }
  return deltas;
}

// Power-splitting harvest floor at the SU: the psi_s/(1-rho) hyperbola in
// t = 1/rho is handled through an auxiliary s with s(t-1) >= 1 written as a
// second-order cone.  Also caps t so rho stays inside (0,1).  Returns s.
inline int add_su_harvest_rows(conic::ConicProgram& p, const detail::WHandle& w, int sigma,
                               int t, const Scenario& sc, const ChannelSet& ch) {
  const int s = p.add_scalar_var("s");
  conic::SocConstraint soc;
  conic::LinExpr two;
  two.constant = 2.0;
  conic::LinExpr diff; // s - (t - 1)
  diff.constant = 1.0;
  diff.add(s, 1.0).add(t, -1.0);
  soc.vec = {two, diff};
  soc.rhs.constant = -1.0;
  soc.rhs.add(s, 1.0).add(t, 1.0);
  p.soc_constraints.push_back(soc);

  const HermitianMatrix hh(ch.h * ch.h.adjoint());
  conic::LinExpr row;
  row.constant = sc.sigma_s2 - sc.psi_s / sc.eta;
  row.add(s, -sc.psi_s / sc.eta);
  w.add_to(row, hh);
  row.add(sigma, hh);
  p.ineq_constraints.push_back(row);

  conic::LinExpr cap;
  cap.constant = 1e9;
  cap.add(t, -1.0);
  p.ineq_constraints.push_back(cap);
  return s;
}

inline void add_power_budget(conic::ConicProgram& p, const detail::WHandle& w, int sigma,
                             const Scenario& sc) {
  conic::LinExpr row;
  row.constant = sc.p_th;
  w.add_to(row, HermitianMatrix::identity(sc.n_t), -1.0);
  row.add(sigma, HermitianMatrix(-Eigen::MatrixXcd::Identity(sc.n_t, sc.n_t)));
  p.ineq_constraints.push_back(row);
}

struct WorstCaseSubproblem {
  ProblemKind kind = ProblemKind::PowerMin;
  double beta = 1.0;
  conic::ConicProgram program;
  int w = -1;      // matrix var, or -1 when the direction is fixed
  int sigma = -1;  // matrix var
  int t = -1;      // 1/rho
  int s = -1;      // harvest hyperbola auxiliary
  int tau = -1;    // max-min harvesting target (MaxMinEH only)
  int w_scale = -1;
  ComplexVector w_direction; // unit direction when w_scale >= 0
};

namespace detail {

inline WHandle make_w_handle(WorstCaseSubproblem& sp, conic::ConicProgram& p, int n_t,
                             const ComplexVector& fixed_dir) {
  WHandle w;
  if (fixed_dir.size() == 0) {
    sp.w = p.add_matrix_var("W", n_t);
    w.matrix = sp.w;
  } else {
    sp.w_scale = p.add_scalar_var("w_power", 0.0);
    sp.w_direction = fixed_dir.normalized();
    w.scalar = sp.w_scale;
    w.dir = sp.w_direction;
  }
  return w;
}

} // namespace detail

// Fixed-beta inner problem: minimize total transmit power under the robust
// secrecy / EH / interference constraints.  Passing fixed_dir restricts the
// beamformer to that direction (used by the randomization fallback).
inline WorstCaseSubproblem build_p3(double beta, const Scenario& sc, const ChannelSet& ch,
                                    const ComplexVector& fixed_dir = {}) {
  WorstCaseSubproblem sp;
  sp.kind = ProblemKind::PowerMin;
  sp.beta = beta;
  conic::ConicProgram& p = sp.program;
  const detail::WHandle w = detail::make_w_handle(sp, p, sc.n_t, fixed_dir);
  sp.sigma = p.add_matrix_var("Sigma", sc.n_t);
  sp.t = p.add_scalar_var("t", 1.0 + 1e-9);

  w.add_to(p.objective, HermitianMatrix::identity(sc.n_t));
  p.objective.add(sp.sigma, HermitianMatrix::identity(sc.n_t));

  const BoundedRadii xi = effective_radii(sc);
  build_secrecy_constraints(p, w, sp.sigma, sp.t, beta, sc, ch, xi);
  build_eh_lmi(p, w, sp.sigma, -1, sc, ch, xi);
  build_interference_lmi(p, w, sp.sigma, sc, ch, xi);
  sp.s = add_su_harvest_rows(p, w, sp.sigma, sp.t, sc, ch);
  add_power_budget(p, w, sp.sigma, sc);
  return sp;
}

// Fixed-beta inner problem: maximize the common harvested-energy target of
// all EHRs (their individual floors are dropped) under the same robust
// secrecy / interference / SU-harvest constraints.
inline WorstCaseSubproblem build_p7(double beta, const Scenario& sc, const ChannelSet& ch,
                                    const ComplexVector& fixed_dir = {}) {
  WorstCaseSubproblem sp;
  sp.kind = ProblemKind::MaxMinEH;
  sp.beta = beta;
  conic::ConicProgram& p = sp.program;
  const detail::WHandle w = detail::make_w_handle(sp, p, sc.n_t, fixed_dir);
  sp.sigma = p.add_matrix_var("Sigma", sc.n_t);
  sp.t = p.add_scalar_var("t", 1.0 + 1e-9);
  sp.tau = p.add_scalar_var("tau", 0.0);

  p.objective.add(sp.tau, -1.0); // maximize

  const BoundedRadii xi = effective_radii(sc);
  build_secrecy_constraints(p, w, sp.sigma, sp.t, beta, sc, ch, xi);
  build_eh_lmi(p, w, sp.sigma, sp.tau, sc, ch, xi);
  build_interference_lmi(p, w, sp.sigma, sc, ch, xi);
  sp.s = add_su_harvest_rows(p, w, sp.sigma, sp.t, sc, ch);
  add_power_budget(p, w, sp.sigma, sc);
  return sp;
}

// ---- exact quadratic extremum over the error ball ----

enum class ExtremumSense { Min, Max };

struct QuadraticExtremum {
  double value = 0.0;
  ComplexVector point;
};

// Exact extremum of delta' A delta + 2 Re(b' delta) + c over ||delta|| <= xi:
// the trust-region subproblem.  Solved through the eigendecomposition of A
// and safeguarded bisection on the secular equation; the hard case (no b
// component on the critical eigenspace) augments along that eigenvector.
inline QuadraticExtremum worst_case_quadratic(const HermitianMatrix& a, const ComplexVector& b,
                                              double c, double xi, ExtremumSense sense) {
  if (xi < 0 || !std::isfinite(xi))
    throw std::invalid_argument("worst_case_quadratic: radius must be finite and >= 0");
  if (a.dim() != static_cast<int>(b.size()))
    throw std::invalid_argument("worst_case_quadratic: dimension mismatch");
  if (sense == ExtremumSense::Max) {
    QuadraticExtremum r =
        worst_case_quadratic(HermitianMatrix(-a.mat()), ComplexVector(-b), -c, xi,
                             ExtremumSense::Min);
    r.value = -r.value;
    return r;
  }
  const int n = a.dim();
  QuadraticExtremum out;
  out.point = ComplexVector::Zero(n);
  auto f = [&](const ComplexVector& d) {
    return quadratic_form(a, d) + 2.0 * std::real(b.dot(d)) + c;
  };
  if (xi == 0.0) {
    out.value = c;
    return out;
  }

  const HermitianEig eig = eig_hermitian(a); // values descending
  const Eigen::VectorXd lam = eig.values;
  const ComplexVector bc = eig.vectors.adjoint() * b;
  const double lmin = lam[n - 1];
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;

  // interior stationary point, valid only for A >= 0
  if (lmin >= -eps) {
    ComplexVector d = ComplexVector::Zero(n);
    bool solvable = true;
    for (int i = 0; i < n; ++i) {
      if (lam[i] > eps)
        d[i] = -bc[i] / lam[i];
      else if (std::abs(bc[i]) > 1e-10 * std::max(1.0, b.norm()))
        solvable = false;
    }
    if (solvable) {
      const ComplexVector cand = eig.vectors * d;
      if (cand.norm() <= xi) {
        out.point = cand;
        out.value = f(cand);
        return out;
      }
    }
  }

  // boundary solution: ||delta(nu)|| = xi on nu > max(0, -lmin) with
  // delta(nu) = -(A + nu I)^{-1} b
  const double nu0 = std::max(0.0, -lmin);
  auto norm2_at = [&](double nu) {
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double den = lam[i] + nu;
      s2 += std::norm(bc[i]) / std::max(den * den, 1e-300);
    }
    return s2;
  };

  double crit_b2 = 0.0, reg2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double den = lam[i] + nu0;
    if (den <= eps)
      crit_b2 += std::norm(bc[i]);
    else
      reg2 += std::norm(bc[i]) / (den * den);
  }

  ComplexVector point;
  if (crit_b2 <= 1e-20 * std::max(1.0, b.squaredNorm()) && reg2 <= xi * xi) {
    // hard case: fill the remaining radius along the critical eigenvector
    ComplexVector d = ComplexVector::Zero(n);
    for (int i = 0; i < n; ++i)
      if (lam[i] + nu0 > eps) d[i] = -bc[i] / (lam[i] + nu0);
    point = eig.vectors * d + std::sqrt(std::max(0.0, xi * xi - reg2)) * eig.vectors.col(n - 1);
  } else {
    double lo = nu0, hi = std::max(1.0, nu0 + b.norm() / xi);
    while (norm2_at(hi) > xi * xi) hi = nu0 + 2.0 * (hi - nu0);
    for (int iter = 0; iter < 300 && hi - lo > 1e-10 * std::max(1.0, hi); ++iter) {
      const double mid = 0.5 * (lo + hi);
      (norm2_at(mid) > xi * xi ? lo : hi) = mid;
    }
    const double nu = 0.5 * (lo + hi);
    ComplexVector d(n);
    for (int i = 0; i < n; ++i) d[i] = -bc[i] / (lam[i] + nu);
    point = eig.vectors * d;
  }
  if (point.norm() > xi) point *= xi / point.norm();
  out.point = point;
  out.value = f(point);
  return out;
}

} // namespace secbeam

#endif
