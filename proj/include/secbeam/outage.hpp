#ifndef SECBEAM_OUTAGE_HPP
#define SECBEAM_OUTAGE_HPP

// Probabilistic (outage) design.  Gaussian CSI errors are handled through
// Bernstein-type concentration rows: each chance constraint on a Hermitian
// quadratic of a standard complex Gaussian is replaced by a safe conic
// approximation.  This header emits those rows and assembles the fixed-z
// inner problems (power minimization and max-min harvesting), where z
// parameterizes the SU rate through an equality coupling.

#include <secbeam/worstcase.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace secbeam {

// The quadratics certified here all have the factored shape
//   f(u) = u' (S' P S) u + 2 Re(u' S' P v) + c(vars),   u ~ CN(0, I),
// with S a fixed square root of the error covariance, v the channel
// estimate, and P an affine combination of the design matrices.
struct BernsteinRows {
  int u1 = -1;         // norm slack; the SOC keeps it nonnegative
  int u2 = -1;         // eigenvalue-shift slack, lb 0
  int linear_row = -1; // index into ineq_constraints
  int soc_row = -1;    // index into soc_constraints, -1 when collapsed
  int lmi_row = -1;    // index into lmi_constraints, -1 when collapsed
};

using QuadTerms = std::vector<std::pair<detail::WHandle, double>>;

// Rows certifying Pr{f(u) >= 0} >= 1 - omega:
//   Tr(A) - sqrt(-2 ln omega) u1 + (ln omega) u2 + c >= 0,
//   ||[vec(A); sqrt(2) b]|| <= u1,   u2 I + A >= 0,   u2 >= 0.
// A zero covariance collapses to the deterministic row c >= 0.
inline BernsteinRows bernstein_lower(conic::ConicProgram& p, const QuadTerms& terms,
                                     const Eigen::MatrixXcd& sqrt_cov,
                                     const ComplexVector& center, const conic::LinExpr& c_expr,
                                     double omega, const std::string& tag) {
  if (!(omega > 0.0) || omega > 1.0)
    throw std::invalid_argument("bernstein_lower: outage probability must lie in (0,1]");
  const int n = static_cast<int>(sqrt_cov.rows());
  if (sqrt_cov.cols() != n || center.size() != n)
    throw std::invalid_argument("bernstein_lower: covariance/center shape mismatch");

  BernsteinRows out;
  if (sqrt_cov.size() == 0 || sqrt_cov.cwiseAbs().maxCoeff() == 0.0) {
    out.linear_row = static_cast<int>(p.ineq_constraints.size());
    p.ineq_constraints.push_back(c_expr);
    return out;
  }

  out.u1 = p.add_scalar_var("del_" + tag);
  out.u2 = p.add_scalar_var("nu_" + tag, 0.0);

  // Tr(A) = <S S', P>
  const Eigen::MatrixXcd cov = sqrt_cov * sqrt_cov.adjoint();
  conic::LinExpr row = c_expr;
  for (const auto& [h, a] : terms) h.add_to(row, HermitianMatrix(0.5 * (cov + cov.adjoint())), a);
  row.add(out.u1, -std::sqrt(-2.0 * std::log(omega)));
  row.add(out.u2, std::log(omega));
  out.linear_row = static_cast<int>(p.ineq_constraints.size());
  p.ineq_constraints.push_back(row);

  // stacked Frobenius norm: diagonal of A, then sqrt(2) Re/Im of the strict
  // lower triangle, then sqrt(2) (Re, Im) of b; every entry is <C, P> with a
  // symmetrized C so the expression stays real
  conic::SocConstraint soc;
  auto entry = [&](const Eigen::MatrixXcd& raw, double scale) {
    const Eigen::MatrixXcd ch = 0.5 * (raw + raw.adjoint());
    conic::LinExpr e;
    for (const auto& [h, a] : terms) h.add_to(e, HermitianMatrix(ch), scale * a);
    soc.vec.push_back(std::move(e));
  };
  for (int j = 0; j < n; ++j) {
    const ComplexVector sj = sqrt_cov.col(j);
    entry(sj * sj.adjoint(), 1.0);
    for (int i = j + 1; i < n; ++i) {
      const ComplexVector si = sqrt_cov.col(i);
      entry(sj * si.adjoint(), M_SQRT2);
      entry(cplx(0, -1) * sj * si.adjoint(), M_SQRT2);
    }
  }
  for (int i = 0; i < n; ++i) {
    const ComplexVector si = sqrt_cov.col(i);
    entry(center * si.adjoint(), M_SQRT2);
    entry(cplx(0, -1) * center * si.adjoint(), M_SQRT2);
  }
  soc.rhs.add(out.u1, 1.0);
  out.soc_row = static_cast<int>(p.soc_constraints.size());
  p.soc_constraints.push_back(std::move(soc));

  conic::LmiExpr lmi;
  lmi.dim = n;
  lmi.constant = HermitianMatrix::zero(n);
  lmi.scalar_terms.emplace_back(out.u2, HermitianMatrix::identity(n));
  for (const auto& [h, a] : terms) h.add_to(lmi, a, sqrt_cov);
  out.lmi_row = static_cast<int>(p.lmi_constraints.size());
  p.lmi_constraints.push_back(std::move(lmi));
  return out;
}

// Rows certifying Pr{f(u) <= 0} >= 1 - omega: the lower form on -f.
inline BernsteinRows bernstein_upper(conic::ConicProgram& p, const QuadTerms& terms,
                                     const Eigen::MatrixXcd& sqrt_cov,
                                     const ComplexVector& center, const conic::LinExpr& c_expr,
                                     double omega, const std::string& tag) {
  QuadTerms neg = terms;
  for (auto& [h, a] : neg) a = -a;
  conic::LinExpr nc;
  nc.constant = -c_expr.constant;
  for (const auto& [id, v] : c_expr.scalars) nc.add(id, -v);
  for (const auto& [id, cm] : c_expr.matrices) nc.add(id, HermitianMatrix(-cm.mat()));
  return bernstein_lower(p, neg, sqrt_cov, center, nc, omega, tag);
}

namespace detail {

inline Eigen::MatrixXcd error_sqrt_cov(double eps2, int n) {
  return psd_sqrt(HermitianMatrix(eps2 * Eigen::MatrixXcd::Identity(n, n))).mat();
}

} // namespace detail

// Per-EHR secrecy-outage rows at fixed z = 2^{-C_s}: the eavesdropping rate
// stays below C_s - R_min except with probability omega_r, written on
// M = (1 - 2^{R_min} z) Sigma - 2^{R_min} z W.
inline std::vector<BernsteinRows> build_outage_secrecy(conic::ConicProgram& p,
                                                       const detail::WHandle& w, int sigma,
                                                       double zv, const Scenario& sc,
                                                       const ChannelSet& ch) {
  const double f = std::exp2(sc.r_min) * zv;
  detail::WHandle sh;
  sh.matrix = sigma;
  std::vector<BernsteinRows> out;
  for (int k = 0; k < sc.n_ehr; ++k) {
    const QuadTerms terms = {{sh, 1.0 - f}, {w, -f}};
    const HermitianMatrix gg(ch.g[k] * ch.g[k].adjoint());
    conic::LinExpr c;
    c.constant = (1.0 - f) * sc.sigma_e2;
    w.add_to(c, gg, -f);
    c.add(sigma, HermitianMatrix((1.0 - f) * gg.mat()));
    out.push_back(bernstein_lower(p, terms, detail::error_sqrt_cov(sc.errors.eps2_e[k], sc.n_t),
                                  ch.g[k], c, sc.outage.secrecy, "r_" + std::to_string(k)));
  }
  return out;
}

// Per-EHR harvested-energy floor with outage budget omega_{e,k} on
// P = W + Sigma.  The target is psi_e[k]/eta, or target_var/eta when
// target_var >= 0.
inline std::vector<BernsteinRows> build_outage_eh(conic::ConicProgram& p,
                                                  const detail::WHandle& w, int sigma,
                                                  int target_var, const Scenario& sc,
                                                  const ChannelSet& ch) {
  detail::WHandle sh;
  sh.matrix = sigma;
  std::vector<BernsteinRows> out;
  for (int k = 0; k < sc.n_ehr; ++k) {
    const QuadTerms terms = {{w, 1.0}, {sh, 1.0}};
    const HermitianMatrix gg(ch.g[k] * ch.g[k].adjoint());
    conic::LinExpr c;
    c.constant = sc.sigma_e2 - (target_var >= 0 ? 0.0 : sc.psi_e[k] / sc.eta);
    if (target_var >= 0) c.add(target_var, -1.0 / sc.eta);
    w.add_to(c, gg);
    c.add(sigma, gg);
    out.push_back(bernstein_lower(p, terms, detail::error_sqrt_cov(sc.errors.eps2_e[k], sc.n_t),
                                  ch.g[k], c, sc.outage.eh[k], "e_" + std::to_string(k)));
  }
  return out;
}

// Per-PU interference cap with outage budget omega_{I,i}.
inline std::vector<BernsteinRows> build_outage_interference(conic::ConicProgram& p,
                                                            const detail::WHandle& w, int sigma,
                                                            const Scenario& sc,
                                                            const ChannelSet& ch) {
  detail::WHandle sh;
  sh.matrix = sigma;
  std::vector<BernsteinRows> out;
  for (int i = 0; i < sc.n_pu; ++i) {
    const QuadTerms terms = {{w, 1.0}, {sh, 1.0}};
    const HermitianMatrix qq(ch.q[i] * ch.q[i].adjoint());
    conic::LinExpr c;
    c.constant = -sc.p_in[i];
    w.add_to(c, qq);
    c.add(sigma, qq);
    out.push_back(bernstein_upper(p, terms, detail::error_sqrt_cov(sc.errors.eps2_q[i], sc.n_t),
                                  ch.q[i], c, sc.outage.interference[i],
                                  "i_" + std::to_string(i)));
  }
  return out;
}

struct OutageSubproblem {
  ProblemKind kind = ProblemKind::PowerMin;
  double z = 1.0;
  conic::ConicProgram program;
  int w = -1;     // matrix var, or -1 when the direction is fixed
  int sigma = -1; // matrix var
  int t = -1;     // 1/rho
  int s = -1;     // harvest hyperbola auxiliary
  int gamma = -1; // common harvesting target (MaxMinEH only)
  int w_scale = -1;
  ComplexVector w_direction;
};

namespace detail {

// z definition as an equality: z (h'Wh + h'Sigma h + sigma_s2 + t sigma_sp2)
// equals the no-information part, i.e. z = 2^{-C_s}
inline void add_z_equality(conic::ConicProgram& p, const WHandle& w, int sigma, int t, double zv,
                           const Scenario& sc, const ChannelSet& ch) {
  const HermitianMatrix hh(ch.h * ch.h.adjoint());
  conic::LinExpr eq;
  eq.constant = (zv - 1.0) * sc.sigma_s2;
  eq.add(t, (zv - 1.0) * sc.sigma_sp2);
  w.add_to(eq, hh, zv);
  eq.add(sigma, HermitianMatrix((zv - 1.0) * hh.mat()));
  p.eq_constraints.push_back(eq);
}

inline void check_z(double zv) {
  if (!(zv > 0.0) || zv > 1.0)
    throw std::invalid_argument("outage subproblem: z must lie in (0,1]");
}

} // namespace detail

// Fixed-z inner problem: minimize total transmit power under the outage
// secrecy / EH / interference rows.
inline OutageSubproblem build_p10(double zv, const Scenario& sc, const ChannelSet& ch,
                                  const ComplexVector& fixed_dir = {}) {
  detail::check_z(zv);
  OutageSubproblem sp;
  sp.kind = ProblemKind::PowerMin;
  sp.z = zv;
  conic::ConicProgram& p = sp.program;
  detail::WHandle w;
  if (fixed_dir.size() == 0) {
    sp.w = p.add_matrix_var("W", sc.n_t);
    w.matrix = sp.w;
  } else {
    sp.w_scale = p.add_scalar_var("w_power", 0.0);
    sp.w_direction = fixed_dir.normalized();
    w.scalar = sp.w_scale;
    w.dir = sp.w_direction;
  }
  sp.sigma = p.add_matrix_var("Sigma", sc.n_t);
  sp.t = p.add_scalar_var("t", 1.0 + 1e-9);

  w.add_to(p.objective, HermitianMatrix::identity(sc.n_t));
  p.objective.add(sp.sigma, HermitianMatrix::identity(sc.n_t));

  detail::add_z_equality(p, w, sp.sigma, sp.t, zv, sc, ch);
  build_outage_secrecy(p, w, sp.sigma, zv, sc, ch);
  build_outage_eh(p, w, sp.sigma, -1, sc, ch);
  build_outage_interference(p, w, sp.sigma, sc, ch);
  sp.s = add_su_harvest_rows(p, w, sp.sigma, sp.t, sc, ch);
  add_power_budget(p, w, sp.sigma, sc);
  return sp;
}

// Fixed-z inner problem: maximize the common harvested-energy target of all
// EHRs (their individual floors are dropped).
inline OutageSubproblem build_p12(double zv, const Scenario& sc, const ChannelSet& ch,
                                  const ComplexVector& fixed_dir = {}) {
  detail::check_z(zv);
  OutageSubproblem sp;
  sp.kind = ProblemKind::MaxMinEH;
  sp.z = zv;
  conic::ConicProgram& p = sp.program;
  detail::WHandle w;
  if (fixed_dir.size() == 0) {
    sp.w = p.add_matrix_var("W", sc.n_t);
    w.matrix = sp.w;
  } else {
    sp.w_scale = p.add_scalar_var("w_power", 0.0);
    sp.w_direction = fixed_dir.normalized();
    w.scalar = sp.w_scale;
    w.dir = sp.w_direction;
  }
  sp.sigma = p.add_matrix_var("Sigma", sc.n_t);
  sp.t = p.add_scalar_var("t", 1.0 + 1e-9);
  sp.gamma = p.add_scalar_var("gamma_e", 0.0);

  p.objective.add(sp.gamma, -1.0); // maximize

  detail::add_z_equality(p, w, sp.sigma, sp.t, zv, sc, ch);
  build_outage_secrecy(p, w, sp.sigma, zv, sc, ch);
  build_outage_eh(p, w, sp.sigma, sp.gamma, sc, ch);
  build_outage_interference(p, w, sp.sigma, sc, ch);
  sp.s = add_su_harvest_rows(p, w, sp.sigma, sp.t, sc, ch);
  add_power_budget(p, w, sp.sigma, sc);
  return sp;
}

} // namespace secbeam

#endif
