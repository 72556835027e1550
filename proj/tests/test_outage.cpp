#include <catch2/catch_amalgamated.hpp>

#include <secbeam/conic/solver.hpp>
#include <secbeam/outage.hpp>

#include <cmath>

using namespace secbeam;

namespace {

Eigen::MatrixXcd random_psd(RngStream& rng, int n, double scale) {
  Eigen::MatrixXcd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = rng.cnormal();
  return scale * (r * r.adjoint() / n + 0.05 * Eigen::MatrixXcd::Identity(n, n));
}

// eq rows fixing every coordinate of a Hermitian matrix variable
void pin_matrix(conic::ConicProgram& p, int var, const Eigen::MatrixXcd& tgt) {
  const int n = static_cast<int>(tgt.rows());
  for (int j = 0; j < n; ++j) {
    {
      Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
      c(j, j) = 1.0;
      conic::LinExpr e;
      e.constant = -tgt(j, j).real();
      e.add(var, HermitianMatrix(c));
      p.eq_constraints.push_back(e);
    }
    for (int i = j + 1; i < n; ++i) {
      Eigen::MatrixXcd cs = Eigen::MatrixXcd::Zero(n, n);
      cs(i, j) = cs(j, i) = 1.0;
      conic::LinExpr es;
      es.constant = -2.0 * tgt(i, j).real();
      es.add(var, HermitianMatrix(cs));
      p.eq_constraints.push_back(es);
      Eigen::MatrixXcd ck = Eigen::MatrixXcd::Zero(n, n);
      ck(i, j) = cplx(0, 1);
      ck(j, i) = cplx(0, -1);
      conic::LinExpr ek;
      ek.constant = -2.0 * tgt(i, j).imag();
      ek.add(var, HermitianMatrix(ck));
      p.eq_constraints.push_back(ek);
    }
  }
}

// smallest c admitted by the concentration rows, by direct reasoning: the
// norm slack sits at the stacked norm and the shift slack at max(0, -lmin(A))
double min_offset(const Eigen::MatrixXcd& a, const ComplexVector& b, double omega) {
  const HermitianMatrix ah(0.5 * (a + a.adjoint()));
  const double lmin = eig_hermitian(ah).values[ah.dim() - 1];
  const double stacked = std::sqrt(a.squaredNorm() + 2.0 * b.squaredNorm());
  return -ah.mat().trace().real() + std::sqrt(-2.0 * std::log(omega)) * stacked -
         std::log(omega) * std::max(0.0, -lmin);
}

// smallest certified c found by an actual solve of the emitted rows, with the
// quadratic synthesized as the difference of two pinned PSD variables
double min_offset_via_rows(const Eigen::MatrixXcd& pos, const Eigen::MatrixXcd& neg,
                           const ComplexVector& center, double omega) {
  const int n = static_cast<int>(pos.rows());
  conic::ConicProgram p;
  detail::WHandle h1, h2;
  h1.matrix = p.add_matrix_var("P1", n);
  h2.matrix = p.add_matrix_var("P2", n);
  pin_matrix(p, h1.matrix, pos);
  pin_matrix(p, h2.matrix, neg);
  const int cv = p.add_scalar_var("c");
  conic::LinExpr ce;
  ce.add(cv, 1.0);
  const QuadTerms terms = {{h1, 1.0}, {h2, -1.0}};
  bernstein_lower(p, terms, Eigen::MatrixXcd::Identity(n, n), center, ce, omega, "t");
  p.objective.add(cv, 1.0);
  const conic::ConicSolution sol = conic::solve(p, 1e-9);
  REQUIRE(sol.status == conic::SolveStatus::Optimal);
  return sol.objective;
}

} // namespace

// ---- concentration rows ----

TEST_CASE("certified offset: identity quadratic at five percent outage", "[outage]") {
  const double omega = 0.05;
  REQUIRE(std::sqrt(-2.0 * std::log(omega)) == Catch::Approx(2.44775).margin(1e-5));
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(2, 2);
  const double direct = min_offset(eye, ComplexVector::Zero(2), omega);
  REQUIRE(direct == Catch::Approx(-2.0 + std::sqrt(-2.0 * std::log(omega)) * M_SQRT2)
                        .margin(1e-12));
  REQUIRE(direct == Catch::Approx(1.4616).margin(1e-3));
  const double solved =
      min_offset_via_rows(eye, Eigen::MatrixXcd::Zero(2, 2), ComplexVector::Zero(2), omega);
  REQUIRE(solved == Catch::Approx(direct).margin(1e-6));
}

TEST_CASE("certified offset: emitted rows reach the analytic minimum", "[outage]") {
  RngStream rng(31, 7);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 2 + trial % 2;
    const double omega = (trial % 2 == 0) ? 0.05 : 0.01;
    const Eigen::MatrixXcd pos = random_psd(rng, n, 1.0);
    const Eigen::MatrixXcd neg = random_psd(rng, n, 0.8);
    const ComplexVector v = rng.cnormal_vector(n);
    const Eigen::MatrixXcd a = pos - neg;
    const double direct = min_offset(a, a * v, omega);
    const double solved = min_offset_via_rows(pos, neg, v, omega);
    REQUIRE(solved == Catch::Approx(direct).margin(1e-6 * std::max(1.0, std::abs(direct))));
  }
}

TEST_CASE("certified offset keeps the chance constraint safe", "[outage]") {
  RngStream rng(32, 11);
  const int draws = 100000;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 2;
    const double omega = (trial % 3 == 0) ? 0.01 : (trial % 3 == 1 ? 0.05 : 0.1);
    const Eigen::MatrixXcd a = random_psd(rng, n, 1.0) - random_psd(rng, n, 1.2);
    const HermitianMatrix ah(0.5 * (a + a.adjoint()));
    const ComplexVector v = rng.cnormal_vector(n);
    const ComplexVector b = ah.mat() * v;

    // lower form: f(u) + c >= 0 except with probability omega
    const double c_low = min_offset(ah.mat(), b, omega);
    // upper form is the lower form on the negated quadratic
    const double c_up = -min_offset(-ah.mat(), -b, omega);

    int ok_low = 0, ok_up = 0;
    for (int d = 0; d < draws; ++d) {
      const ComplexVector u = rng.cnormal_vector(n);
      const double f = quadratic_form(ah, u) + 2.0 * std::real(b.dot(u));
      if (f + c_low >= 0.0) ++ok_low;
      if (f + c_up <= 0.0) ++ok_up;
    }
    const double band = 3.0 * std::sqrt(omega * (1.0 - omega) / draws);
    REQUIRE(static_cast<double>(ok_low) / draws >= 1.0 - omega - band);
    REQUIRE(static_cast<double>(ok_up) / draws >= 1.0 - omega - band);
  }
}

// ---- builder structure ----

namespace {

Scenario gaussian_scenario(int n_t, int n_ehr, int n_pu, double eps2_e, double eps2_q) {
  Scenario s = default_scenario(n_t);
  s.n_ehr = n_ehr;
  s.n_pu = n_pu;
  s.p_in.assign(n_pu, db_to_watts(-10.0));
  s.psi_e.assign(n_ehr, 0.05);
  s.outage.eh.assign(n_ehr, 0.05);
  s.outage.interference.assign(n_pu, 0.05);
  s.errors.model = ErrorSpec::Model::Gaussian;
  s.errors.eps2_e.assign(n_ehr, eps2_e);
  s.errors.eps2_q.assign(n_pu, eps2_q);
  return s;
}

struct EmittedCheck {
  Eigen::MatrixXcd a;
  ComplexVector b;
  double c = 0.0;
};

// reference (A, b, c) of a quadratic in the normalized error for P affine in
// the assignment and a fixed estimate
EmittedCheck reference_quadratic(const Eigen::MatrixXcd& p_mat, const ComplexVector& bar,
                                 double eps2, double c_extra) {
  EmittedCheck r;
  const int n = static_cast<int>(bar.size());
  const Eigen::MatrixXcd s = std::sqrt(eps2) * Eigen::MatrixXcd::Identity(n, n);
  r.a = s.adjoint() * p_mat * s;
  r.b = s.adjoint() * p_mat * bar;
  r.c = (bar.adjoint() * p_mat * bar).value().real() + c_extra;
  return r;
}

void check_rows(const conic::ConicProgram& p, const BernsteinRows& rows,
                const conic::Assignment& asg, const EmittedCheck& ref, double omega) {
  const double u1 = asg.scalars[rows.u1];
  const double u2 = asg.scalars[rows.u2];
  const double lin = conic::evaluate(p.ineq_constraints[rows.linear_row], asg);
  const double want = ref.a.trace().real() - std::sqrt(-2.0 * std::log(omega)) * u1 +
                      std::log(omega) * u2 + ref.c;
  REQUIRE(lin == Catch::Approx(want).margin(1e-10 * std::max(1.0, std::abs(want))));

  const conic::SocConstraint& soc = p.soc_constraints[rows.soc_row];
  double nrm2 = 0.0;
  for (const conic::LinExpr& e : soc.vec) {
    const double val = conic::evaluate(e, asg);
    nrm2 += val * val;
  }
  const double stacked2 = ref.a.squaredNorm() + 2.0 * ref.b.squaredNorm();
  REQUIRE(std::sqrt(nrm2) == Catch::Approx(std::sqrt(stacked2)).margin(1e-9));
  REQUIRE(conic::evaluate(soc.rhs, asg) == Catch::Approx(u1).margin(1e-12));

  const Eigen::MatrixXcd lmi = conic::evaluate(p.lmi_constraints[rows.lmi_row], asg);
  const Eigen::MatrixXcd want_lmi =
      u2 * Eigen::MatrixXcd::Identity(lmi.rows(), lmi.cols()) + ref.a;
  REQUIRE((lmi - want_lmi).cwiseAbs().maxCoeff() < 1e-10);
}

} // namespace

TEST_CASE("outage rows evaluate to their concentration form", "[outage]") {
  const Scenario sc = gaussian_scenario(3, 2, 2, 0.02, 0.008);
  RngStream rng(sc.rng_seed, 3);
  const ChannelSet ch = sample_channels(sc, rng);
  const double f_exact = std::exp2(-sc.r_min); // makes the AN term drop out

  for (double zv : {0.3, f_exact}) {
    conic::ConicProgram p;
    detail::WHandle w;
    w.matrix = p.add_matrix_var("W", sc.n_t);
    const int sigma = p.add_matrix_var("Sigma", sc.n_t);
    const int gamma = p.add_scalar_var("gamma_e", 0.0);
    const auto sec = build_outage_secrecy(p, w, sigma, zv, sc, ch);
    const auto eh = build_outage_eh(p, w, sigma, gamma, sc, ch);
    const auto intf = build_outage_interference(p, w, sigma, sc, ch);
    REQUIRE(sec.size() == 2);
    REQUIRE(eh.size() == 2);
    REQUIRE(intf.size() == 2);

    RngStream vals(9, 21);
    for (int pass = 0; pass < 2; ++pass) {
      conic::Assignment asg;
      asg.matrices = {random_psd(vals, sc.n_t, 0.7), random_psd(vals, sc.n_t, 0.4)};
      asg.scalars.assign(p.scalar_vars.size(), 0.0);
      for (size_t i = 0; i < asg.scalars.size(); ++i) asg.scalars[i] = 0.5 + vals.uniform();

      const Eigen::MatrixXcd& w0 = asg.matrices[0];
      const Eigen::MatrixXcd& sig0 = asg.matrices[1];
      const double f = std::exp2(sc.r_min) * zv;
      const Eigen::MatrixXcd m = (1.0 - f) * sig0 - f * w0;
      const Eigen::MatrixXcd pw = w0 + sig0;

      for (int k = 0; k < sc.n_ehr; ++k) {
        check_rows(p, sec[k],  asg,
                   reference_quadratic(m, ch.g[k], sc.errors.eps2_e[k], (1.0 - f) * sc.sigma_e2),
                   sc.outage.secrecy);
        check_rows(p, eh[k], asg,
                   reference_quadratic(pw, ch.g[k], sc.errors.eps2_e[k],
                                       sc.sigma_e2 - asg.scalars[gamma] / sc.eta),
                   sc.outage.eh[k]);
      }
      for (int i = 0; i < sc.n_pu; ++i) {
        EmittedCheck ref =
            reference_quadratic(pw, ch.q[i], sc.errors.eps2_q[i], -sc.p_in[i]);
        ref.a = -ref.a;
        ref.b = -ref.b;
        ref.c = -ref.c;
        check_rows(p, intf[i], asg, ref, sc.outage.interference[i]);
      }
    }

    if (zv == f_exact) {
      // with 2^{R_min} z = 1 the secrecy quadratic no longer sees the AN
      conic::Assignment a1, a2;
      a1.matrices = {random_psd(rng, sc.n_t, 0.5), random_psd(rng, sc.n_t, 0.5)};
      a2.matrices = {a1.matrices[0], random_psd(rng, sc.n_t, 0.9)};
      a1.scalars.assign(p.scalar_vars.size(), 1.0);
      a2.scalars = a1.scalars;
      for (const auto& rows : sec) {
        const double v1 = conic::evaluate(p.ineq_constraints[rows.linear_row], a1);
        const double v2 = conic::evaluate(p.ineq_constraints[rows.linear_row], a2);
        REQUIRE(v1 == Catch::Approx(v2).margin(1e-12));
      }
    }
  }
}

TEST_CASE("zero covariance collapses to the deterministic rows", "[outage]") {
  const Scenario sc = gaussian_scenario(2, 1, 1, 0.0, 0.0);
  RngStream rng(sc.rng_seed, 3);
  const ChannelSet ch = sample_channels(sc, rng);
  const double zv = 0.4;
  const double f = std::exp2(sc.r_min) * zv;

  conic::ConicProgram p;
  detail::WHandle w;
  w.matrix = p.add_matrix_var("W", sc.n_t);
  const int sigma = p.add_matrix_var("Sigma", sc.n_t);
  const auto sec = build_outage_secrecy(p, w, sigma, zv, sc, ch);
  const auto eh = build_outage_eh(p, w, sigma, -1, sc, ch);
  const auto intf = build_outage_interference(p, w, sigma, sc, ch);

  REQUIRE(p.scalar_vars.empty());
  REQUIRE(p.soc_constraints.empty());
  REQUIRE(p.lmi_constraints.empty());
  REQUIRE(p.ineq_constraints.size() == 3);
  for (const auto& rows : {sec[0], eh[0], intf[0]}) {
    REQUIRE(rows.u1 == -1);
    REQUIRE(rows.soc_row == -1);
    REQUIRE(rows.lmi_row == -1);
  }

  const HermitianMatrix gg(ch.g[0] * ch.g[0].adjoint());
  const HermitianMatrix qq(ch.q[0] * ch.q[0].adjoint());

  conic::LinExpr want_sec;
  want_sec.constant = (1.0 - f) * sc.sigma_e2;
  want_sec.add(w.matrix, HermitianMatrix(-f * gg.mat()));
  want_sec.add(sigma, HermitianMatrix((1.0 - f) * gg.mat()));
  REQUIRE(p.ineq_constraints[sec[0].linear_row] == want_sec);

  conic::LinExpr want_eh;
  want_eh.constant = sc.sigma_e2 - sc.psi_e[0] / sc.eta;
  want_eh.add(w.matrix, gg);
  want_eh.add(sigma, gg);
  REQUIRE(p.ineq_constraints[eh[0].linear_row] == want_eh);

  conic::LinExpr want_intf;
  want_intf.constant = sc.p_in[0];
  want_intf.add(w.matrix, HermitianMatrix(-qq.mat()));
  want_intf.add(sigma, HermitianMatrix(-qq.mat()));
  REQUIRE(p.ineq_constraints[intf[0].linear_row] == want_intf);
}

// ---- fixed-z subproblems ----

namespace {

double solve_objective(const OutageSubproblem& sp, conic::ConicSolution* out = nullptr) {
  const conic::ConicSolution sol = conic::solve(sp.program, 1e-8);
  if (out) *out = sol;
  if (sol.status == conic::SolveStatus::Optimal) return sol.objective;
  return std::numeric_limits<double>::infinity();
}

// first z in a coarse list that solves, or 0 when none does
double probe_feasible_z(const Scenario& sc, const ChannelSet& ch, bool maxmin) {
  for (double zv : {0.12, 0.18, 0.25, 0.32, 0.4, 0.48}) {
    const OutageSubproblem sp = maxmin ? build_p12(zv, sc, ch) : build_p10(zv, sc, ch);
    if (std::isfinite(solve_objective(sp))) return zv;
  }
  return 0.0;
}

} // namespace

TEST_CASE("power minimization: boundary z is infeasible at a positive rate floor",
          "[outage]") {
  const Scenario sc = gaussian_scenario(2, 2, 1, 0.01, 0.005);
  RngStream rng(4, 3);
  const ChannelSet ch = sample_channels(sc, rng);
  REQUIRE(sc.r_min > 0.0);
  const OutageSubproblem sp = build_p10(1.0, sc, ch);
  const conic::ConicSolution sol = conic::solve(sp.program, 1e-8);
  REQUIRE(sol.status == conic::SolveStatus::Infeasible);
  REQUIRE_THROWS_AS(build_p10(0.0, sc, ch), std::invalid_argument);
  REQUIRE_THROWS_AS(build_p10(1.5, sc, ch), std::invalid_argument);
}

TEST_CASE("power minimization: solution ties z to the achieved rate split", "[outage]") {
  Scenario sc = gaussian_scenario(2, 2, 1, 0.01, 0.005);
  sc.r_min = 1.0;
  sc.psi_e.assign(sc.n_ehr, 0.01);
  sc.psi_s = 0.02;
  RngStream rng(13, 3);
  const ChannelSet ch = sample_channels(sc, rng);
  const double zv = probe_feasible_z(sc, ch, false);
  REQUIRE(zv > 0.0);

  const OutageSubproblem sp = build_p10(zv, sc, ch);
  conic::ConicSolution sol;
  const double obj = solve_objective(sp, &sol);
  REQUIRE(std::isfinite(obj));

  const Eigen::MatrixXcd& w0 = sol.assignment.matrices[sp.w];
  const Eigen::MatrixXcd& sig0 = sol.assignment.matrices[sp.sigma];
  const double t0 = sol.assignment.scalars[sp.t];
  REQUIRE(t0 >= 1.0);

  // the equality row encodes z = 2^{-C_s} for the power-split SU rate
  const double sig_pow = (ch.h.adjoint() * w0 * ch.h).value().real();
  const double noise = (ch.h.adjoint() * sig0 * ch.h).value().real() + sc.sigma_s2 +
                       t0 * sc.sigma_sp2;
  const double cs = std::log2(1.0 + sig_pow / noise);
  REQUIRE(std::exp2(-cs) == Catch::Approx(zv).margin(1e-6));

  // total power matches the reported objective
  REQUIRE(obj == Catch::Approx(w0.trace().real() + sig0.trace().real()).margin(1e-7));
}

TEST_CASE("solved designs respect their outage budgets", "[outage]") {
  Scenario sc = gaussian_scenario(2, 2, 1, 0.02, 0.01);
  sc.r_min = 1.0;
  sc.psi_e.assign(sc.n_ehr, 0.01);
  sc.psi_s = 0.02;
  sc.outage.secrecy = 0.1;
  sc.outage.eh.assign(sc.n_ehr, 0.1);
  sc.outage.interference.assign(sc.n_pu, 0.1);
  RngStream rng(16, 3);
  const ChannelSet ch = sample_channels(sc, rng);
  const double zv = probe_feasible_z(sc, ch, false);
  REQUIRE(zv > 0.0);

  const OutageSubproblem sp = build_p10(zv, sc, ch);
  conic::ConicSolution sol;
  REQUIRE(std::isfinite(solve_objective(sp, &sol)));
  const Eigen::MatrixXcd& w0 = sol.assignment.matrices[sp.w];
  const Eigen::MatrixXcd& sig0 = sol.assignment.matrices[sp.sigma];

  const double f = std::exp2(sc.r_min) * zv;
  const Eigen::MatrixXcd m = (1.0 - f) * sig0 - f * w0;
  const Eigen::MatrixXcd pw = w0 + sig0;

  RngStream draws(77, 5);
  const int n_draws = 20000;
  int bad_sec = 0, bad_eh = 0, bad_intf = 0;
  for (int d = 0; d < n_draws; ++d) {
    for (int k = 0; k < sc.n_ehr; ++k) {
      const ComplexVector g =
          ch.g[k] + std::sqrt(sc.errors.eps2_e[k]) * draws.cnormal_vector(sc.n_t);
      const double sec_val = (g.adjoint() * m * g).value().real() + (1.0 - f) * sc.sigma_e2;
      if (sec_val < 0.0) {
        ++bad_sec;
        break;
      }
    }
    for (int k = 0; k < sc.n_ehr; ++k) {
      const ComplexVector g =
          ch.g[k] + std::sqrt(sc.errors.eps2_e[k]) * draws.cnormal_vector(sc.n_t);
      const double harvested =
          sc.eta * ((g.adjoint() * pw * g).value().real() + sc.sigma_e2);
      if (harvested < sc.psi_e[k] - 1e-12) {
        ++bad_eh;
        break;
      }
    }
    for (int i = 0; i < sc.n_pu; ++i) {
      const ComplexVector q =
          ch.q[i] + std::sqrt(sc.errors.eps2_q[i]) * draws.cnormal_vector(sc.n_t);
      if ((q.adjoint() * pw * q).value().real() > sc.p_in[i] + 1e-12) {
        ++bad_intf;
        break;
      }
    }
  }
  // joint violation stays within the sum of per-link budgets (conservative
  // rows keep the empirical rate far below it; the band guards MC noise)
  auto cap = [&](double budget, int links) {
    return links * budget + 3.0 * std::sqrt(budget * (1.0 - budget) / n_draws);
  };
  REQUIRE(static_cast<double>(bad_sec) / n_draws <= cap(sc.outage.secrecy, sc.n_ehr));
  REQUIRE(static_cast<double>(bad_eh) / n_draws <= cap(sc.outage.eh[0], sc.n_ehr));
  REQUIRE(static_cast<double>(bad_intf) / n_draws <= cap(sc.outage.interference[0], sc.n_pu));
}

TEST_CASE("power minimization: looser secrecy outage never costs power", "[outage]") {
  Scenario sc = gaussian_scenario(3, 2, 1, 0.01, 0.004);
  sc.r_min = 1.0;
  sc.psi_e.assign(sc.n_ehr, 0.01);
  sc.psi_s = 0.02;
  RngStream rng(19, 3);
  const ChannelSet ch = sample_channels(sc, rng);
  const double zv = probe_feasible_z(sc, ch, false);
  REQUIRE(zv > 0.0);

  double prev = -std::numeric_limits<double>::infinity();
  for (double omega : {0.1, 0.05, 0.01}) {
    sc.outage.secrecy = omega;
    const double obj = solve_objective(build_p10(zv, sc, ch));
    REQUIRE(std::isfinite(obj));
    REQUIRE(obj >= prev - 1e-7);
    prev = obj;
  }
}

TEST_CASE("matched uncertainty: tiny-variance design approaches the bounded one",
          "[outage]") {
  const int n_t = 1;
  Scenario sc = gaussian_scenario(n_t, 1, 1, 1e-8, 1e-8);
  sc.r_min = 1.0;
  sc.psi_e.assign(1, 0.01);
  sc.psi_s = 0.02;
  sc.p_in.assign(1, 0.3);
  RngStream rng(3, 3);
  const ChannelSet ch = sample_channels(sc, rng);

  // probabilistic route: coarse z grid plus trisection on the best bracket
  auto solve_z = [&](double zv) { return solve_objective(build_p10(zv, sc, ch)); };
  double best_z = 0.0, best_obj = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 48; ++i) {
    const double zv = std::exp(std::log(1e-3) * (1.0 - i / 47.0));
    const double obj = solve_z(zv);
    if (obj < best_obj) {
      best_obj = obj;
      best_z = zv;
    }
  }
  REQUIRE(std::isfinite(best_obj));
  {
    double lo = best_z / 1.6, hi = std::min(1.0, best_z * 1.6);
    for (int it = 0; it < 25; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (solve_z(m1) < solve_z(m2))
        hi = m2;
      else
        lo = m1;
    }
    best_obj = std::min(best_obj, solve_z(0.5 * (lo + hi)));
  }

  // bounded route on the statistically matched ball
  Scenario scb = sc;
  scb.errors.model = ErrorSpec::Model::Bounded;
  const BoundedRadii radii = effective_radii(sc);
  scb.errors.xi_e = radii.xi_e;
  scb.errors.xi_p = radii.xi_p;
  auto solve_beta = [&](double beta) {
    const WorstCaseSubproblem sp = build_p3(beta, scb, ch);
    const conic::ConicSolution sol = conic::solve(sp.program, 1e-8);
    return sol.status == conic::SolveStatus::Optimal
               ? sol.objective
               : std::numeric_limits<double>::infinity();
  };
  const double beta_hi = 1.0 + sc.p_th * ch.h.squaredNorm() / sc.sigma_sp2;
  double best_beta = 1.0, best_b = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 48; ++i) {
    const double beta = std::exp(std::log(beta_hi) * i / 47.0);
    const double obj = solve_beta(beta);
    if (obj < best_b) {
      best_b = obj;
      best_beta = beta;
    }
  }
  REQUIRE(std::isfinite(best_b));
  {
    double lo = std::max(1.0, best_beta / 1.6), hi = std::min(beta_hi, best_beta * 1.6);
    for (int it = 0; it < 25; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (solve_beta(m1) < solve_beta(m2))
        hi = m2;
      else
        lo = m1;
    }
    best_b = std::min(best_b, solve_beta(0.5 * (lo + hi)));
  }

  // both collapse to the same perfect-CSI design as the uncertainty vanishes
  REQUIRE(best_obj == Catch::Approx(best_b).margin(1e-2 * std::max(1.0, best_b)));
}

TEST_CASE("max-min harvesting: zero transmit power leaves the noise floor", "[outage]") {
  Scenario sc = gaussian_scenario(2, 2, 1, 0.01, 0.005);
  sc.p_th = 0.0;
  sc.r_min = 0.0;
  sc.eta = 0.3;
  sc.psi_s = 0.005;
  RngStream rng(6, 3);
  const ChannelSet ch = sample_channels(sc, rng);

  const OutageSubproblem sp = build_p12(1.0, sc, ch);
  conic::ConicSolution sol;
  const double obj = solve_objective(sp, &sol);
  REQUIRE(std::isfinite(obj));
  REQUIRE(-obj == Catch::Approx(sc.eta * sc.sigma_e2).margin(1e-5));
  REQUIRE(sol.assignment.matrices[sp.w].trace().real() < 1e-6);
  REQUIRE(sol.assignment.matrices[sp.sigma].trace().real() < 1e-6);
}

TEST_CASE("max-min harvesting: raising the rate floor cannot raise the harvest",
          "[outage]") {
  Scenario sc = gaussian_scenario(3, 2, 1, 0.01, 0.004);
  sc.psi_s = 0.02;
  RngStream rng(23, 3);
  const ChannelSet ch = sample_channels(sc, rng);

  sc.r_min = 1.0;
  const double zv = probe_feasible_z(sc, ch, true);
  REQUIRE(zv > 0.0);

  double prev_harvest = std::numeric_limits<double>::infinity();
  for (double r_min : {0.25, 0.5, 1.0}) {
    sc.r_min = r_min;
    const double obj = solve_objective(build_p12(zv, sc, ch)); // -Gamma at optimum
    REQUIRE(std::isfinite(obj));
    REQUIRE(-obj <= prev_harvest + 1e-7);
    prev_harvest = -obj;
  }
}
