#include <catch2/catch_amalgamated.hpp>

#include <secbeam/conic/solver.hpp>
#include <secbeam/worstcase.hpp>

#include <limits>

using namespace secbeam;

namespace {

constexpr double kInfObj = std::numeric_limits<double>::infinity();

Scenario bounded_scenario(int n_t, int n_ehr, int n_pu, double xi_e, double xi_p) {
  Scenario s = default_scenario(n_t);
  s.n_ehr = n_ehr;
  s.n_pu = n_pu;
  s.p_in.assign(n_pu, db_to_watts(-10.0));
  s.psi_e.assign(n_ehr, 0.05);
  s.outage.eh.assign(n_ehr, 0.05);
  s.outage.interference.assign(n_pu, 0.05);
  s.errors.model = ErrorSpec::Model::Bounded;
  s.errors.xi_e.assign(n_ehr, xi_e);
  s.errors.xi_p.assign(n_pu, xi_p);
  s.errors.eps2_e.clear();
  s.errors.eps2_q.clear();
  return s;
}

Eigen::MatrixXcd random_pd(RngStream& rng, int n, double scale) {
  Eigen::MatrixXcd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = rng.cnormal();
  return scale * (r * r.adjoint() / n) + 0.01 * scale * Eigen::MatrixXcd::Identity(n, n);
}

HermitianMatrix random_hermitian(RngStream& rng, int n) {
  Eigen::MatrixXcd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = rng.cnormal();
  return HermitianMatrix(0.5 * (r + r.adjoint()));
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

// largest m with LMI >= m*I, solved as a conic program; the LMI must already
// be in the program at index `which`
double max_lmi_margin(conic::ConicProgram& p, int which) {
  const int d = p.lmi_constraints[which].dim;
  const int m = p.add_scalar_var("margin");
  p.lmi_constraints[which].scalar_terms.emplace_back(
      m, HermitianMatrix(-Eigen::MatrixXcd::Identity(d, d)));
  p.objective.add(m, -1.0);
  const conic::ConicSolution sol = conic::solve(p, 1e-9);
  REQUIRE(sol.status == conic::SolveStatus::Optimal);
  return -sol.objective;
}

double solve_objective(const WorstCaseSubproblem& sp) {
  const conic::ConicSolution sol = conic::solve(sp.program, 1e-8);
  if (sol.status == conic::SolveStatus::Optimal) return sol.objective;
  return kInfObj;
}

} // namespace

// ---- exact ball extremum ----

TEST_CASE("ball extremum: interior stationary points", "[worstcase]") {
  const HermitianMatrix a = HermitianMatrix::identity(2);
  {
    const QuadraticExtremum r =
        worst_case_quadratic(a, ComplexVector::Zero(2), 0.5, 1.0, ExtremumSense::Min);
    REQUIRE(r.value == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(r.point.norm() < 1e-9);
  }
  {
    ComplexVector b(2);
    b << 0.1, 0.0;
    const QuadraticExtremum r = worst_case_quadratic(a, b, 0.0, 1.0, ExtremumSense::Min);
    REQUIRE(r.value == Catch::Approx(-0.01).margin(1e-12));
    REQUIRE((r.point + b).norm() < 1e-9);
  }
}

TEST_CASE("ball extremum: zero radius returns the constant", "[worstcase]") {
  const HermitianMatrix a(Eigen::MatrixXcd::Identity(3, 3) * -4.0);
  ComplexVector b(3);
  b << 1.0, cplx(0, 2), -3.0;
  const QuadraticExtremum r = worst_case_quadratic(a, b, 7.5, 0.0, ExtremumSense::Min);
  REQUIRE(r.value == 7.5);
  REQUIRE(r.point.norm() == 0.0);
}

TEST_CASE("ball extremum: hard case fills the radius", "[worstcase]") {
  const HermitianMatrix a(-Eigen::MatrixXcd::Identity(2, 2));
  const QuadraticExtremum r =
      worst_case_quadratic(a, ComplexVector::Zero(2), 1.0, 1.0, ExtremumSense::Min);
  REQUIRE(r.value == Catch::Approx(0.0).margin(1e-10));
  REQUIRE(r.point.norm() == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("ball extremum: indefinite case matches dense grid", "[worstcase]") {
  Eigen::MatrixXcd am = Eigen::MatrixXcd::Zero(2, 2);
  am(0, 0) = 1.0;
  am(1, 1) = -2.0;
  ComplexVector b(2);
  b << 1.0, 0.0;
  const QuadraticExtremum r =
      worst_case_quadratic(HermitianMatrix(am), b, 0.0, 1.0, ExtremumSense::Min);
  // boundary solution with no b-component on the bottom eigenspace:
  // delta = (-1/3, sqrt(8)/3) gives 1/9 - 16/9 - 2/3 = -7/3
  REQUIRE(r.value == Catch::Approx(-7.0 / 3.0).margin(1e-9));
  REQUIRE(r.point.norm() == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(std::abs(r.point[0] - cplx(-1.0 / 3.0, 0)) < 1e-6);
  REQUIRE(std::abs(std::abs(r.point[1]) - std::sqrt(8.0) / 3.0) < 1e-6);

  // implied phases are free, so a real grid covers the extremum; the interior
  // grid alone misses the boundary minimum, hence the circle sweep
  double best = kInfObj;
  for (double x = -1.0; x <= 1.0; x += 0.005)
    for (double y = -1.0; y <= 1.0; y += 0.005)
      if (x * x + y * y <= 1.0) best = std::min(best, x * x - 2.0 * y * y + 2.0 * x);
  for (double th = 0.0; th < 2.0 * M_PI; th += 1e-4) {
    const double x = std::cos(th), y = std::sin(th);
    best = std::min(best, x * x - 2.0 * y * y + 2.0 * x);
  }
  REQUIRE(r.value == Catch::Approx(best).margin(1e-5));
}

TEST_CASE("ball extremum dominates dense sampling", "[worstcase]") {
  RngStream rng(41, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3;
    const HermitianMatrix a = random_hermitian(rng, n);
    ComplexVector b = ComplexVector::Zero(n);
    if (trial % 5 != 0) b = rng.cnormal_vector(n);
    const double c = rng.normal();
    const double xi = 0.2 + 1.5 * rng.uniform();

    const QuadraticExtremum lo = worst_case_quadratic(a, b, c, xi, ExtremumSense::Min);
    const QuadraticExtremum hi = worst_case_quadratic(a, b, c, xi, ExtremumSense::Max);
    auto f = [&](const ComplexVector& d) {
      return quadratic_form(a, d) + 2.0 * std::real(b.dot(d)) + c;
    };
    REQUIRE(lo.point.norm() <= xi * (1.0 + 1e-9));
    REQUIRE(hi.point.norm() <= xi * (1.0 + 1e-9));
    REQUIRE(lo.value == Catch::Approx(f(lo.point)).margin(1e-9));
    REQUIRE(hi.value == Catch::Approx(f(hi.point)).margin(1e-9));
    REQUIRE(lo.value <= hi.value + 1e-12);

    if (b.norm() == 0.0) {
      // pure quadratic: extremes sit on clamped extreme eigenvalues
      const HermitianEig e = eig_hermitian(a);
      REQUIRE(lo.value ==
              Catch::Approx(c + xi * xi * std::min(e.values[n - 1], 0.0)).margin(1e-9));
      REQUIRE(hi.value == Catch::Approx(c + xi * xi * std::max(e.values[0], 0.0)).margin(1e-9));
    }

    double smin = kInfObj, smax = -kInfObj;
    for (int s = 0; s < 2000; ++s) {
      ComplexVector d = rng.cnormal_vector(n);
      d /= d.norm();
      if (s % 4 != 0) d *= std::pow(rng.uniform(), 1.0 / (2.0 * n)); // else boundary
      d *= xi;
      const double v = f(d);
      smin = std::min(smin, v);
      smax = std::max(smax, v);
    }
    REQUIRE(lo.value <= smin + 1e-7);
    REQUIRE(hi.value >= smax - 1e-7);
  }
}

TEST_CASE("ball extremum: max is the negated min of the negated data", "[worstcase]") {
  RngStream rng(42, 0);
  const HermitianMatrix a = random_hermitian(rng, 3);
  const ComplexVector b = rng.cnormal_vector(3);
  const QuadraticExtremum mx = worst_case_quadratic(a, b, 0.3, 0.8, ExtremumSense::Max);
  const QuadraticExtremum mn = worst_case_quadratic(HermitianMatrix(-a.mat()),
                                                    ComplexVector(-b), -0.3, 0.8,
                                                    ExtremumSense::Min);
  REQUIRE(mx.value == Catch::Approx(-mn.value).margin(1e-12));
}

TEST_CASE("ball extremum rejects bad arguments", "[worstcase]") {
  const HermitianMatrix a = HermitianMatrix::identity(2);
  REQUIRE_THROWS_AS(worst_case_quadratic(a, ComplexVector::Zero(2), 0, -1.0, ExtremumSense::Min),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(worst_case_quadratic(a, ComplexVector::Zero(3), 0, 1.0, ExtremumSense::Min),
                    std::invalid_argument);
}

// ---- constraint builders ----

TEST_CASE("eavesdropping-cap certificate has the expected entries", "[worstcase]") {
  Scenario sc = bounded_scenario(1, 1, 1, 0.0, 0.0);
  ChannelSet ch;
  ch.h = ComplexVector::Ones(1);
  ch.g = {ComplexVector::Ones(1)};
  ch.q = {ComplexVector::Ones(1)};

  conic::ConicProgram p;
  detail::WHandle w;
  w.matrix = p.add_matrix_var("W", 1);
  const int sig = p.add_matrix_var("Sigma", 1);
  const int t = p.add_scalar_var("t", 1.0 + 1e-9);
  const std::vector<int> om =
      build_secrecy_constraints(p, w, sig, t, 2.0, sc, ch, effective_radii(sc));
  REQUIRE(om.size() == 1);
  REQUIRE(p.lmi_constraints.size() == 1);
  REQUIRE(p.ineq_constraints.size() == 1);

  conic::Assignment a;
  a.matrices = {2.0 * Eigen::MatrixXcd::Identity(1, 1), Eigen::MatrixXcd::Identity(1, 1)};
  a.scalars.resize(p.scalar_vars.size(), 1.5);
  for (double omega : {0.25, 1.75}) {
    a.scalars[om[0]] = omega;
    const Eigen::MatrixXcd f = conic::evaluate(p.lmi_constraints[0], a);
    // (beta-1)*Sigma - W = -1 pushed through [I g], shifted by the multiplier
    REQUIRE(std::abs(f(0, 0) - cplx(omega - 1.0, 0)) < 1e-14);
    REQUIRE(std::abs(f(0, 1) - cplx(-1.0, 0)) < 1e-14);
    REQUIRE(std::abs(f(1, 0) - cplx(-1.0, 0)) < 1e-14);
    REQUIRE(std::abs(f(1, 1) - cplx(0.1 - 1.0, 0)) < 1e-14);
  }
}

TEST_CASE("certificates collapse to the multiplier block at zero design", "[worstcase]") {
  Scenario sc = bounded_scenario(2, 1, 1, 0.2, 0.2);
  RngStream rng(5, 0);
  ChannelSet ch = sample_channels(sc, rng);

  conic::ConicProgram p;
  detail::WHandle w;
  w.matrix = p.add_matrix_var("W", 2);
  const int sig = p.add_matrix_var("Sigma", 2);
  const int t = p.add_scalar_var("t", 1.0 + 1e-9);
  const std::vector<int> om =
      build_secrecy_constraints(p, w, sig, t, 1.0, sc, ch, effective_radii(sc));

  conic::Assignment a;
  a.matrices = {Eigen::MatrixXcd::Zero(2, 2), Eigen::MatrixXcd::Zero(2, 2)};
  a.scalars.resize(p.scalar_vars.size(), 2.0);
  a.scalars[om[0]] = 0.7;
  const Eigen::MatrixXcd f = conic::evaluate(p.lmi_constraints[0], a);
  Eigen::MatrixXcd want = 0.7 * Eigen::MatrixXcd::Identity(3, 3);
  want(2, 2) = -0.7 * 0.2 * 0.2;
  REQUIRE((f - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("eavesdropping-cap certificate agrees with the exact ball extremum",
          "[worstcase]") {
  RngStream rng(71, 0);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const double xi = 0.05 + 0.45 * rng.uniform();
    Scenario sc = bounded_scenario(2, 1, 1, xi, xi);
    ChannelSet ch = sample_channels(sc, rng);
    const double beta = 1.2 + 1.8 * rng.uniform();
    const Eigen::MatrixXcd w0 = random_pd(rng, 2, 0.2 + 1.8 * rng.uniform());
    const Eigen::MatrixXcd s0 = random_pd(rng, 2, 0.2 + 1.8 * rng.uniform());

    conic::ConicProgram p;
    detail::WHandle w;
    w.matrix = p.add_matrix_var("W", 2);
    const int sig = p.add_matrix_var("Sigma", 2);
    const int t = p.add_scalar_var("t", 1.0 + 1e-9);
    build_secrecy_constraints(p, w, sig, t, beta, sc, ch, effective_radii(sc));
    p.ineq_constraints.clear(); // isolate the certificate from the rate row
    conic::LinExpr tpin;
    tpin.constant = -2.0;
    tpin.add(t, 1.0);
    p.eq_constraints.push_back(tpin);
    pin_matrix(p, w.matrix, w0);
    pin_matrix(p, sig, s0);
    const double margin = max_lmi_margin(p, 0);

    // the cap holds on the whole ball iff the worst (g+delta) keeps
    // (beta-1)(g'Sigma g + sigma_e2) - g'W g nonnegative
    const HermitianMatrix a((beta - 1.0) * s0 - w0);
    const ComplexVector b = a.mat() * ch.g[0];
    const double c = quadratic_form(a, ch.g[0]) + (beta - 1.0) * sc.sigma_e2;
    const double slack = worst_case_quadratic(a, b, c, xi, ExtremumSense::Min).value;
    if (std::abs(slack) < 1e-6 || std::abs(margin) < 1e-9) continue;
    REQUIRE((slack > 0) == (margin > 0));
    ++checked;
  }
  REQUIRE(checked >= 25);
}

TEST_CASE("harvesting-floor certificate agrees with the exact ball extremum", "[worstcase]") {
  RngStream rng(72, 0);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const double xi = 0.05 + 0.45 * rng.uniform();
    Scenario sc = bounded_scenario(2, 1, 1, xi, xi);
    sc.psi_e[0] = 0.05 + 2.45 * rng.uniform();
    ChannelSet ch = sample_channels(sc, rng);
    const Eigen::MatrixXcd w0 = random_pd(rng, 2, 0.2 + 1.2 * rng.uniform());
    const Eigen::MatrixXcd s0 = random_pd(rng, 2, 0.2 + 1.2 * rng.uniform());

    conic::ConicProgram p;
    detail::WHandle w;
    w.matrix = p.add_matrix_var("W", 2);
    const int sig = p.add_matrix_var("Sigma", 2);
    build_eh_lmi(p, w, sig, -1, sc, ch, effective_radii(sc));
    pin_matrix(p, w.matrix, w0);
    pin_matrix(p, sig, s0);
    const double margin = max_lmi_margin(p, 0);

    const HermitianMatrix a(w0 + s0);
    const ComplexVector b = a.mat() * ch.g[0];
    const double c = quadratic_form(a, ch.g[0]) + sc.sigma_e2 - sc.psi_e[0] / sc.eta;
    const double slack = worst_case_quadratic(a, b, c, xi, ExtremumSense::Min).value;
    if (std::abs(slack) < 1e-6 || std::abs(margin) < 1e-9) continue;
    REQUIRE((slack > 0) == (margin > 0));
    ++checked;
  }
  REQUIRE(checked >= 25);
}

TEST_CASE("interference-cap certificate agrees with the exact ball extremum", "[worstcase]") {
  RngStream rng(73, 0);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const double xi = 0.05 + 0.45 * rng.uniform();
    Scenario sc = bounded_scenario(2, 1, 1, xi, xi);
    sc.p_in[0] = 0.02 + 0.6 * rng.uniform();
    ChannelSet ch = sample_channels(sc, rng);
    const Eigen::MatrixXcd w0 = random_pd(rng, 2, 0.2 + 1.2 * rng.uniform());
    const Eigen::MatrixXcd s0 = random_pd(rng, 2, 0.2 + 1.2 * rng.uniform());

    conic::ConicProgram p;
    detail::WHandle w;
    w.matrix = p.add_matrix_var("W", 2);
    const int sig = p.add_matrix_var("Sigma", 2);
    build_interference_lmi(p, w, sig, sc, ch, effective_radii(sc));
    pin_matrix(p, w.matrix, w0);
    pin_matrix(p, sig, s0);
    const double margin = max_lmi_margin(p, 0);

    const HermitianMatrix a(w0 + s0);
    const ComplexVector b = a.mat() * ch.q[0];
    const double worst = worst_case_quadratic(a, b, quadratic_form(a, ch.q[0]), xi,
                                              ExtremumSense::Max)
                             .value;
    const double slack = sc.p_in[0] - worst;
    if (std::abs(slack) < 1e-6 || std::abs(margin) < 1e-9) continue;
    REQUIRE((slack > 0) == (margin > 0));
    ++checked;
  }
  REQUIRE(checked >= 25);
}

// ---- assembled fixed-beta problems ----

TEST_CASE("scalar power minimization matches an exhaustive grid", "[worstcase]") {
  Scenario sc = bounded_scenario(1, 1, 1, 0.1, 0.1);
  sc.p_th = 2.0;
  sc.p_in = {0.1};
  sc.psi_s = 0.05;
  sc.psi_e = {0.01};
  sc.sigma_s2 = 0.1;
  sc.sigma_e2 = 0.1;
  sc.sigma_sp2 = 0.01;
  sc.r_min = 1.0;
  sc.eta = 1.0;
  ChannelSet ch;
  ch.h = ComplexVector::Ones(1);
  ch.g = {0.3 * ComplexVector::Ones(1)};
  ch.q = {0.3 * ComplexVector::Ones(1)};

  // grid reference in (total power, split): the rate constraint improves and
  // the harvesting constraint degrades as rho grows, so checking the rate at
  // the largest rho the harvester allows decides feasibility; the ball only
  // moves |g| within [0.2, 0.4] and |q| within the same, with the worst end
  // known per constraint
  const double ge2 = 0.4 * 0.4, qe2 = 0.4 * 0.4;
  const double pmax = std::min(sc.p_th, sc.p_in[0] / qe2);
  double grid_best = kInfObj;
  const int np = 1600, nw = 1000;
  for (int ip = 0; ip <= np && grid_best == kInfObj; ++ip) {
    const double pt = pmax * ip / np;
    const double rho = 1.0 - sc.psi_s / (pt + sc.sigma_s2);
    if (rho <= 0) continue;
    for (int iw = 0; iw <= nw; ++iw) {
      const double wv = pt * iw / nw, sv = pt - wv;
      const double cs = std::log2(1.0 + rho * wv / (rho * (sv + sc.sigma_s2) + sc.sigma_sp2));
      const double ce = std::log2(1.0 + ge2 * wv / (ge2 * sv + sc.sigma_e2));
      if (cs - ce >= sc.r_min) {
        grid_best = pt;
        break;
      }
    }
  }
  REQUIRE(grid_best < kInfObj);

  auto obj_at = [&](double beta) { return solve_objective(build_p3(beta, sc, ch)); };
  const double beta_hi = 1.0 + sc.p_th * ch.h.squaredNorm() / sc.sigma_sp2;
  double best = kInfObj, best_beta = 1.0;
  std::vector<double> betas;
  for (int i = 0; i <= 60; ++i)
    betas.push_back(std::exp(std::log(beta_hi) * i / 60.0));
  for (double beta : betas) {
    const double v = obj_at(beta);
    if (v < best) {
      best = v;
      best_beta = beta;
    }
  }
  REQUIRE(best < kInfObj);
  {
    double lo = best_beta / std::exp(std::log(beta_hi) / 60.0);
    double hi = best_beta * std::exp(std::log(beta_hi) / 60.0);
    for (int it = 0; it < 30; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (obj_at(m1) <= obj_at(m2))
        hi = m2;
      else
        lo = m1;
    }
    best = std::min(best, obj_at(0.5 * (lo + hi)));
  }
  REQUIRE(best == Catch::Approx(grid_best).margin(5e-3));
}

TEST_CASE("scalar harvesting maximization attains the closed-form cap", "[worstcase]") {
  Scenario sc = bounded_scenario(1, 1, 1, 0.05, 0.1);
  sc.p_th = 2.0;
  sc.p_in = {0.1};
  sc.psi_s = 0.05;
  sc.sigma_s2 = 0.1;
  sc.sigma_e2 = 0.1;
  sc.sigma_sp2 = 0.01;
  sc.r_min = 0.0;
  sc.eta = 1.0;
  ChannelSet ch;
  ch.h = ComplexVector::Ones(1);
  ch.g = {0.3 * ComplexVector::Ones(1)};
  ch.q = {0.3 * ComplexVector::Ones(1)};

  const WorstCaseSubproblem sp = build_p7(1.5, sc, ch);
  const conic::ConicSolution sol = conic::solve(sp.program, 1e-9);
  REQUIRE(sol.status == conic::SolveStatus::Optimal);

  // total power is capped by the interference ball at 0.1/0.16; the harvest
  // target sees the short end of the ball, (0.3-0.05)^2, on that power
  const double pstar = sc.p_in[0] / (0.4 * 0.4);
  const double tau_star = 0.25 * 0.25 * pstar + sc.sigma_e2;
  REQUIRE(-sol.objective == Catch::Approx(tau_star).margin(1e-6));
  const Eigen::MatrixXcd& wm = sol.assignment.matrices[sp.w];
  const Eigen::MatrixXcd& sm = sol.assignment.matrices[sp.sigma];
  REQUIRE((wm.trace() + sm.trace()).real() == Catch::Approx(pstar).margin(1e-6));

  // solved design honours the true worst-case eavesdropping cap
  const HermitianMatrix a(wm - 0.5 * sm);
  const double worst = worst_case_quadratic(a, ComplexVector(a.mat() * ch.g[0]),
                                            quadratic_form(a, ch.g[0]), 0.05,
                                            ExtremumSense::Max)
                           .value;
  REQUIRE(worst <= 0.5 * sc.sigma_e2 + 1e-6);

  // split variable stays in range and the recovered rho is usable
  const double t = sol.assignment.scalars[sp.t];
  REQUIRE(t >= 1.0 + 1e-9 - 1e-12);
  REQUIRE(1.0 / t > 0.0);
  REQUIRE(1.0 / t < 1.0);
}

TEST_CASE("fixed-direction restriction reproduces the scalar optimum", "[worstcase]") {
  Scenario sc = bounded_scenario(1, 1, 1, 0.1, 0.1);
  sc.psi_e = {0.01};
  sc.r_min = 1.0;
  ChannelSet ch;
  ch.h = ComplexVector::Ones(1);
  ch.g = {0.3 * ComplexVector::Ones(1)};
  ch.q = {0.3 * ComplexVector::Ones(1)};

  const double full = solve_objective(build_p3(1.4, sc, ch));
  REQUIRE(full < kInfObj);
  ComplexVector dir(1);
  dir << cplx(0, 2.0); // normalized inside the builder
  const WorstCaseSubproblem sp = build_p3(1.4, sc, ch, dir);
  REQUIRE(sp.w == -1);
  REQUIRE(sp.w_scale >= 0);
  const conic::ConicSolution sol = conic::solve(sp.program, 1e-8);
  REQUIRE(sol.status == conic::SolveStatus::Optimal);
  REQUIRE(sol.objective == Catch::Approx(full).margin(1e-6));
  REQUIRE(sol.assignment.scalars[sp.w_scale] >= -1e-9);
}

TEST_CASE("fixed-direction restriction never beats the free beamformer", "[worstcase]") {
  Scenario sc = bounded_scenario(3, 2, 1, 0.05, 0.05);
  sc.psi_e.assign(2, 0.02);
  sc.r_min = 0.5;
  RngStream rng(9, 3);
  ChannelSet ch = sample_channels(sc, rng);

  const WorstCaseSubproblem full = build_p3(2.0, sc, ch);
  const conic::ConicSolution sol = conic::solve(full.program, 1e-8);
  REQUIRE(sol.status == conic::SolveStatus::Optimal);
  const HermitianMatrix wsol(sol.assignment.matrices[full.w], 1e-6);
  const RankInfo ri = numerical_rank(wsol);
  REQUIRE(ri.rank >= 1);
  const ComplexVector dir = eig_hermitian(wsol).vectors.col(0);

  const conic::ConicSolution fixed = conic::solve(build_p3(2.0, sc, ch, dir).program, 1e-8);
  REQUIRE(fixed.status == conic::SolveStatus::Optimal);
  REQUIRE(fixed.objective >= sol.objective - 1e-7);
  if (ri.ratio <= 1e-6)
    REQUIRE(fixed.objective == Catch::Approx(sol.objective).margin(1e-4));
}

TEST_CASE("relaxing caps never hurts the fixed-beta optima", "[worstcase]") {
  RngStream rng(11, 0);
  int usable_p3 = 0, usable_p7 = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Scenario sc = bounded_scenario(2, 1, 1, 0.1, 0.1);
    sc.psi_e = {0.02};
    sc.r_min = 0.5;
    ChannelSet ch = sample_channels(sc, rng);

    const double p1 = solve_objective(build_p3(2.0, sc, ch));
    Scenario relaxed = sc;
    relaxed.p_in[0] *= 2.0;
    const double p2 = solve_objective(build_p3(2.0, relaxed, ch));
    if (p1 < kInfObj && p2 < kInfObj) {
      REQUIRE(p2 <= p1 + 1e-6);
      ++usable_p3;
    }

    const double tau1 = -solve_objective(build_p7(2.0, sc, ch));
    Scenario wider = sc;
    wider.p_th *= 2.0;
    const double tau2 = -solve_objective(build_p7(2.0, wider, ch));
    if (std::isfinite(tau1) && std::isfinite(tau2)) {
      REQUIRE(tau2 >= tau1 - 1e-6);
      ++usable_p7;
    }
  }
  REQUIRE(usable_p3 >= 5);
  REQUIRE(usable_p7 >= 5);
}
