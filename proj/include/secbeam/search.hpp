#ifndef SECBEAM_SEARCH_HPP
#define SECBEAM_SEARCH_HPP

// Outer one-dimensional search over the rate-split parameter -- beta for the
// bounded model, z for the probabilistic one -- around the fixed-parameter
// conic solves, plus beamformer extraction from the relaxed optimum
// (eigenvector when the solution is rank-one, Gaussian randomization with a
// fixed-direction re-solve otherwise).

#include <secbeam/conic/solver.hpp>
#include <secbeam/outage.hpp>

#include <cassert>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace secbeam {

enum class SearchParam { Beta, Z };

struct SearchPlan {
  SearchParam param = SearchParam::Beta;
  double lo = 1.0;
  double hi = 1.0;
  int grid_points = 64;
  bool uniform = false; // beta defaults to log spacing, z to uniform
  bool refine = true;
  double refine_width = 1e-3;
};

struct Interval {
  double lo = 0.0, hi = 0.0;
};

// admissible beta range; the upper end comes from the largest achievable
// information SINR at full power
inline Interval beta_interval(const Scenario& sc, const ComplexVector& h) {
  if (!(sc.sigma_sp2 > 0.0))
    throw std::domain_error("beta_interval: sigma_sp2 must be positive");
  return {1.0, 1.0 + sc.p_th * h.squaredNorm() / sc.sigma_sp2};
}

// The objective is empirically flat over most of the beta range, so the
// default grid is log-spaced to spend its resolution near beta = 1.
inline SearchPlan default_beta_plan(const Scenario& sc, const ComplexVector& h) {
  SearchPlan p;
  p.param = SearchParam::Beta;
  const Interval iv = beta_interval(sc, h);
  p.lo = iv.lo;
  p.hi = iv.hi;
  return p;
}

inline SearchPlan default_z_plan() {
  SearchPlan p;
  p.param = SearchParam::Z;
  p.lo = 1e-4;
  p.hi = 1.0;
  p.uniform = true;
  return p;
}

inline std::vector<double> search_grid(const SearchPlan& plan) {
  if (!(plan.hi > plan.lo)) return {plan.lo};
  const int n = std::max(2, plan.grid_points);
  std::vector<double> g;
  g.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    g.push_back(plan.uniform ? plan.lo + s * (plan.hi - plan.lo)
                             : plan.lo * std::exp(s * std::log(plan.hi / plan.lo)));
  }
  g.front() = plan.lo;
  g.back() = plan.hi;
  return g;
}

// one inner solve; `objective` is in problem sense (power to minimize, or
// harvest target to maximize)
struct InnerPoint {
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  double objective = 0.0;
  Design design;
  std::string message;
};

using InnerSolver = std::function<InnerPoint(double)>;

struct GridPoint {
  double value = 0.0;
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

enum class SearchStatus { Ok, AllInfeasible, NumericalFailure };

inline const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Ok: return "ok";
    case SearchStatus::AllInfeasible: return "all_infeasible";
    default: return "numerical_failure";
  }
}

struct SearchResult {
  SearchStatus status = SearchStatus::AllInfeasible;
  Design design;
  std::vector<GridPoint> trace; // grid evaluations only; refinement not recorded
  double failed_value = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

// Grid scan, infeasible points skipped, ties broken toward the smaller
// parameter, then local golden-section refinement between the winner's grid
// neighbors (heuristic: unimodality is not assumed, so refinement only ever
// replaces the winner when it finds something strictly better).
inline SearchResult run_search(const SearchPlan& plan, const InnerSolver& solve_at,
                               ExtremumSense sense) {
  SearchResult res;
  const std::vector<double> grid = search_grid(plan);
  const double flip = sense == ExtremumSense::Min ? 1.0 : -1.0;
  double best = std::numeric_limits<double>::infinity();
  int best_idx = -1;

  for (size_t i = 0; i < grid.size(); ++i) {
    const InnerPoint pt = solve_at(grid[i]);
    GridPoint row;
    row.value = grid[i];
    row.status = pt.status;
    row.message = pt.message;
    if (pt.status == conic::SolveStatus::Optimal) row.objective = pt.objective;
    res.trace.push_back(row);
    if (pt.status == conic::SolveStatus::NumericalFailure) {
      res.status = SearchStatus::NumericalFailure;
      res.failed_value = grid[i];
      res.message = pt.message;
      return res;
    }
    if (pt.status != conic::SolveStatus::Optimal) continue;
    if (flip * pt.objective < best) {
      best = flip * pt.objective;
      best_idx = static_cast<int>(i);
      res.design = pt.design;
    }
  }
  if (best_idx < 0) {
    res.message = "no feasible grid point";
    return res;
  }
  res.status = SearchStatus::Ok;

#ifndef NDEBUG
  {
    double ext = std::numeric_limits<double>::infinity();
    for (const GridPoint& row : res.trace)
      if (row.status == conic::SolveStatus::Optimal) ext = std::min(ext, flip * row.objective);
    assert(best == ext);
  }
#endif

  if (plan.refine && grid.size() >= 2) {
    double a = grid[best_idx > 0 ? best_idx - 1 : 0];
    double b = grid[std::min<size_t>(best_idx + 1, grid.size() - 1)];
    auto eval_ref = [&](double v, double& f) {
      const InnerPoint pt = solve_at(v);
      if (pt.status == conic::SolveStatus::NumericalFailure) {
        // Refinement probes straddle the feasibility boundary where solves
        // are at their worst; the grid winner is already valid, so a failed
        // probe ends refinement instead of sinking the whole search.
        res.message = "refinement stopped at " + std::to_string(v) + ": " + pt.message;
        return false;
      }
      f = std::numeric_limits<double>::infinity();
      if (pt.status == conic::SolveStatus::Optimal) {
        f = flip * pt.objective;
        if (f < best) {
          best = f;
          res.design = pt.design;
        }
      }
      return true;
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = 0.0, f2 = 0.0;
    if (!eval_ref(x1, f1) || !eval_ref(x2, f2)) return res;
    for (int it = 0; b - a > plan.refine_width && it < 80; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        if (!eval_ref(x1, f1)) return res;
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        if (!eval_ref(x2, f2)) return res;
      }
    }
  }
  return res;
}

inline const char* to_string(ProblemKind k) {
  return k == ProblemKind::PowerMin ? "power-min" : "maxmin-eh";
}

namespace detail {

inline void fill_design(Design& d, const conic::ConicSolution& sol, int w_var, int sigma_var,
                        int t_var, int w_scale, const ComplexVector& w_dir) {
  if (w_var >= 0)
    d.W = HermitianMatrix(sol.assignment.matrices[w_var]);
  else
    d.W = HermitianMatrix(sol.assignment.scalars[w_scale] * (w_dir * w_dir.adjoint()));
  d.Sigma = HermitianMatrix(sol.assignment.matrices[sigma_var]);
  d.rho = 1.0 / sol.assignment.scalars[t_var];
  const RankInfo rw = numerical_rank(d.W);
  const RankInfo rs = numerical_rank(d.Sigma);
  d.rank_W = rw.rank;
  d.ratio_W = rw.ratio;
  d.rank_Sigma = rs.rank;
  d.ratio_Sigma = rs.ratio;
}

} // namespace detail

inline InnerPoint eval_bounded(ProblemKind kind, double beta, const Scenario& sc,
                               const ChannelSet& ch, const ComplexVector& fixed_dir = {}) {
  // At beta = 1 the leakage cap reads max over the ball of g'Wg <= 0, which
  // pins W to zero whenever any error ball has volume, and a positive rate
  // target is then unattainable.  The point is only weakly infeasible (it
  // admits no dual certificate), so it is classified here analytically
  // rather than handed to the solver.
  if (beta <= 1.0 && sc.r_min > 0.0) {
    const BoundedRadii xi = effective_radii(sc);
    for (double v : xi.xi_e)
      if (v > 0.0) {
        InnerPoint pt;
        pt.status = conic::SolveStatus::Infeasible;
        pt.message = "beta = 1 pins the beamformer to zero";
        return pt;
      }
  }
  const WorstCaseSubproblem sp = kind == ProblemKind::PowerMin
                                     ? build_p3(beta, sc, ch, fixed_dir)
                                     : build_p7(beta, sc, ch, fixed_dir);
  const conic::ConicSolution sol = conic::solve(sp.program, 1e-8);
  InnerPoint pt;
  pt.status = sol.status;
  pt.message = sol.message;
  if (sol.status != conic::SolveStatus::Optimal) return pt;
  pt.objective = kind == ProblemKind::PowerMin ? sol.objective : -sol.objective;
  pt.design.problem = to_string(kind);
  pt.design.model = "bounded";
  pt.design.search_param = beta;
  pt.design.objective = pt.objective;
  detail::fill_design(pt.design, sol, sp.w, sp.sigma, sp.t, sp.w_scale, sp.w_direction);
  return pt;
}

inline InnerPoint eval_outage(ProblemKind kind, double zv, const Scenario& sc,
                              const ChannelSet& ch, const ComplexVector& fixed_dir = {}) {
  const OutageSubproblem sp = kind == ProblemKind::PowerMin ? build_p10(zv, sc, ch, fixed_dir)
                                                            : build_p12(zv, sc, ch, fixed_dir);
  const conic::ConicSolution sol = conic::solve(sp.program, 1e-8);
  InnerPoint pt;
  pt.status = sol.status;
  pt.message = sol.message;
  if (sol.status != conic::SolveStatus::Optimal) return pt;
  pt.objective = kind == ProblemKind::PowerMin ? sol.objective : -sol.objective;
  pt.design.problem = to_string(kind);
  pt.design.model = "outage";
  pt.design.search_param = zv;
  pt.design.objective = pt.objective;
  detail::fill_design(pt.design, sol, sp.w, sp.sigma, sp.t, sp.w_scale, sp.w_direction);
  return pt;
}

// Rank-one repair: L beam candidates drawn with the relaxed W as covariance;
// each fixes the beam direction and re-solves the same inner problem with the
// transmit power along it as a scalar.  Keeps the best feasible candidate; if
// none solves, flags the design instead.
inline Design gaussian_randomization(const Design& d, const Scenario& sc, const ChannelSet& ch,
                                     int candidates) {
  const ProblemKind kind =
      d.problem == "maxmin-eh" ? ProblemKind::MaxMinEH : ProblemKind::PowerMin;
  const bool outage = d.model == "outage";
  const double flip = kind == ProblemKind::PowerMin ? 1.0 : -1.0;
  const Eigen::MatrixXcd half = psd_sqrt(d.W).mat();
  RngStream rng(sc.rng_seed, 17); // decoupled from the channel stream

  Design best = d;
  best.w.reset();
  best.extraction = "rank_gt_one";
  bool found = false;
  double best_obj = 0.0;
  for (int l = 0; l < candidates; ++l) {
    const ComplexVector cand = half * rng.cnormal_vector(sc.n_t);
    if (cand.norm() < 1e-12) continue;
    const InnerPoint pt = outage ? eval_outage(kind, d.search_param, sc, ch, cand)
                                 : eval_bounded(kind, d.search_param, sc, ch, cand);
    if (pt.status != conic::SolveStatus::Optimal) continue;
    if (!found || flip * pt.objective < best_obj) {
      found = true;
      best_obj = flip * pt.objective;
      best = pt.design;
    }
  }
  if (found) {
    const HermitianEig e = eig_hermitian(best.W);
    best.w = std::sqrt(std::max(e.values[0], 0.0)) * e.vectors.col(0);
    best.extraction = "randomized";
  }
  return best;
}

inline Design extract_beamformer(Design d, const Scenario& sc, const ChannelSet& ch,
                                 int candidates = 100) {
  const RankInfo ri = numerical_rank(d.W);
  d.rank_W = ri.rank;
  d.ratio_W = ri.ratio;
  if (ri.ratio <= 1e-6) {
    const HermitianEig e = eig_hermitian(d.W);
    d.w = std::sqrt(std::max(e.values[0], 0.0)) * e.vectors.col(0);
    d.extraction = "direct";
    return d;
  }
  return gaussian_randomization(d, sc, ch, candidates);
}

// Full pipeline for one channel realization: choose the plan from the error
// model, run the outer search, extract the beam.
inline SearchResult solve_design(ProblemKind kind, const Scenario& sc, const ChannelSet& ch,
                                 const SearchPlan* custom_plan = nullptr, int candidates = 100) {
  const bool outage = sc.errors.model == ErrorSpec::Model::Gaussian;
  const SearchPlan plan =
      custom_plan ? *custom_plan : (outage ? default_z_plan() : default_beta_plan(sc, ch.h));
  const InnerSolver solver = [&](double v) {
    return outage ? eval_outage(kind, v, sc, ch) : eval_bounded(kind, v, sc, ch);
  };
  SearchResult res = run_search(
      plan, solver, kind == ProblemKind::PowerMin ? ExtremumSense::Min : ExtremumSense::Max);
  if (res.status == SearchStatus::Ok)
    res.design = extract_beamformer(res.design, sc, ch, candidates);
  return res;
}

} // namespace secbeam

#endif
