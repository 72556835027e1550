#ifndef SECBEAM_EXPERIMENT_HPP
#define SECBEAM_EXPERIMENT_HPP

// Batch experiment harness: a perfect-CSI baseline, axis sweeps over scenario
// knobs, matched model-comparison runs with empirical-CDF output, and the
// deterministic CSV emission shared by all of them.

#include <secbeam/search.hpp>
#include <secbeam/validate.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace secbeam {

// ---- perfect-CSI baseline ----
//
// With zero uncertainty every robust block collapses to a scalar row at the
// channel estimate.  The robust builders cannot be reused with zero radii:
// their multipliers degenerate there, so the baseline gets plain rows.

namespace detail {

// Eavesdropping-rate cap log2(beta) at the nominal channel:
// (beta-1)(g' Sigma g + sigma_e2) - g' W g >= 0.
inline void add_nominal_secrecy_rows(conic::ConicProgram& p, const WHandle& w, int sigma, int t,
                                     double beta, const Scenario& sc, const ChannelSet& ch) {
  const double a = 1.0 - std::exp2(sc.r_min) * beta;
  const HermitianMatrix hh(ch.h * ch.h.adjoint());
  conic::LinExpr su;
  su.constant = a * sc.sigma_s2;
  su.add(t, a * sc.sigma_sp2);
  w.add_to(su, hh);
  su.add(sigma, HermitianMatrix(a * hh.mat()));
  p.ineq_constraints.push_back(su);

  for (int k = 0; k < sc.n_ehr; ++k) {
    const HermitianMatrix gg(ch.g[k] * ch.g[k].adjoint());
    conic::LinExpr row;
    row.constant = (beta - 1.0) * sc.sigma_e2;
    w.add_to(row, gg, -1.0);
    row.add(sigma, HermitianMatrix((beta - 1.0) * gg.mat()));
    p.ineq_constraints.push_back(row);
  }
}

// eta (g'(W+Sigma) g + sigma_e2) >= psi_e[k], or >= target_var when given.
inline void add_nominal_eh_rows(conic::ConicProgram& p, const WHandle& w, int sigma,
                                int target_var, const Scenario& sc, const ChannelSet& ch) {
  for (int k = 0; k < sc.n_ehr; ++k) {
    const HermitianMatrix gg(ch.g[k] * ch.g[k].adjoint());
    conic::LinExpr row;
    row.constant = sc.sigma_e2 - (target_var >= 0 ? 0.0 : sc.psi_e[k] / sc.eta);
    if (target_var >= 0) row.add(target_var, -1.0 / sc.eta);
    w.add_to(row, gg);
    row.add(sigma, gg);
    p.ineq_constraints.push_back(row);
  }
}

// q'(W+Sigma) q <= p_in[i].
inline void add_nominal_interference_rows(conic::ConicProgram& p, const WHandle& w, int sigma,
                                          const Scenario& sc, const ChannelSet& ch) {
  for (int i = 0; i < sc.n_pu; ++i) {
    const HermitianMatrix qq(ch.q[i] * ch.q[i].adjoint());
    conic::LinExpr row;
    row.constant = sc.p_in[i];
    w.add_to(row, qq, -1.0);
    row.add(sigma, HermitianMatrix(-qq.mat()));
    p.ineq_constraints.push_back(row);
  }
}

} // namespace detail

// Fixed-beta power minimization with exact CSI at every terminal.
inline WorstCaseSubproblem build_p3_nominal(double beta, const Scenario& sc, const ChannelSet& ch,
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

  detail::add_nominal_secrecy_rows(p, w, sp.sigma, sp.t, beta, sc, ch);
  detail::add_nominal_eh_rows(p, w, sp.sigma, -1, sc, ch);
  detail::add_nominal_interference_rows(p, w, sp.sigma, sc, ch);
  sp.s = add_su_harvest_rows(p, w, sp.sigma, sp.t, sc, ch);
  add_power_budget(p, w, sp.sigma, sc);
  return sp;
}

// Fixed-beta max-min harvested energy with exact CSI.
inline WorstCaseSubproblem build_p7_nominal(double beta, const Scenario& sc, const ChannelSet& ch,
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

  detail::add_nominal_secrecy_rows(p, w, sp.sigma, sp.t, beta, sc, ch);
  detail::add_nominal_eh_rows(p, w, sp.sigma, sp.tau, sc, ch);
  detail::add_nominal_interference_rows(p, w, sp.sigma, sc, ch);
  sp.s = add_su_harvest_rows(p, w, sp.sigma, sp.t, sc, ch);
  add_power_budget(p, w, sp.sigma, sc);
  return sp;
}

inline InnerPoint eval_perfect(ProblemKind kind, double beta, const Scenario& sc,
                               const ChannelSet& ch, const ComplexVector& fixed_dir = {}) {
  // At beta = 1 the leakage caps force W g_k = 0 for every eavesdropper; when
  // the g_k span the whole space that pins W to zero and a positive rate
  // target cannot be met.  Like the bounded beta = 1 point this face-forced
  // infeasibility has no clean dual certificate, so classify it analytically.
  if (beta <= 1.0 && sc.r_min > 0.0 && sc.n_ehr >= sc.n_t) {
    Eigen::MatrixXcd gs(sc.n_t, sc.n_ehr);
    for (int k = 0; k < sc.n_ehr; ++k) gs.col(k) = ch.g[k];
    if (Eigen::ColPivHouseholderQR<Eigen::MatrixXcd>(gs).rank() == sc.n_t) {
      InnerPoint pt;
      pt.status = conic::SolveStatus::Infeasible;
      pt.message = "beta = 1 needs the beamformer to null every eavesdropper";
      return pt;
    }
  }
  const WorstCaseSubproblem sp = kind == ProblemKind::PowerMin
                                     ? build_p3_nominal(beta, sc, ch, fixed_dir)
                                     : build_p7_nominal(beta, sc, ch, fixed_dir);
  const conic::ConicSolution sol = conic::solve(sp.program, 1e-8);
  InnerPoint pt;
  pt.status = sol.status;
  pt.message = sol.message;
  if (sol.status != conic::SolveStatus::Optimal) return pt;
  pt.objective = kind == ProblemKind::PowerMin ? sol.objective : -sol.objective;
  pt.design.problem = to_string(kind);
  pt.design.model = "perfect";
  pt.design.search_param = beta;
  pt.design.objective = pt.objective;
  detail::fill_design(pt.design, sol, sp.w, sp.sigma, sp.t, sp.w_scale, sp.w_direction);
  return pt;
}

// Rank-one repair for the baseline; same candidate stream and acceptance rule
// as the robust pipeline, re-solving the nominal inner problem per direction.
inline Design extract_beamformer_perfect(Design d, const Scenario& sc, const ChannelSet& ch,
                                         int candidates = 100) {
  const ProblemKind kind =
      d.problem == "maxmin-eh" ? ProblemKind::MaxMinEH : ProblemKind::PowerMin;
  const RankInfo ri = numerical_rank(d.W);
  d.rank_W = ri.rank;
  d.ratio_W = ri.ratio;
  if (ri.ratio <= 1e-6) {
    const HermitianEig e = eig_hermitian(d.W);
    d.w = std::sqrt(std::max(e.values[0], 0.0)) * e.vectors.col(0);
    d.extraction = "direct";
    return d;
  }
  const double flip = kind == ProblemKind::PowerMin ? 1.0 : -1.0;
  const Eigen::MatrixXcd half = psd_sqrt(d.W).mat();
  RngStream rng(sc.rng_seed, 17);

  Design best = d;
  best.w.reset();
  best.extraction = "rank_gt_one";
  bool found = false;
  double best_obj = 0.0;
  for (int l = 0; l < candidates; ++l) {
    const ComplexVector cand = half * rng.cnormal_vector(sc.n_t);
    if (cand.norm() < 1e-12) continue;
    const InnerPoint pt = eval_perfect(kind, d.search_param, sc, ch, cand);
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

inline SearchResult solve_design_perfect(ProblemKind kind, const Scenario& sc,
                                         const ChannelSet& ch,
                                         const SearchPlan* custom_plan = nullptr,
                                         int candidates = 100) {
  const SearchPlan plan = custom_plan ? *custom_plan : default_beta_plan(sc, ch.h);
  const InnerSolver solver = [&](double v) { return eval_perfect(kind, v, sc, ch); };
  SearchResult res = run_search(
      plan, solver, kind == ProblemKind::PowerMin ? ExtremumSense::Min : ExtremumSense::Max);
  if (res.status == SearchStatus::Ok)
    res.design = extract_beamformer_perfect(res.design, sc, ch, candidates);
  return res;
}

// ---- model twins ----

// Bounded-model view of a scenario: gaussian error specs are converted to the
// statistically matched ball radii; bounded scenarios pass through unchanged.
inline Scenario as_bounded_twin(const Scenario& sc) {
  if (sc.errors.model == ErrorSpec::Model::Bounded) return sc;
  Scenario b = sc;
  const BoundedRadii r = effective_radii(sc);
  b.errors.model = ErrorSpec::Model::Bounded;
  b.errors.xi_e = r.xi_e;
  b.errors.xi_p = r.xi_p;
  b.errors.eps2_e.clear();
  b.errors.eps2_q.clear();
  return b;
}

// Zero-radius twin: validating against it checks constraints at the channel
// estimates themselves (used for perfect-CSI designs).
inline Scenario zero_error_twin(const Scenario& sc) {
  Scenario b = sc;
  b.errors.model = ErrorSpec::Model::Bounded;
  b.errors.xi_e.assign(sc.n_ehr, 0.0);
  b.errors.xi_p.assign(sc.n_pu, 0.0);
  b.errors.eps2_e.clear();
  b.errors.eps2_q.clear();
  return b;
}

// ---- run configuration ----

struct GridSpec {
  enum class Kind { Default, Uniform, Log };
  Kind kind = Kind::Default;
  double step = 0.0; // uniform spacing in the search parameter
  int points = 0;    // log-grid point count
};

// "uniform:<step>" or "log:<points>"; empty keeps the model's default plan.
inline GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  if (text.empty()) return g;
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("grid: expected uniform:<step> or log:<points>");
  const std::string head = text.substr(0, colon), tail = text.substr(colon + 1);
  if (head == "uniform") {
    g.kind = GridSpec::Kind::Uniform;
    g.step = std::stod(tail);
    if (!(g.step > 0.0)) throw std::invalid_argument("grid: step must be positive");
  } else if (head == "log") {
    g.kind = GridSpec::Kind::Log;
    g.points = std::stoi(tail);
    if (g.points < 2) throw std::invalid_argument("grid: needs at least 2 points");
  } else {
    throw std::invalid_argument("grid: unknown kind '" + head + "'");
  }
  return g;
}

inline void apply_grid(SearchPlan& plan, const GridSpec& g) {
  switch (g.kind) {
    case GridSpec::Kind::Default:
      return;
    case GridSpec::Kind::Uniform:
      plan.uniform = true;
      plan.grid_points =
          plan.hi > plan.lo
              ? 1 + static_cast<int>(std::ceil((plan.hi - plan.lo) / g.step - 1e-12))
              : 1;
      return;
    case GridSpec::Kind::Log:
      plan.uniform = false;
      plan.grid_points = g.points;
      return;
  }
}

struct RunConfig {
  ProblemKind problem = ProblemKind::PowerMin;
  int realizations = 20;
  int validation_samples = 1000; // 0 skips validation
  int candidates = 100;          // rank-one repair attempts
  GridSpec grid;
  bool timing = false; // when false solve_ms is reported as 0 (deterministic output)
};

struct InstanceOutcome {
  SearchResult search;
  int validation = -1; // 1 pass, 0 fail, -1 not run
  long solve_ms = 0;
};

// Solve one channel realization under the requested model and validate the
// design with the matching checker.  "bounded" accepts gaussian scenarios via
// the calibrated twin; "outage" demands a gaussian error spec.
inline InstanceOutcome run_instance(const std::string& model, const Scenario& sc,
                                    const ChannelSet& ch, const RunConfig& cfg) {
  InstanceOutcome oc;
  const auto start = std::chrono::steady_clock::now();
  Scenario checked = sc;
  if (model == "bounded") {
    checked = as_bounded_twin(sc);
    SearchPlan plan = default_beta_plan(checked, ch.h);
    apply_grid(plan, cfg.grid);
    oc.search = solve_design(cfg.problem, checked, ch, &plan, cfg.candidates);
  } else if (model == "outage") {
    if (sc.errors.model != ErrorSpec::Model::Gaussian)
      throw std::invalid_argument("run_instance: outage model needs a gaussian error spec");
    SearchPlan plan = default_z_plan();
    apply_grid(plan, cfg.grid);
    oc.search = solve_design(cfg.problem, sc, ch, &plan, cfg.candidates);
  } else if (model == "perfect") {
    checked = zero_error_twin(sc);
    SearchPlan plan = default_beta_plan(sc, ch.h);
    apply_grid(plan, cfg.grid);
    oc.search = solve_design_perfect(cfg.problem, sc, ch, &plan, cfg.candidates);
  } else {
    throw std::invalid_argument("run_instance: unknown model '" + model + "'");
  }
  if (cfg.timing) {
    const auto stop = std::chrono::steady_clock::now();
    oc.solve_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
  }
  if (oc.search.status == SearchStatus::Ok && cfg.validation_samples > 0) {
    const ValidationReport rep =
        model == "outage"
            ? validate_outage(oc.search.design, checked, ch, cfg.validation_samples)
            : validate_bounded(oc.search.design, checked, ch, cfg.validation_samples);
    oc.validation = rep.pass ? 1 : 0;
  }
  return oc;
}

// ---- axis sweeps ----

enum class SweepAxis { RMin, Ehrs, Antennas };

inline SweepAxis parse_axis(const std::string& name) {
  if (name == "rmin") return SweepAxis::RMin;
  if (name == "ehrs") return SweepAxis::Ehrs;
  if (name == "antennas") return SweepAxis::Antennas;
  throw std::invalid_argument("axis: expected rmin, ehrs or antennas, got '" + name + "'");
}

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::RMin: return "rmin";
    case SweepAxis::Ehrs: return "ehrs";
    default: return "antennas";
  }
}

// "a:b:step" inclusive, or a single number.
inline std::vector<double> parse_value_range(const std::string& text) {
  std::vector<double> parts;
  std::string::size_type pos = 0;
  while (true) {
    const auto colon = text.find(':', pos);
    parts.push_back(std::stod(text.substr(pos, colon - pos)));
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw std::invalid_argument("values: expected a:b:step or a single number");
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0.0)) throw std::invalid_argument("values: step must be positive");
  if (b < a) throw std::invalid_argument("values: range end precedes start");
  const int n = 1 + static_cast<int>(std::floor((b - a) / step + 1e-9));
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + i * step;
  return out;
}

namespace detail {

inline void resize_fill(std::vector<double>& v, int n) {
  if (!v.empty()) v.resize(n, v.back());
}

} // namespace detail

// Copy of the scenario with one knob moved.  Count axes extend per-link lists
// with their last entry.
inline Scenario apply_axis(Scenario sc, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::RMin:
      if (value < 0) throw std::invalid_argument("axis rmin: negative target");
      sc.r_min = value;
      return sc;
    case SweepAxis::Ehrs: {
      const int k = static_cast<int>(std::llround(value));
      if (k < 1) throw std::invalid_argument("axis ehrs: needs at least one receiver");
      sc.n_ehr = k;
      detail::resize_fill(sc.psi_e, k);
      detail::resize_fill(sc.outage.eh, k);
      detail::resize_fill(sc.errors.xi_e, k);
      detail::resize_fill(sc.errors.eps2_e, k);
      return sc;
    }
    default: {
      const int n = static_cast<int>(std::llround(value));
      if (n < 1) throw std::invalid_argument("axis antennas: needs at least one antenna");
      sc.n_t = n;
      return sc;
    }
  }
}

struct SweepRow {
  int instance_id = 0;
  std::string model, problem;
  double axis_value = 0.0;
  int n_t = 0, n_ehr = 0, n_pu = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double rho = std::numeric_limits<double>::quiet_NaN();
  double search_param = std::numeric_limits<double>::quiet_NaN();
  int rank_w = -1;
  double ratio_w = std::numeric_limits<double>::quiet_NaN();
  int rank_sigma = -1;
  std::string status;
  int validation = -1;
  long solve_ms = 0;
};

struct AxisSummary {
  double axis_value = 0.0;
  int feasible = 0, infeasible = 0, failed = 0;
  double mean_objective = std::numeric_limits<double>::quiet_NaN(); // over feasible rows
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<AxisSummary> summary;
};

namespace detail {

inline const char* row_status(SearchStatus s) {
  switch (s) {
    case SearchStatus::Ok: return "optimal";
    case SearchStatus::AllInfeasible: return "infeasible";
    default: return "numerical_failure";
  }
}

inline SweepRow make_row(int id, const std::string& model, ProblemKind kind, double axis_value,
                         const Scenario& sc, const InstanceOutcome& oc) {
  SweepRow r;
  r.instance_id = id;
  r.model = model;
  r.problem = to_string(kind);
  r.axis_value = axis_value;
  r.n_t = sc.n_t;
  r.n_ehr = sc.n_ehr;
  r.n_pu = sc.n_pu;
  r.status = row_status(oc.search.status);
  r.validation = oc.validation;
  r.solve_ms = oc.solve_ms;
  if (oc.search.status == SearchStatus::Ok) {
    const Design& d = oc.search.design;
    r.objective = d.objective;
    r.rho = d.rho;
    r.search_param = d.search_param;
    r.rank_w = d.rank_W;
    r.ratio_w = d.ratio_W;
    r.rank_sigma = d.rank_Sigma;
  }
  return r;
}

} // namespace detail

// Channel realization r of any scenario comes from stream (rng_seed, 100+r),
// so runs that only differ in model or problem face identical channels.
inline ChannelSet realization_channels(const Scenario& sc, int r) {
  RngStream rng(sc.rng_seed, 100 + static_cast<std::uint64_t>(r));
  return sample_channels(sc, rng);
}

// Solver failures and infeasible instances become rows like any other; only
// malformed requests throw.
inline SweepResult run_sweep(const Scenario& base, SweepAxis axis,
                             const std::vector<double>& values, const std::string& model,
                             const RunConfig& cfg) {
  if (values.empty()) throw std::invalid_argument("run_sweep: no axis values");
  if (cfg.realizations < 1) throw std::invalid_argument("run_sweep: needs a realization");
  SweepResult out;
  int id = 0;
  for (double v : values) {
    const Scenario sc = apply_axis(base, axis, v);
    AxisSummary agg;
    agg.axis_value = v;
    double sum = 0.0;
    for (int r = 0; r < cfg.realizations; ++r) {
      const ChannelSet ch = realization_channels(sc, r);
      const InstanceOutcome oc = run_instance(model, sc, ch, cfg);
      out.rows.push_back(detail::make_row(id++, model, cfg.problem, v, sc, oc));
      if (oc.search.status == SearchStatus::Ok) {
        ++agg.feasible;
        sum += oc.search.design.objective;
      } else if (oc.search.status == SearchStatus::AllInfeasible) {
        ++agg.infeasible;
      } else {
        ++agg.failed;
      }
    }
    if (agg.feasible > 0) agg.mean_objective = sum / agg.feasible;
    out.summary.push_back(agg);
  }
  return out;
}

// ---- matched model comparison ----

struct CdfRow {
  int instance_id = 0;
  std::string model, problem;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::string status;
  int validation = -1;
  int cdf_rank = -1; // feasible designs of this model with objective <= ours
  double cdf_fraction = std::numeric_limits<double>::quiet_NaN();
};

struct CdfResult {
  std::vector<CdfRow> rows;
  std::vector<std::string> models;
  // per model, objective per realization index; NaN where not solved
  std::map<std::string, std::vector<double>> matched;
};

// Runs every model the scenario supports on the same channel realizations;
// gaussian scenarios additionally get the calibrated bounded twin.
inline CdfResult run_cdf(const Scenario& sc, const RunConfig& cfg) {
  if (cfg.realizations < 1) throw std::invalid_argument("run_cdf: needs a realization");
  CdfResult out;
  out.models = {"perfect", "bounded"};
  if (sc.errors.model == ErrorSpec::Model::Gaussian) out.models.push_back("outage");
  for (const std::string& m : out.models)
    out.matched[m].assign(cfg.realizations, std::numeric_limits<double>::quiet_NaN());

  for (int r = 0; r < cfg.realizations; ++r) {
    const ChannelSet ch = realization_channels(sc, r);
    for (const std::string& m : out.models) {
      const InstanceOutcome oc = run_instance(m, sc, ch, cfg);
      CdfRow row;
      row.instance_id = r;
      row.model = m;
      row.problem = to_string(cfg.problem);
      row.status = detail::row_status(oc.search.status);
      row.validation = oc.validation;
      if (oc.search.status == SearchStatus::Ok) {
        row.objective = oc.search.design.objective;
        out.matched[m][r] = row.objective;
      }
      out.rows.push_back(row);
    }
  }

  for (const std::string& m : out.models) {
    std::vector<double> ok;
    for (double v : out.matched[m])
      if (std::isfinite(v)) ok.push_back(v);
    if (ok.empty()) continue;
    std::sort(ok.begin(), ok.end());
    for (CdfRow& row : out.rows) {
      if (row.model != m || !std::isfinite(row.objective)) continue;
      const auto up = std::upper_bound(ok.begin(), ok.end(), row.objective);
      row.cdf_rank = static_cast<int>(up - ok.begin());
      row.cdf_fraction = static_cast<double>(row.cdf_rank) / static_cast<double>(ok.size());
    }
  }
  return out;
}

// ---- CSV emission ----

namespace detail {

inline std::string csv_num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_flag(int v) { return v < 0 ? "" : std::to_string(v); }

} // namespace detail

inline std::string sweep_csv(const SweepResult& res) {
  std::string out =
      "instance_id,model,problem,axis_value,n_t,K,M,objective_w,rho,search_param,"
      "rank_w,ratio_w,rank_sigma,status,validation_pass,solve_ms\n";
  for (const SweepRow& r : res.rows) {
    out += std::to_string(r.instance_id) + ',' + r.model + ',' + r.problem + ',' +
           detail::csv_num(r.axis_value) + ',' + std::to_string(r.n_t) + ',' +
           std::to_string(r.n_ehr) + ',' + std::to_string(r.n_pu) + ',' +
           detail::csv_num(r.objective) + ',' + detail::csv_num(r.rho) + ',' +
           detail::csv_num(r.search_param) + ',' + detail::csv_flag(r.rank_w) + ',' +
           detail::csv_num(r.ratio_w) + ',' + detail::csv_flag(r.rank_sigma) + ',' + r.status +
           ',' + detail::csv_flag(r.validation) + ',' + std::to_string(r.solve_ms) + '\n';
  }
  return out;
}

inline std::string cdf_csv(const CdfResult& res) {
  std::string out =
      "instance_id,model,problem,objective_w,status,validation_pass,cdf_rank,cdf_fraction\n";
  for (const CdfRow& r : res.rows) {
    out += std::to_string(r.instance_id) + ',' + r.model + ',' + r.problem + ',' +
           detail::csv_num(r.objective) + ',' + r.status + ',' + detail::csv_flag(r.validation) +
           ',' + detail::csv_flag(r.cdf_rank) + ',' + detail::csv_num(r.cdf_fraction) + '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("short write to " + path);
}

} // namespace secbeam

#endif
