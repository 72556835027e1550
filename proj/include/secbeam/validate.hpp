#ifndef SECBEAM_VALIDATE_HPP
#define SECBEAM_VALIDATE_HPP

// Independent design validation.  Nothing here reuses the conic machinery:
// bounded designs are checked against the exact trust-region extremum over
// each error ball plus uniform ball sampling, probabilistic designs against
// empirical violation frequencies under fresh Gaussian error draws.  The
// checks are deliberately one-sided so a solver bug cannot hide behind its
// own constraint rows.

#include <secbeam/metrics.hpp>
#include <secbeam/scenario.hpp>
#include <secbeam/worstcase.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace secbeam {

// One row per physical constraint.  Bounded checks fill exact/sampled worst
// values; probabilistic checks fill the empirical rate and its 95% interval.
// Unused fields stay NaN and serialize as null.
struct ConstraintCheck {
  std::string name;
  double exact_worst = std::numeric_limits<double>::quiet_NaN();
  double sampled_worst = std::numeric_limits<double>::quiet_NaN();
  double empirical_rate = std::numeric_limits<double>::quiet_NaN();
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  double threshold = std::numeric_limits<double>::quiet_NaN();
  double budget = std::numeric_limits<double>::quiet_NaN(); // outage budget
  bool pass = false;
};

struct ValidationReport {
  bool pass = false;
  int samples = 0;
  std::vector<ConstraintCheck> constraints;
};

namespace detail {

// Feasibility slack below which a worst-case check is accepted; matches the
// default solver tolerance headroom used throughout.
constexpr double kValidateSlack = 1e-6;

// The harvesting floor each EHR must robustly meet: the scenario target for
// power minimization, the achieved objective for max-min designs (which
// claim exactly that value is guaranteed).
inline double eh_floor(const Design& d, const Scenario& sc, int k) {
  return d.problem == "maxmin-eh" ? d.objective : sc.psi_e[k];
}

// Exact worst-case eavesdropper SINR over the ball ||g - gbar|| <= xi via
// the level-set root: phi(nu) = max_ball g'(W - nu Sigma)g - nu sigma_e2 is
// strictly decreasing (every g contributes slope <= -sigma_e2), so the
// worst-case SINR is its unique nonnegative root.
inline double worst_eaves_sinr(const HermitianMatrix& w, const HermitianMatrix& sigma,
                               const ComplexVector& gbar, double sigma_e2, double xi) {
  auto phi = [&](double nu) {
    const HermitianMatrix a(w.mat() - nu * sigma.mat());
    const ComplexVector b = a.mat() * gbar;
    const double c = quadratic_form(a, gbar) - nu * sigma_e2;
    return worst_case_quadratic(a, b, c, xi, ExtremumSense::Max).value;
  };
  if (phi(0.0) <= 0.0) return 0.0; // signal power vanishes on the whole ball
  double lo = 0.0, hi = 1.0;
  while (phi(hi) > 0.0) hi *= 2.0;
  while (hi - lo > 1e-12 * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline ConstraintCheck deterministic_checks(const Design& d, const Scenario& sc,
                                            const ComplexVector& h, bool power_budget) {
  ConstraintCheck c;
  if (power_budget) {
    c.name = "power_budget";
    c.exact_worst = d.W.mat().trace().real() + d.Sigma.mat().trace().real();
    c.sampled_worst = c.exact_worst;
    c.threshold = sc.p_th;
    c.pass = c.exact_worst <= c.threshold + kValidateSlack;
  } else {
    c.name = "su_harvest";
    c.exact_worst = harvested_energy_su(d, h, sc.sigma_s2, sc.eta);
    c.sampled_worst = c.exact_worst;
    c.threshold = sc.psi_s;
    c.pass = c.exact_worst >= c.threshold - kValidateSlack;
  }
  return c;
}

} // namespace detail

// Worst-case validation of a bounded-model design: per-constraint exact
// extremum over the error ball (trust-region oracle) plus n_samples uniform
// ball draws.  The verdict rests on the exact values alone; samples are
// reported so the exact bound can be seen to dominate them.
inline ValidationReport validate_bounded(const Design& d, const Scenario& sc,
                                         const ChannelSet& ch, int n_samples = 10000) {
  if (n_samples < 1) throw std::invalid_argument("validate_bounded: n_samples must be >= 1");
  const BoundedRadii radii = effective_radii(sc);
  const double cs = su_rate(d.W, d.Sigma, d.rho, ch.h, sc.sigma_s2, sc.sigma_sp2);
  const HermitianMatrix total(d.W.mat() + d.Sigma.mat());
  RngStream rng(sc.rng_seed, 29);

  ValidationReport rep;
  rep.samples = n_samples;
  rep.pass = true;
  auto push = [&](ConstraintCheck c) {
    rep.pass = rep.pass && c.pass;
    rep.constraints.push_back(std::move(c));
  };

  for (int k = 0; k < sc.n_ehr; ++k) {
    const double xi = radii.xi_e[k];
    ConstraintCheck sec;
    sec.name = "secrecy_" + std::to_string(k);
    sec.threshold = sc.r_min;
    sec.exact_worst =
        cs - log2_1p(detail::worst_eaves_sinr(d.W, d.Sigma, ch.g[k], sc.sigma_e2, xi));
    sec.pass = sec.exact_worst >= sc.r_min - detail::kValidateSlack;

    ConstraintCheck eh;
    eh.name = "eh_" + std::to_string(k);
    eh.threshold = detail::eh_floor(d, sc, k);
    {
      const ComplexVector b = total.mat() * ch.g[k];
      const double c0 = quadratic_form(total, ch.g[k]) + sc.sigma_e2;
      eh.exact_worst =
          sc.eta * worst_case_quadratic(total, b, c0, xi, ExtremumSense::Min).value;
    }
    eh.pass = eh.exact_worst >= eh.threshold - detail::kValidateSlack;

    double sec_sample = std::numeric_limits<double>::infinity();
    double eh_sample = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n_samples; ++t) {
      const ComplexVector g = ch.g[k] + sample_bounded_error(xi, sc.n_t, rng);
      sec_sample = std::min(sec_sample, cs - eaves_rate(d.W, d.Sigma, g, sc.sigma_e2));
      eh_sample = std::min(eh_sample, harvested_energy_ehr(d, g, sc.sigma_e2, sc.eta));
    }
    sec.sampled_worst = sec_sample;
    eh.sampled_worst = eh_sample;
    push(std::move(sec));
    push(std::move(eh));
  }

  for (int i = 0; i < sc.n_pu; ++i) {
    const double xi = radii.xi_p[i];
    ConstraintCheck intf;
    intf.name = "interference_" + std::to_string(i);
    intf.threshold = sc.p_in[i];
    {
      const ComplexVector b = total.mat() * ch.q[i];
      const double c0 = quadratic_form(total, ch.q[i]);
      intf.exact_worst = worst_case_quadratic(total, b, c0, xi, ExtremumSense::Max).value;
    }
    intf.pass = intf.exact_worst <= sc.p_in[i] + detail::kValidateSlack;
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < n_samples; ++t) {
      const ComplexVector q = ch.q[i] + sample_bounded_error(xi, sc.n_t, rng);
      worst = std::max(worst, interference_power(d, q));
    }
    intf.sampled_worst = worst;
    push(std::move(intf));
  }

  push(detail::deterministic_checks(d, sc, ch.h, false));
  push(detail::deterministic_checks(d, sc, ch.h, true));
  return rep;
}

// Empirical validation of a probabilistic-model design: violation frequency
// of each chance constraint under fresh Gaussian error draws.  A constraint
// passes when its empirical rate stays within the budgeted outage plus three
// binomial standard deviations (finite-sample noise must not fail a design
// the approximation certifies).
inline ValidationReport validate_outage(const Design& d, const Scenario& sc,
                                        const ChannelSet& ch, int n_samples = 10000) {
  if (n_samples < 1) throw std::invalid_argument("validate_outage: n_samples must be >= 1");
  if (sc.errors.model != ErrorSpec::Model::Gaussian)
    throw std::invalid_argument("validate_outage: scenario carries no Gaussian error spec");
  const double cs = su_rate(d.W, d.Sigma, d.rho, ch.h, sc.sigma_s2, sc.sigma_sp2);
  RngStream rng(sc.rng_seed, 31);

  std::vector<int> sec_viol(sc.n_ehr, 0), eh_viol(sc.n_ehr, 0), intf_viol(sc.n_pu, 0);
  for (int t = 0; t < n_samples; ++t) {
    for (int k = 0; k < sc.n_ehr; ++k) {
      const ComplexVector g =
          ch.g[k] + sample_gaussian_error(sc.errors.eps2_e[k], sc.n_t, rng);
      if (cs - eaves_rate(d.W, d.Sigma, g, sc.sigma_e2) < sc.r_min) ++sec_viol[k];
      if (harvested_energy_ehr(d, g, sc.sigma_e2, sc.eta) < detail::eh_floor(d, sc, k))
        ++eh_viol[k];
    }
    for (int i = 0; i < sc.n_pu; ++i) {
      const ComplexVector q =
          ch.q[i] + sample_gaussian_error(sc.errors.eps2_q[i], sc.n_t, rng);
      if (interference_power(d, q) > sc.p_in[i]) ++intf_viol[i];
    }
  }

  ValidationReport rep;
  rep.samples = n_samples;
  rep.pass = true;
  auto push = [&](const std::string& name, int violations, double budget, double threshold) {
    ConstraintCheck c;
    c.name = name;
    c.budget = budget;
    c.threshold = threshold;
    c.empirical_rate = static_cast<double>(violations) / n_samples;
    const double half =
        1.96 * std::sqrt(c.empirical_rate * (1.0 - c.empirical_rate) / n_samples);
    c.ci_low = std::max(0.0, c.empirical_rate - half);
    c.ci_high = std::min(1.0, c.empirical_rate + half);
    const double sigma = std::sqrt(budget * (1.0 - budget) / n_samples);
    c.pass = c.empirical_rate <= budget + 3.0 * sigma;
    rep.pass = rep.pass && c.pass;
    rep.constraints.push_back(std::move(c));
  };

  for (int k = 0; k < sc.n_ehr; ++k)
    push("secrecy_" + std::to_string(k), sec_viol[k], sc.outage.secrecy, sc.r_min);
  for (int k = 0; k < sc.n_ehr; ++k)
    push("eh_" + std::to_string(k), eh_viol[k], sc.outage.eh[k], detail::eh_floor(d, sc, k));
  for (int i = 0; i < sc.n_pu; ++i)
    push("interference_" + std::to_string(i), intf_viol[i], sc.outage.interference[i],
         sc.p_in[i]);

  auto push_det = [&](ConstraintCheck c) {
    rep.pass = rep.pass && c.pass;
    rep.constraints.push_back(std::move(c));
  };
  push_det(detail::deterministic_checks(d, sc, ch.h, false));
  push_det(detail::deterministic_checks(d, sc, ch.h, true));
  return rep;
}

// ---- empirical CDF ----

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values) : v_(std::move(values)) {
    if (v_.empty()) throw std::invalid_argument("empirical_cdf: empty sample");
    std::sort(v_.begin(), v_.end());
  }

  // Right-continuous: fraction of the sample <= x.
  double query(double x) const {
    const auto it = std::upper_bound(v_.begin(), v_.end(), x);
    return static_cast<double>(it - v_.begin()) / static_cast<double>(v_.size());
  }

  const std::vector<double>& sorted() const { return v_; }

  // Jump points (unique values with the CDF level attained there).
  std::vector<std::pair<double, double>> steps() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (i + 1 < v_.size() && v_[i + 1] == v_[i]) continue;
      out.emplace_back(v_[i], static_cast<double>(i + 1) / static_cast<double>(v_.size()));
    }
    return out;
  }

  double quantile(double p) const {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p outside [0,1]");
    const std::size_t idx = std::min(
        v_.size() - 1, static_cast<std::size_t>(std::ceil(p * v_.size())) -
                           (p > 0.0 ? 1 : 0));
    return v_[idx];
  }

 private:
  std::vector<double> v_;
};

inline EmpiricalCdf empirical_cdf(std::vector<double> values) {
  return EmpiricalCdf(std::move(values));
}

// ---- report JSON ----

inline nlohmann::json to_json(const ConstraintCheck& c) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  return {{"name", c.name},
          {"exact_worst", num(c.exact_worst)},
          {"sampled_worst", num(c.sampled_worst)},
          {"empirical_rate", num(c.empirical_rate)},
          {"ci_low", num(c.ci_low)},
          {"ci_high", num(c.ci_high)},
          {"threshold", num(c.threshold)},
          {"budget", num(c.budget)},
          {"pass", c.pass}};
}

inline nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : r.constraints) rows.push_back(to_json(c));
  return {{"pass", r.pass}, {"samples", r.samples}, {"constraints", rows}};
}

} // namespace secbeam

#endif
