#ifndef SECBEAM_SCENARIO_HPP
#define SECBEAM_SCENARIO_HPP

// System description: link budget constants, CSI error models, channel and
// error sampling, and the chi-square radius calibration that maps Gaussian
// error variances onto equivalent uncertainty-ball radii.

#include <secbeam/hermitian.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace secbeam {

inline double db_to_watts(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_db(double w) { return 10.0 * std::log10(w); }

// ---- regularized lower incomplete gamma, series + continued fraction ----

namespace detail {

inline double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace detail

// P(a, x) = gamma(a, x) / Gamma(a)
inline double gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw std::domain_error("gamma_p: bad arguments");
  if (x == 0) return 0.0;
  return x < a + 1.0 ? detail::gamma_p_series(a, x) : 1.0 - detail::gamma_q_contfrac(a, x);
}

inline double chi2_cdf(int dof, double x) { return gamma_p(0.5 * dof, 0.5 * x); }

// Quantile by safeguarded bisection; the bracket grows until it straddles p.
inline double chi2_quantile(int dof, double p) {
  if (dof <= 0 || p <= 0.0 || p >= 1.0) throw std::domain_error("chi2_quantile: bad arguments");
  double lo = 0.0, hi = std::max(1.0, 2.0 * dof);
  while (chi2_cdf(dof, hi) < p) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (chi2_cdf(dof, mid) < p ? lo : hi) = mid;
    if (hi - lo < 1e-10 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

// Ball radius that covers a CN(0, eps2*I) error of length n_t except with
// probability omega: xi = sqrt(eps2 * Finv_{2 n_t}(1 - omega) / 2).
inline double calibrate_radius(double eps2, int n_t, double omega) {
  if (eps2 < 0) throw std::domain_error("calibrate_radius: negative variance");
  if (eps2 == 0) return 0.0;
  return std::sqrt(0.5 * eps2 * chi2_quantile(2 * n_t, 1.0 - omega));
}

// ---- deterministic RNG streams ----

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace detail

// One stream per (seed, task) pair; streams with different task indices are
// decorrelated by hashing before seeding the generator.  Gaussians come from
// an explicit Box-Muller so draws do not depend on the standard library's
// distribution internals.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t task) {
    std::uint64_t s = seed;
    std::uint64_t a = detail::splitmix64(s);
    s = task ^ 0xa02bdbf7bb3c0a7ULL;
    std::uint64_t b = detail::splitmix64(s);
    s = a ^ (b + 0x9e3779b97f4a7c15ULL);
    gen_.seed(detail::splitmix64(s));
  }

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform(); // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  cplx cnormal() { return cplx(normal() * M_SQRT1_2, normal() * M_SQRT1_2); } // CN(0,1)

  ComplexVector cnormal_vector(int n) {
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) v[i] = cnormal();
    return v;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---- scenario description ----

struct ErrorSpec {
  enum class Model { Bounded, Gaussian };
  Model model = Model::Gaussian;
  std::vector<double> xi_e, xi_p;     // bounded: ball radii per EHR / per PU link
  std::vector<double> eps2_e, eps2_q; // gaussian: per-entry error variances
};

struct OutageProbs {
  double secrecy = 0.05;
  std::vector<double> eh;
  std::vector<double> interference;
};

struct Scenario {
  int n_t = 4;
  int n_ehr = 3; // potential eavesdroppers harvesting energy
  int n_pu = 2;  // primary users

  double eta = 1.0;     // energy conversion efficiency
  double p_th = 0.0;    // transmit power budget [W]
  std::vector<double> p_in;  // per-PU interference caps [W]
  double psi_s = 0.0;        // SU harvesting target [W]
  std::vector<double> psi_e; // per-EHR harvesting targets [W]
  double sigma_s2 = 0.1, sigma_e2 = 0.1, sigma_sp2 = 0.01;
  double r_min = 1.5; // secrecy rate target [bit/s/Hz]

  double gain_h = 1.0, gain_g = 1.0, gain_q = 0.1; // per-entry channel variances

  OutageProbs outage;
  ErrorSpec errors;
  std::uint64_t rng_seed = 1;
};

struct ChannelSet {
  ComplexVector h;                // SU channel
  std::vector<ComplexVector> g;   // EHR channels
  std::vector<ComplexVector> q;   // PU channels
};

inline Scenario default_scenario(int n_t = 4) {
  Scenario s;
  s.n_t = n_t;
  s.n_ehr = 3;
  s.n_pu = 2;
  s.eta = 1.0;
  s.p_th = db_to_watts(2.0);
  s.p_in.assign(s.n_pu, db_to_watts(-10.0));
  s.psi_s = dbm_to_watts(22.0);
  s.psi_e.assign(s.n_ehr, dbm_to_watts(23.0));
  s.sigma_s2 = 0.1;
  s.sigma_e2 = 0.1;
  s.sigma_sp2 = 0.01;
  s.r_min = 1.5;
  s.outage.secrecy = 0.05;
  s.outage.eh.assign(s.n_ehr, 0.05);
  s.outage.interference.assign(s.n_pu, 0.05);
  s.errors.model = ErrorSpec::Model::Gaussian;
  s.errors.eps2_e.assign(s.n_ehr, 0.001);
  s.errors.eps2_q.assign(s.n_pu, 0.0001);
  s.rng_seed = 1;
  return s;
}

// Radii for the bounded model.  Gaussian scenarios are converted through
// calibrate_radius with the per-link outage budgets so both models face a
// statistically matched uncertainty set.
struct BoundedRadii {
  std::vector<double> xi_e, xi_p;
};

inline BoundedRadii effective_radii(const Scenario& s) {
  BoundedRadii r;
  if (s.errors.model == ErrorSpec::Model::Bounded) {
    r.xi_e = s.errors.xi_e;
    r.xi_p = s.errors.xi_p;
    return r;
  }
  r.xi_e.resize(s.n_ehr);
  r.xi_p.resize(s.n_pu);
  for (int k = 0; k < s.n_ehr; ++k)
    r.xi_e[k] = calibrate_radius(s.errors.eps2_e[k], s.n_t, s.outage.eh[k]);
  for (int i = 0; i < s.n_pu; ++i)
    r.xi_p[i] = calibrate_radius(s.errors.eps2_q[i], s.n_t, s.outage.interference[i]);
  return r;
}

// ---- samplers ----

inline ChannelSet sample_channels(const Scenario& s, RngStream& rng) {
  ChannelSet ch;
  ch.h = std::sqrt(s.gain_h) * rng.cnormal_vector(s.n_t);
  ch.g.resize(s.n_ehr);
  for (int k = 0; k < s.n_ehr; ++k) ch.g[k] = std::sqrt(s.gain_g) * rng.cnormal_vector(s.n_t);
  ch.q.resize(s.n_pu);
  for (int i = 0; i < s.n_pu; ++i) ch.q[i] = std::sqrt(s.gain_q) * rng.cnormal_vector(s.n_t);
  return ch;
}

// Uniform over the complex n-ball of radius xi: uniform direction, radius
// with density proportional to r^(2n-1).
inline ComplexVector sample_bounded_error(double xi, int n, RngStream& rng) {
  if (xi == 0.0) return ComplexVector::Zero(n);
  ComplexVector v = rng.cnormal_vector(n);
  double nrm = v.norm();
  while (nrm == 0.0) {
    v = rng.cnormal_vector(n);
    nrm = v.norm();
  }
  double r = xi * std::pow(rng.uniform(), 1.0 / (2.0 * n));
  return (r / nrm) * v;
}

inline ComplexVector sample_gaussian_error(const HermitianMatrix& cov_sqrt, RngStream& rng) {
  return cov_sqrt.mat() * rng.cnormal_vector(cov_sqrt.dim());
}

inline ComplexVector sample_gaussian_error(double eps2, int n, RngStream& rng) {
  return std::sqrt(eps2) * rng.cnormal_vector(n);
}

// ---- JSON config ----
//
// Power-like fields accept linear watts or an explicitly suffixed _db / _dbm
// variant.  Unknown keys are rejected so typos do not silently fall back to
// defaults.

namespace detail {

inline std::vector<double> number_or_list(const nlohmann::json& v, int count, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.assign(count, v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.get<double>());
    if (static_cast<int>(out.size()) != count)
      throw std::runtime_error("scenario: field " + key + " expects " + std::to_string(count) +
                               " entries, got " + std::to_string(out.size()));
  } else {
    throw std::runtime_error("scenario: field " + key + " must be a number or list");
  }
  return out;
}

} // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "n_t", "n_ehr", "n_pu", "eta",
      "p_th", "p_th_db", "p_th_dbm",
      "p_in", "p_in_db", "p_in_dbm",
      "psi_s", "psi_s_db", "psi_s_dbm",
      "psi_e", "psi_e_db", "psi_e_dbm",
      "sigma_s2", "sigma_e2", "sigma_sp2", "r_min",
      "gain_h", "gain_g", "gain_q",
      "outage_probs", "error_spec", "rng_seed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::runtime_error("scenario: unknown key '" + it.key() + "'");

  auto pick_power = [&](const std::string& base, double fallback) {
    int hits = j.count(base) + j.count(base + "_db") + j.count(base + "_dbm");
    if (hits > 1) throw std::runtime_error("scenario: conflicting units for " + base);
    if (j.count(base)) return j.at(base).get<double>();
    if (j.count(base + "_db")) return db_to_watts(j.at(base + "_db").get<double>());
    if (j.count(base + "_dbm")) return dbm_to_watts(j.at(base + "_dbm").get<double>());
    return fallback;
  };

  Scenario s = default_scenario();
  s.n_t = j.value("n_t", s.n_t);
  s.n_ehr = j.value("n_ehr", s.n_ehr);
  s.n_pu = j.value("n_pu", s.n_pu);
  if (s.n_t < 1 || s.n_ehr < 1 || s.n_pu < 0)
    throw std::runtime_error("scenario: sizes out of range");
  s = [&] { // re-derive per-link defaults for the requested sizes
    Scenario d = default_scenario(s.n_t);
    d.n_ehr = s.n_ehr;
    d.n_pu = s.n_pu;
    d.p_in.assign(d.n_pu, db_to_watts(-10.0));
    d.psi_e.assign(d.n_ehr, dbm_to_watts(23.0));
    d.outage.eh.assign(d.n_ehr, 0.05);
    d.outage.interference.assign(d.n_pu, 0.05);
    d.errors.eps2_e.assign(d.n_ehr, 0.001);
    d.errors.eps2_q.assign(d.n_pu, 0.0001);
    return d;
  }();

  s.eta = j.value("eta", s.eta);
  s.p_th = pick_power("p_th", s.p_th);
  s.psi_s = pick_power("psi_s", s.psi_s);
  s.sigma_s2 = j.value("sigma_s2", s.sigma_s2);
  s.sigma_e2 = j.value("sigma_e2", s.sigma_e2);
  s.sigma_sp2 = j.value("sigma_sp2", s.sigma_sp2);
  s.r_min = j.value("r_min", s.r_min);
  s.gain_h = j.value("gain_h", s.gain_h);
  s.gain_g = j.value("gain_g", s.gain_g);
  s.gain_q = j.value("gain_q", s.gain_q);
  s.rng_seed = j.value("rng_seed", s.rng_seed);

  {
    int hits = j.count("p_in") + j.count("p_in_db") + j.count("p_in_dbm");
    if (hits > 1) throw std::runtime_error("scenario: conflicting units for p_in");
    if (j.count("p_in")) s.p_in = detail::number_or_list(j.at("p_in"), s.n_pu, "p_in");
    if (j.count("p_in_db")) {
      s.p_in = detail::number_or_list(j.at("p_in_db"), s.n_pu, "p_in_db");
      for (double& v : s.p_in) v = db_to_watts(v);
    }
    if (j.count("p_in_dbm")) {
      s.p_in = detail::number_or_list(j.at("p_in_dbm"), s.n_pu, "p_in_dbm");
      for (double& v : s.p_in) v = dbm_to_watts(v);
    }
    hits = j.count("psi_e") + j.count("psi_e_db") + j.count("psi_e_dbm");
    if (hits > 1) throw std::runtime_error("scenario: conflicting units for psi_e");
    if (j.count("psi_e")) s.psi_e = detail::number_or_list(j.at("psi_e"), s.n_ehr, "psi_e");
    if (j.count("psi_e_db")) {
      s.psi_e = detail::number_or_list(j.at("psi_e_db"), s.n_ehr, "psi_e_db");
      for (double& v : s.psi_e) v = db_to_watts(v);
    }
    if (j.count("psi_e_dbm")) {
      s.psi_e = detail::number_or_list(j.at("psi_e_dbm"), s.n_ehr, "psi_e_dbm");
      for (double& v : s.psi_e) v = dbm_to_watts(v);
    }
  }

  if (j.count("outage_probs")) {
    const auto& o = j.at("outage_probs");
    for (auto it = o.begin(); it != o.end(); ++it)
      if (it.key() != "secrecy" && it.key() != "eh" && it.key() != "interference")
        throw std::runtime_error("scenario: unknown outage key '" + it.key() + "'");
    s.outage.secrecy = o.value("secrecy", s.outage.secrecy);
    if (o.count("eh")) s.outage.eh = detail::number_or_list(o.at("eh"), s.n_ehr, "outage.eh");
    if (o.count("interference"))
      s.outage.interference = detail::number_or_list(o.at("interference"), s.n_pu, "outage.interference");
  }

  if (j.count("error_spec")) {
    const auto& e = j.at("error_spec");
    for (auto it = e.begin(); it != e.end(); ++it)
      if (it.key() != "model" && it.key() != "xi_e" && it.key() != "xi_p" &&
          it.key() != "eps2_e" && it.key() != "eps2_q")
        throw std::runtime_error("scenario: unknown error_spec key '" + it.key() + "'");
    std::string model = e.at("model").get<std::string>();
    if (model == "bounded") {
      s.errors.model = ErrorSpec::Model::Bounded;
      s.errors.eps2_e.clear();
      s.errors.eps2_q.clear();
      s.errors.xi_e = detail::number_or_list(e.at("xi_e"), s.n_ehr, "xi_e");
      s.errors.xi_p = detail::number_or_list(e.at("xi_p"), s.n_pu, "xi_p");
    } else if (model == "gaussian") {
      s.errors.model = ErrorSpec::Model::Gaussian;
      s.errors.xi_e.clear();
      s.errors.xi_p.clear();
      s.errors.eps2_e = detail::number_or_list(e.at("eps2_e"), s.n_ehr, "eps2_e");
      s.errors.eps2_q = detail::number_or_list(e.at("eps2_q"), s.n_pu, "eps2_q");
    } else {
      throw std::runtime_error("scenario: error_spec.model must be 'bounded' or 'gaussian'");
    }
  }

  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::runtime_error(std::string("scenario: ") + what);
  };
  require(s.eta > 0, "eta must be positive");
  require(s.p_th > 0, "p_th must be positive");
  require(s.psi_s >= 0, "psi_s must be nonnegative");
  require(s.sigma_s2 > 0 && s.sigma_e2 > 0, "noise variances must be positive");
  require(s.sigma_sp2 >= 0, "sigma_sp2 must be nonnegative");
  require(s.r_min >= 0, "r_min must be nonnegative");
  for (double v : s.p_in) require(v > 0, "p_in entries must be positive");
  for (double v : s.psi_e) require(v >= 0, "psi_e entries must be nonnegative");
  auto in01 = [](double w) { return w > 0 && w < 1; };
  require(in01(s.outage.secrecy), "secrecy outage prob must lie in (0,1)");
  for (double w : s.outage.eh) require(in01(w), "eh outage probs must lie in (0,1)");
  for (double w : s.outage.interference) require(in01(w), "interference outage probs must lie in (0,1)");
  if (s.errors.model == ErrorSpec::Model::Bounded) {
    for (double v : s.errors.xi_e) require(v >= 0, "xi_e entries must be nonnegative");
    for (double v : s.errors.xi_p) require(v >= 0, "xi_p entries must be nonnegative");
  } else {
    for (double v : s.errors.eps2_e) require(v >= 0, "eps2_e entries must be nonnegative");
    for (double v : s.errors.eps2_q) require(v >= 0, "eps2_q entries must be nonnegative");
  }
  return s;
}

inline nlohmann::json to_json(const Scenario& s) {
  nlohmann::json e;
  if (s.errors.model == ErrorSpec::Model::Bounded) {
    e = {{"model", "bounded"}, {"xi_e", s.errors.xi_e}, {"xi_p", s.errors.xi_p}};
  } else {
    e = {{"model", "gaussian"}, {"eps2_e", s.errors.eps2_e}, {"eps2_q", s.errors.eps2_q}};
  }
  return {
      {"n_t", s.n_t},
      {"n_ehr", s.n_ehr},
      {"n_pu", s.n_pu},
      {"eta", s.eta},
      {"p_th", s.p_th},
      {"p_in", s.p_in},
      {"psi_s", s.psi_s},
      {"psi_e", s.psi_e},
      {"sigma_s2", s.sigma_s2},
      {"sigma_e2", s.sigma_e2},
      {"sigma_sp2", s.sigma_sp2},
      {"r_min", s.r_min},
      {"gain_h", s.gain_h},
      {"gain_g", s.gain_g},
      {"gain_q", s.gain_q},
      {"outage_probs",
       {{"secrecy", s.outage.secrecy}, {"eh", s.outage.eh}, {"interference", s.outage.interference}}},
      {"error_spec", e},
      {"rng_seed", s.rng_seed},
  };
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return scenario_from_json(j);
}

} // namespace secbeam

#endif
