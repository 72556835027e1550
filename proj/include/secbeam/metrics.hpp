#ifndef SECBEAM_METRICS_HPP
#define SECBEAM_METRICS_HPP

// Ground-truth evaluation of a candidate design on concrete channels:
// secrecy rate, harvested energy and interference power.  Every optimized
// design is re-scored through these functions during validation.

#include <secbeam/hermitian.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace secbeam {

struct Design {
  HermitianMatrix W, Sigma;
  double rho = 0.5;
  std::optional<ComplexVector> w; // extracted beam, when rank permits
  double search_param = 1.0;      // beta (bounded) or z (outage)
  double objective = 0.0;
  std::string status = "Optimal";
  int rank_W = 0, rank_Sigma = 0;
  double ratio_W = 0.0, ratio_Sigma = 0.0;
  std::string extraction = "none"; // none | direct | randomized | rank_gt_one
  std::string problem = "power-min";
  std::string model = "bounded";
};

// v†Av for Hermitian A is real; a visible imaginary residue means the inputs
// were corrupted upstream, so fail loudly instead of truncating silently.
inline double quadratic_form(const HermitianMatrix& a, const ComplexVector& v) {
  if (v.size() != a.dim()) throw std::invalid_argument("quadratic_form: dimension mismatch");
  const cplx q = v.adjoint() * (a.mat() * v);
  if (std::abs(q.imag()) > 1e-12 * (1.0 + std::abs(q.real())))
    throw std::runtime_error("quadratic_form: imaginary residue " + std::to_string(q.imag()));
  return q.real();
}

inline double log2_1p(double x) { return std::log1p(x) / M_LN2; }

inline double su_rate(const HermitianMatrix& W, const HermitianMatrix& Sigma, double rho,
                      const ComplexVector& h, double sigma_s2, double sigma_sp2) {
  const double sig = rho * quadratic_form(W, h);
  const double noise = rho * (quadratic_form(Sigma, h) + sigma_s2) + sigma_sp2;
  return log2_1p(sig / noise);
}

inline double eaves_rate(const HermitianMatrix& W, const HermitianMatrix& Sigma,
                         const ComplexVector& g, double sigma_e2) {
  const double sig = quadratic_form(W, g);
  const double noise = quadratic_form(Sigma, g) + sigma_e2;
  return log2_1p(sig / noise);
}

// min over eavesdroppers of [C_s - C_e,k]; deliberately unclamped so callers
// can see signed slack against R_min.
inline double secrecy_rate(const Design& d, const ComplexVector& h,
                           const std::vector<ComplexVector>& g, double sigma_s2, double sigma_e2,
                           double sigma_sp2) {
  const double cs = su_rate(d.W, d.Sigma, d.rho, h, sigma_s2, sigma_sp2);
  double worst = cs;
  for (const auto& gk : g) worst = std::min(worst, cs - eaves_rate(d.W, d.Sigma, gk, sigma_e2));
  return worst;
}

inline double harvested_energy_su(const Design& d, const ComplexVector& h, double sigma_s2,
                                  double eta) {
  return (1.0 - d.rho) * eta *
         (quadratic_form(d.W, h) + quadratic_form(d.Sigma, h) + sigma_s2);
}

inline double harvested_energy_ehr(const Design& d, const ComplexVector& g, double sigma_e2,
                                   double eta) {
  return eta * (quadratic_form(d.W, g) + quadratic_form(d.Sigma, g) + sigma_e2);
}

inline double interference_power(const Design& d, const ComplexVector& q) {
  return quadratic_form(d.W, q) + quadratic_form(d.Sigma, q);
}

// ---- Design JSON ----

inline nlohmann::json to_json(const Design& d) {
  nlohmann::json j = {
      {"problem", d.problem},
      {"model", d.model},
      {"status", d.status},
      {"objective", d.objective},
      {"rho", d.rho},
      {"search_param", d.search_param},
      {"W", to_json(d.W)},
      {"sigma", to_json(d.Sigma)},
      {"rank_w", d.rank_W},
      {"ratio_w", d.ratio_W},
      {"rank_sigma", d.rank_Sigma},
      {"ratio_sigma", d.ratio_Sigma},
      {"extraction", d.extraction},
  };
  j["w"] = d.w ? to_json(*d.w) : nlohmann::json();
  return j;
}

inline Design design_from_json(const nlohmann::json& j) {
  Design d;
  d.problem = j.at("problem").get<std::string>();
  d.model = j.at("model").get<std::string>();
  d.status = j.at("status").get<std::string>();
  d.objective = j.at("objective").get<double>();
  d.rho = j.at("rho").get<double>();
  d.search_param = j.at("search_param").get<double>();
  d.W = hermitian_from_json(j.at("W"));
  d.Sigma = hermitian_from_json(j.at("sigma"));
  d.rank_W = j.at("rank_w").get<int>();
  d.ratio_W = j.at("ratio_w").get<double>();
  d.rank_Sigma = j.at("rank_sigma").get<int>();
  d.ratio_Sigma = j.at("ratio_sigma").get<double>();
  d.extraction = j.at("extraction").get<std::string>();
  if (!j.at("w").is_null()) d.w = cvector_from_json(j.at("w"));
  return d;
}

} // namespace secbeam

#endif
