#ifndef SECBEAM_HERMITIAN_HPP
#define SECBEAM_HERMITIAN_HPP

// Dense complex-Hermitian building blocks shared by the whole library:
// validated Hermitian storage, real embedding, eigen helpers and the
// numerical rank test used on returned covariance matrices.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace secbeam {

using cplx = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

struct NotHermitianError : std::runtime_error {
  explicit NotHermitianError(const std::string& what) : std::runtime_error(what) {}
};

struct NotPsdError : std::runtime_error {
  explicit NotPsdError(const std::string& what) : std::runtime_error(what) {}
};

// Hermitian matrix with the symmetry enforced at construction.  Inputs with a
// skew part larger than `tol` are rejected; anything smaller is folded away by
// averaging with the adjoint.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const Eigen::MatrixXcd& a, double tol = 1e-12) {
    if (a.rows() != a.cols())
      throw NotHermitianError("HermitianMatrix: input is not square");
    const double skew = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (skew > tol)
      throw NotHermitianError("HermitianMatrix: skew residual " + std::to_string(skew) +
                              " exceeds tolerance");
    m_ = 0.5 * (a + a.adjoint().eval());
  }

  static HermitianMatrix zero(int n) { return HermitianMatrix(Eigen::MatrixXcd::Zero(n, n)); }
  static HermitianMatrix identity(int n) { return HermitianMatrix(Eigen::MatrixXcd::Identity(n, n)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& mat() const { return m_; }

  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.m_.rows() == b.m_.rows() && (a.m_.array() == b.m_.array()).all();
  }

 private:
  Eigen::MatrixXcd m_;
};

// [[Re, -Im], [Im, Re]] block lift of a complex matrix.  A Hermitian input
// yields a symmetric output with every eigenvalue doubled in multiplicity.
inline Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows(), m = a.cols();
  Eigen::MatrixXd e(2 * n, 2 * m);
  e.topLeftCorner(n, m) = a.real();
  e.topRightCorner(n, m) = -a.imag();
  e.bottomLeftCorner(n, m) = a.imag();
  e.bottomRightCorner(n, m) = a.real();
  return e;
}

inline Eigen::MatrixXd real_embedding(const HermitianMatrix& a) { return real_embedding(a.mat()); }

struct HermitianEig {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXcd vectors; // columns aligned with `values`
};

inline HermitianEig eig_hermitian(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.mat());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed");
  HermitianEig out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

// Hermitian square root with a small negative clamp; eigenvalues below -1e-10
// are treated as genuinely indefinite input.
inline HermitianMatrix psd_sqrt(const HermitianMatrix& a) {
  HermitianEig e = eig_hermitian(a);
  Eigen::VectorXd lam = e.values;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -1e-10)
      throw NotPsdError("psd_sqrt: eigenvalue " + std::to_string(lam[i]) + " is negative");
    lam[i] = lam[i] > 0 ? std::sqrt(lam[i]) : 0.0;
  }
  Eigen::MatrixXcd s = e.vectors * lam.asDiagonal() * e.vectors.adjoint();
  return HermitianMatrix(s, 1e-9);
}

struct RankInfo {
  int rank = 0;
  double ratio = 0.0; // second / largest eigenvalue, 0 when undefined
};

// Rank against a relative eigenvalue cutoff.  Matrices whose top eigenvalue
// is below 1e-12 count as zero.
inline RankInfo numerical_rank(const HermitianMatrix& a, double eps_rank = 1e-6) {
  RankInfo info;
  if (a.dim() == 0) return info;
  const Eigen::VectorXd lam = eig_hermitian(a).values;
  const double top = lam[0];
  if (top <= 1e-12) return info;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam[i] >= eps_rank * top) ++info.rank;
  if (a.dim() >= 2) info.ratio = std::max(lam[1], 0.0) / top;
  return info;
}

// ---- JSON exchange format: {"dim": n, "re": [[..]], "im": [[..]]} ----

inline nlohmann::json to_json(const HermitianMatrix& a) {
  const int n = a.dim();
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
    for (int j = 0; j < n; ++j) {
      rrow.push_back(a.mat()(i, j).real());
      irow.push_back(a.mat()(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return {{"dim", n}, {"re", re}, {"im", im}};
}

inline HermitianMatrix hermitian_from_json(const nlohmann::json& j) {
  const int n = j.at("dim").get<int>();
  Eigen::MatrixXcd a(n, n);
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      a(i, k) = cplx(re.at(i).at(k).get<double>(), im.at(i).at(k).get<double>());
  return HermitianMatrix(a, 1e-9);
}

inline nlohmann::json to_json(const ComplexVector& v) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return {{"dim", v.size()}, {"re", re}, {"im", im}};
}

inline ComplexVector cvector_from_json(const nlohmann::json& j) {
  const int n = j.at("dim").get<int>();
  ComplexVector v(n);
  for (int i = 0; i < n; ++i)
    v[i] = cplx(j.at("re").at(i).get<double>(), j.at("im").at(i).get<double>());
  return v;
}

} // namespace secbeam

#endif
