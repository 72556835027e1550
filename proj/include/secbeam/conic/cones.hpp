#ifndef SECBEAM_CONIC_CONES_HPP
#define SECBEAM_CONIC_CONES_HPP

// Cone kernels for the primal-dual solver: a product of a nonnegative
// orthant, second-order cones and (real, already-embedded) PSD cones.
// Provides Nesterov-Todd scalings, Jordan-algebra products and maximal
// feasible step computations on flat vectors laid out block by block.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace secbeam::conic {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline int svec_len(int p) { return p * (p + 1) / 2; }

// column-major lower triangle, off-diagonals scaled by sqrt(2) so that
// svec(A).dot(svec(B)) == <A, B>
inline Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
  const int p = static_cast<int>(m.rows());
  Eigen::VectorXd v(svec_len(p));
  int idx = 0;
  for (int j = 0; j < p; ++j) {
    v[idx++] = m(j, j);
    for (int i = j + 1; i < p; ++i) v[idx++] = M_SQRT2 * m(i, j);
  }
  return v;
}

inline Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int p) {
  Eigen::MatrixXd m(p, p);
  int idx = 0;
  for (int j = 0; j < p; ++j) {
    m(j, j) = v[idx++];
    for (int i = j + 1; i < p; ++i) {
      m(i, j) = v[idx] * M_SQRT1_2;
      m(j, i) = m(i, j);
      ++idx;
    }
  }
  return m;
}

struct ScalingFailure : std::runtime_error {
  explicit ScalingFailure(const std::string& what) : std::runtime_error(what) {}
};

class Cones {
 public:
  Cones(int lp, std::vector<int> soc, std::vector<int> psd)
      : l_(lp), soc_(std::move(soc)), psd_(std::move(psd)) {
    offs_soc_.clear();
    offs_psd_.clear();
    int off = l_;
    for (int q : soc_) {
      offs_soc_.push_back(off);
      off += q;
    }
    for (int p : psd_) {
      offs_psd_.push_back(off);
      off += svec_len(p);
    }
    dim_ = off;
  }

  int dim() const { return dim_; }

  double degree() const {
    double d = l_ + static_cast<double>(soc_.size());
    for (int p : psd_) d += p;
    return d;
  }

  Eigen::VectorXd identity() const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim_);
    e.head(l_).setOnes();
    for (size_t k = 0; k < soc_.size(); ++k) e[offs_soc_[k]] = 1.0;
    for (size_t k = 0; k < psd_.size(); ++k) {
      int idx = offs_psd_[k];
      for (int j = 0; j < psd_[k]; ++j) {
        e[idx] = 1.0;
        idx += psd_[k] - j;
      }
    }
    return e;
  }

  // smallest "cone eigenvalue" of an arbitrary point; used to shift the
  // initial iterates strictly inside
  double min_eig(const Eigen::VectorXd& v) const {
    double m = kInf;
    for (int i = 0; i < l_; ++i) m = std::min(m, v[i]);
    for (size_t k = 0; k < soc_.size(); ++k) {
      const auto b = v.segment(offs_soc_[k], soc_[k]);
      m = std::min(m, b[0] - b.tail(soc_[k] - 1).norm());
    }
    for (size_t k = 0; k < psd_.size(); ++k) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          smat(v.segment(offs_psd_[k], svec_len(psd_[k])), psd_[k]));
      m = std::min(m, es.eigenvalues().minCoeff());
    }
    return m;
  }

  // ---- Nesterov-Todd scaling state ----

  void compute_scaling(const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
    lp_w_.resize(l_);
    lambda_.resize(dim_);
    for (int i = 0; i < l_; ++i) {
      if (s[i] <= 0 || z[i] <= 0) throw ScalingFailure("lp iterate left the cone");
      lp_w_[i] = std::sqrt(s[i] / z[i]);
      lambda_[i] = std::sqrt(s[i] * z[i]);
    }

    soc_eta_.resize(soc_.size());
    soc_wbar_.resize(soc_.size());
    for (size_t k = 0; k < soc_.size(); ++k) {
      const int q = soc_[k], off = offs_soc_[k];
      const auto sb = s.segment(off, q);
      const auto zb = z.segment(off, q);
      const double snrm2 = sb[0] * sb[0] - sb.tail(q - 1).squaredNorm();
      const double znrm2 = zb[0] * zb[0] - zb.tail(q - 1).squaredNorm();
      if (snrm2 <= 0 || znrm2 <= 0 || sb[0] <= 0 || zb[0] <= 0)
        throw ScalingFailure("soc iterate left the cone");
      const double aa = std::sqrt(snrm2), bb = std::sqrt(znrm2);
      const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb) / (aa * bb)));
      Eigen::VectorXd wbar = sb / aa;
      wbar[0] += zb[0] / bb;
      wbar.tail(q - 1) -= zb.tail(q - 1) / bb;
      wbar /= 2.0 * gamma;
      soc_wbar_[k] = wbar;
      soc_eta_[k] = std::sqrt(aa / bb);
      // lambda = W z
      lambda_.segment(off, q) = soc_eta_[k] * apply_h(wbar, zb);
    }

    psd_r_.resize(psd_.size());
    psd_rti_.resize(psd_.size());
    psd_lam_.resize(psd_.size());
    for (size_t k = 0; k < psd_.size(); ++k) {
      const int p = psd_[k], off = offs_psd_[k];
      Eigen::MatrixXd S = smat(s.segment(off, svec_len(p)), p);
      Eigen::MatrixXd Z = smat(z.segment(off, svec_len(p)), p);
      Eigen::LLT<Eigen::MatrixXd> ls(S), lz(Z);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
        throw ScalingFailure("psd iterate left the cone");
      Eigen::MatrixXd Ls = ls.matrixL();
      Eigen::MatrixXd Lz = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Ls,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::VectorXd d = svd.singularValues();
      if (d.minCoeff() <= 0) throw ScalingFailure("degenerate NT scaling");
      Eigen::VectorXd dih = d.cwiseSqrt().cwiseInverse();
      psd_r_[k] = Ls * svd.matrixV() * dih.asDiagonal();
      psd_rti_[k] = Lz * svd.matrixU() * dih.asDiagonal();
      psd_lam_[k] = d;
      Eigen::VectorXd lamblk = Eigen::VectorXd::Zero(svec_len(p));
      int idx = 0;
      for (int j = 0; j < p; ++j) {
        lamblk[idx] = d[j];
        idx += p - j;
      }
      lambda_.segment(off, svec_len(p)) = lamblk;
    }
  }

  const Eigen::VectorXd& lambda() const { return lambda_; }

  enum class Op { W, WT, Winv, WinvT };

  Eigen::VectorXd apply(Op op, const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(dim_);
    for (int i = 0; i < l_; ++i) {
      const double w = lp_w_[i];
      out[i] = (op == Op::W || op == Op::WT) ? v[i] * w : v[i] / w;
    }
    for (size_t k = 0; k < soc_.size(); ++k) {
      const int q = soc_[k], off = offs_soc_[k];
      const auto b = v.segment(off, q);
      if (op == Op::W || op == Op::WT) {
        out.segment(off, q) = soc_eta_[k] * apply_h(soc_wbar_[k], b);
      } else {
        Eigen::VectorXd wflip = soc_wbar_[k];
        wflip.tail(q - 1) = -wflip.tail(q - 1);
        out.segment(off, q) = apply_h(wflip, b) / soc_eta_[k];
      }
    }
    for (size_t k = 0; k < psd_.size(); ++k) {
      const int p = psd_[k], off = offs_psd_[k];
      Eigen::MatrixXd M = smat(v.segment(off, svec_len(p)), p);
      const Eigen::MatrixXd& r = psd_r_[k];
      const Eigen::MatrixXd& rti = psd_rti_[k];
      Eigen::MatrixXd res;
      switch (op) {
        case Op::W: res = r * M * r.transpose(); break;
        case Op::WT: res = r.transpose() * M * r; break;
        case Op::Winv: res = rti.transpose() * M * rti; break;
        case Op::WinvT: res = rti * M * rti.transpose(); break;
      }
      out.segment(off, svec_len(p)) = svec(res);
    }
    return out;
  }

  // ---- Jordan algebra on scaled points ----

  Eigen::VectorXd jmul(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(dim_);
    out.head(l_) = u.head(l_).cwiseProduct(v.head(l_));
    for (size_t k = 0; k < soc_.size(); ++k) {
      const int q = soc_[k], off = offs_soc_[k];
      const auto ub = u.segment(off, q);
      const auto vb = v.segment(off, q);
      out[off] = ub.dot(vb);
      out.segment(off + 1, q - 1) = ub[0] * vb.tail(q - 1) + vb[0] * ub.tail(q - 1);
    }
    for (size_t k = 0; k < psd_.size(); ++k) {
      const int p = psd_[k], off = offs_psd_[k];
      Eigen::MatrixXd U = smat(u.segment(off, svec_len(p)), p);
      Eigen::MatrixXd V = smat(v.segment(off, svec_len(p)), p);
      out.segment(off, svec_len(p)) = svec(0.5 * (U * V + V * U));
    }
    return out;
  }

  // solve lambda o x = u
  Eigen::VectorXd jdiv_lambda(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out(dim_);
    out.head(l_) = u.head(l_).cwiseQuotient(lambda_.head(l_));
    for (size_t k = 0; k < soc_.size(); ++k) {
      const int q = soc_[k], off = offs_soc_[k];
      const auto lb = lambda_.segment(off, q);
      const auto ub = u.segment(off, q);
      const double det = lb[0] * lb[0] - lb.tail(q - 1).squaredNorm();
      const double x0 = (lb[0] * ub[0] - lb.tail(q - 1).dot(ub.tail(q - 1))) / det;
      out[off] = x0;
      out.segment(off + 1, q - 1) = (ub.tail(q - 1) - x0 * lb.tail(q - 1)) / lb[0];
    }
    for (size_t k = 0; k < psd_.size(); ++k) {
      const int p = psd_[k], off = offs_psd_[k];
      Eigen::MatrixXd M = smat(u.segment(off, svec_len(p)), p);
      const Eigen::VectorXd& d = psd_lam_[k];
      Eigen::MatrixXd X(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = 2.0 * M(i, j) / (d[i] + d[j]);
      out.segment(off, svec_len(p)) = svec(X);
    }
    return out;
  }

  // largest alpha with lambda + alpha*d in the cone (+inf when unbounded)
  double max_step(const Eigen::VectorXd& d) const {
    double alpha = kInf;
    for (int i = 0; i < l_; ++i)
      if (d[i] < 0) alpha = std::min(alpha, -lambda_[i] / d[i]);
    for (size_t k = 0; k < soc_.size(); ++k) {
      const int q = soc_[k], off = offs_soc_[k];
      const auto lb = lambda_.segment(off, q);
      const auto db = d.segment(off, q);
      const double a = db[0] * db[0] - db.tail(q - 1).squaredNorm();
      const double b = 2.0 * (lb[0] * db[0] - lb.tail(q - 1).dot(db.tail(q - 1)));
      const double c = lb[0] * lb[0] - lb.tail(q - 1).squaredNorm();
      if (std::abs(a) < 1e-300) {
        if (b < 0) alpha = std::min(alpha, -c / b);
      } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0) {
          const double sq = std::sqrt(disc);
          for (double root : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)})
            if (root > 0) alpha = std::min(alpha, root);
        }
      }
      if (db[0] < 0) alpha = std::min(alpha, -lb[0] / db[0]);
    }
    for (size_t k = 0; k < psd_.size(); ++k) {
      const int p = psd_[k], off = offs_psd_[k];
      Eigen::MatrixXd M = smat(d.segment(off, svec_len(p)), p);
      const Eigen::VectorXd dih = psd_lam_[k].cwiseSqrt().cwiseInverse();
      Eigen::MatrixXd B = dih.asDiagonal() * M * dih.asDiagonal();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
      const double m = es.eigenvalues().minCoeff();
      if (m < 0) alpha = std::min(alpha, -1.0 / m);
    }
    return alpha;
  }

 private:
  // H(wbar) x for the SOC hyperbolic Householder factor
  static Eigen::VectorXd apply_h(const Eigen::VectorXd& wbar,
                                 const Eigen::Ref<const Eigen::VectorXd>& x) {
    const int q = static_cast<int>(wbar.size());
    Eigen::VectorXd out(q);
    const double w1x1 = wbar.tail(q - 1).dot(x.tail(q - 1));
    out[0] = wbar[0] * x[0] + w1x1;
    out.tail(q - 1) = x.tail(q - 1) + (x[0] + w1x1 / (1.0 + wbar[0])) * wbar.tail(q - 1);
    return out;
  }

  int l_ = 0;
  std::vector<int> soc_, psd_;
  std::vector<int> offs_soc_, offs_psd_;
  int dim_ = 0;

  Eigen::VectorXd lp_w_;
  std::vector<double> soc_eta_;
  std::vector<Eigen::VectorXd> soc_wbar_;
  std::vector<Eigen::MatrixXd> psd_r_, psd_rti_;
  std::vector<Eigen::VectorXd> psd_lam_;
  Eigen::VectorXd lambda_;
};

} // namespace secbeam::conic

#endif
