#ifndef SECBEAM_CONIC_IR_HPP
#define SECBEAM_CONIC_IR_HPP

// Intermediate representation for the inner convex programs.  Builders emit
// equation-shaped constraints over Hermitian PSD matrix variables and scalar
// variables; the solver backend lowers them to a real cone program.  The text
// dump exists so built problems can be golden-file tested and re-parsed.

#include <secbeam/hermitian.hpp>

#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace secbeam::conic {

constexpr double kNoLowerBound = -std::numeric_limits<double>::infinity();

// real-valued affine expression: constant + sum coeff*x_s + sum <C, X_m>
struct LinExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> scalars;
  std::vector<std::pair<int, HermitianMatrix>> matrices;

  LinExpr& add(int scalar_var, double coeff) {
    scalars.emplace_back(scalar_var, coeff);
    return *this;
  }
  LinExpr& add(int matrix_var, const HermitianMatrix& coeff) {
    matrices.emplace_back(matrix_var, coeff);
    return *this;
  }

  friend bool operator==(const LinExpr& a, const LinExpr& b) {
    if (a.constant != b.constant || a.scalars != b.scalars ||
        a.matrices.size() != b.matrices.size())
      return false;
    for (size_t i = 0; i < a.matrices.size(); ++i)
      if (a.matrices[i].first != b.matrices[i].first ||
          !(a.matrices[i].second == b.matrices[i].second))
        return false;
    return true;
  }
};

// scale * basis† X basis, the only shape of matrix-variable term the built
// LMIs need; keeps every coefficient Hermitian by construction.
struct CongruenceTerm {
  int var = 0;
  double scale = 1.0;
  Eigen::MatrixXcd basis; // dim(X) x dim(LMI)

  friend bool operator==(const CongruenceTerm& a, const CongruenceTerm& b) {
    return a.var == b.var && a.scale == b.scale && a.basis.rows() == b.basis.rows() &&
           a.basis.cols() == b.basis.cols() && (a.basis.array() == b.basis.array()).all();
  }
};

// affine Hermitian-matrix expression required PSD
struct LmiExpr {
  int dim = 0;
  HermitianMatrix constant;
  std::vector<std::pair<int, HermitianMatrix>> scalar_terms;
  std::vector<CongruenceTerm> matrix_terms;

  friend bool operator==(const LmiExpr& a, const LmiExpr& b) {
    if (a.dim != b.dim || !(a.constant == b.constant) ||
        a.scalar_terms.size() != b.scalar_terms.size() || !(a.matrix_terms == b.matrix_terms))
      return false;
    for (size_t i = 0; i < a.scalar_terms.size(); ++i)
      if (a.scalar_terms[i].first != b.scalar_terms[i].first ||
          !(a.scalar_terms[i].second == b.scalar_terms[i].second))
        return false;
    return true;
  }
};

struct SocConstraint {
  std::vector<LinExpr> vec; // ||vec|| <= rhs
  LinExpr rhs;

  friend bool operator==(const SocConstraint& a, const SocConstraint& b) {
    return a.vec == b.vec && a.rhs == b.rhs;
  }
};

struct MatrixVar {
  std::string name;
  int dim = 0;
  friend bool operator==(const MatrixVar&, const MatrixVar&) = default;
};

struct ScalarVar {
  std::string name;
  double lower = kNoLowerBound;
  friend bool operator==(const ScalarVar&, const ScalarVar&) = default;
};

struct ConicProgram {
  std::vector<MatrixVar> matrix_vars; // implicitly Hermitian PSD
  std::vector<ScalarVar> scalar_vars;
  LinExpr objective; // minimized
  std::vector<LinExpr> eq_constraints;   // == 0
  std::vector<LinExpr> ineq_constraints; // >= 0
  std::vector<SocConstraint> soc_constraints;
  std::vector<LmiExpr> lmi_constraints;

  int add_matrix_var(const std::string& name, int dim) {
    matrix_vars.push_back({name, dim});
    return static_cast<int>(matrix_vars.size()) - 1;
  }
  int add_scalar_var(const std::string& name, double lower = kNoLowerBound) {
    scalar_vars.push_back({name, lower});
    return static_cast<int>(scalar_vars.size()) - 1;
  }

  friend bool operator==(const ConicProgram& a, const ConicProgram& b) {
    return a.matrix_vars == b.matrix_vars && a.scalar_vars == b.scalar_vars &&
           a.objective == b.objective && a.eq_constraints == b.eq_constraints &&
           a.ineq_constraints == b.ineq_constraints && a.soc_constraints == b.soc_constraints &&
           a.lmi_constraints == b.lmi_constraints;
  }
};

// ---- evaluation ----

struct Assignment {
  std::vector<Eigen::MatrixXcd> matrices;
  std::vector<double> scalars;
};

inline double evaluate(const LinExpr& e, const Assignment& a) {
  double v = e.constant;
  for (const auto& [id, coeff] : e.scalars) v += coeff * a.scalars.at(id);
  for (const auto& [id, coeff] : e.matrices) {
    const cplx tr = (coeff.mat() * a.matrices.at(id)).trace();
    v += tr.real();
  }
  return v;
}

inline Eigen::MatrixXcd evaluate(const LmiExpr& e, const Assignment& a) {
  Eigen::MatrixXcd f = e.constant.mat();
  for (const auto& [id, coeff] : e.scalar_terms) f += a.scalars.at(id) * coeff.mat();
  for (const auto& t : e.matrix_terms)
    f += t.scale * (t.basis.adjoint() * a.matrices.at(t.var) * t.basis);
  return f;
}

// ---- well-formedness ----

inline void validate(const ConicProgram& p) {
  auto die = [](const std::string& msg) { throw std::runtime_error("conic program: " + msg); };
  const int nm = static_cast<int>(p.matrix_vars.size());
  const int ns = static_cast<int>(p.scalar_vars.size());
  std::vector<bool> used_m(nm, false), used_s(ns, false);

  auto finite = [](double v) { return std::isfinite(v); };
  auto check_herm = [&](const HermitianMatrix& h) {
    if (!h.mat().allFinite()) die("non-finite matrix coefficient");
  };
  auto check_lin = [&](const LinExpr& e) {
    if (!finite(e.constant)) die("non-finite constant");
    for (const auto& [id, c] : e.scalars) {
      if (id < 0 || id >= ns) die("scalar var id out of range");
      if (!finite(c)) die("non-finite scalar coefficient");
      used_s[id] = true;
    }
    for (const auto& [id, c] : e.matrices) {
      if (id < 0 || id >= nm) die("matrix var id out of range");
      if (c.dim() != p.matrix_vars[id].dim) die("matrix coefficient dim mismatch");
      check_herm(c);
      used_m[id] = true;
    }
  };

  for (const auto& mv : p.matrix_vars)
    if (mv.dim < 1) die("matrix var dim must be >= 1");
  for (const auto& sv : p.scalar_vars)
    if (!finite(sv.lower) && sv.lower != kNoLowerBound) die("bad lower bound");

  check_lin(p.objective);
  for (const auto& e : p.eq_constraints) check_lin(e);
  for (const auto& e : p.ineq_constraints) check_lin(e);
  for (const auto& s : p.soc_constraints) {
    for (const auto& e : s.vec) check_lin(e);
    check_lin(s.rhs);
  }
  for (const auto& l : p.lmi_constraints) {
    if (l.dim < 1) die("lmi dim must be >= 1");
    if (l.constant.dim() != l.dim) die("lmi constant dim mismatch");
    check_herm(l.constant);
    for (const auto& [id, c] : l.scalar_terms) {
      if (id < 0 || id >= ns) die("lmi scalar var id out of range");
      if (c.dim() != l.dim) die("lmi scalar coefficient dim mismatch");
      check_herm(c);
      used_s[id] = true;
    }
    for (const auto& t : l.matrix_terms) {
      if (t.var < 0 || t.var >= nm) die("lmi matrix var id out of range");
      if (t.basis.rows() != p.matrix_vars[t.var].dim || t.basis.cols() != l.dim)
        die("lmi congruence basis shape mismatch");
      if (!t.basis.allFinite() || !finite(t.scale)) die("non-finite lmi term");
      used_m[t.var] = true;
    }
  }

  // matrix vars are implicitly PSD-constrained so they always count as used;
  // scalar vars must appear somewhere.
  for (int i = 0; i < ns; ++i)
    if (!used_s[i]) die("scalar var '" + p.scalar_vars[i].name + "' is never referenced");
}

// ---- independent residual recomputation ----

struct ViolationReport {
  std::vector<double> eq;        // signed value, feasible at 0
  std::vector<double> ineq;      // signed slack, feasible >= 0
  std::vector<double> soc;       // rhs - ||vec||
  std::vector<double> lmi;       // smallest eigenvalue
  std::vector<double> scalar_lb; // x - lb (omitted entries for free vars)
  std::vector<double> psd;       // smallest eigenvalue of each matrix var
  double max_violation = 0.0;
};

inline ViolationReport check_solution(const ConicProgram& p, const Assignment& a) {
  ViolationReport r;
  double worst = 0.0;
  auto push_slack = [&](std::vector<double>& dst, double slack) {
    dst.push_back(slack);
    worst = std::max(worst, -slack);
  };
  for (const auto& e : p.eq_constraints) {
    const double v = evaluate(e, a);
    r.eq.push_back(v);
    worst = std::max(worst, std::abs(v));
  }
  for (const auto& e : p.ineq_constraints) push_slack(r.ineq, evaluate(e, a));
  for (const auto& s : p.soc_constraints) {
    double nrm2 = 0;
    for (const auto& e : s.vec) {
      const double v = evaluate(e, a);
      nrm2 += v * v;
    }
    push_slack(r.soc, evaluate(s.rhs, a) - std::sqrt(nrm2));
  }
  for (const auto& l : p.lmi_constraints) {
    const Eigen::MatrixXcd f = evaluate(l, a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (f + f.adjoint()));
    push_slack(r.lmi, es.eigenvalues().minCoeff());
  }
  for (size_t i = 0; i < p.scalar_vars.size(); ++i) {
    if (p.scalar_vars[i].lower == kNoLowerBound) continue;
    push_slack(r.scalar_lb, a.scalars.at(i) - p.scalar_vars[i].lower);
  }
  for (size_t i = 0; i < p.matrix_vars.size(); ++i) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.matrices.at(i));
    push_slack(r.psd, es.eigenvalues().minCoeff());
  }
  r.max_violation = worst;
  return r;
}

// ---- debug dump / parse ----

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void dump_complex_block(std::ostream& os, const Eigen::MatrixXcd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << ' ' << fmt(m(i, j).real()) << ' ' << fmt(m(i, j).imag());
}

inline void dump_lin(std::ostream& os, const LinExpr& e) {
  os << "const " << fmt(e.constant);
  for (const auto& [id, c] : e.scalars) os << " s " << id << ' ' << fmt(c);
  for (const auto& [id, c] : e.matrices) {
    os << " m " << id << ' ' << c.dim();
    dump_complex_block(os, c.mat());
  }
}

class Tokens {
 public:
  explicit Tokens(const std::string& text) : in_(text) { advance(); }
  const std::string& peek() const { return cur_; }
  bool done() const { return done_; }
  std::string next() {
    std::string t = cur_;
    advance();
    return t;
  }
  double next_double() {
    const std::string t = next();
    size_t pos = 0;
    double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::runtime_error("conic parse: bad number '" + t + "'");
    return v;
  }
  int next_int() { return static_cast<int>(next_double()); }

 private:
  void advance() {
    if (!(in_ >> cur_)) {
      done_ = true;
      cur_.clear();
    }
  }
  std::istringstream in_;
  std::string cur_;
  bool done_ = false;
};

inline Eigen::MatrixXcd parse_complex_block(Tokens& t, int rows, int cols) {
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double re = t.next_double();
      double im = t.next_double();
      m(i, j) = cplx(re, im);
    }
  return m;
}

inline bool is_keyword(const std::string& t) {
  return t == "matrixvar" || t == "scalarvar" || t == "objective" || t == "eq" || t == "ineq" ||
         t == "soc" || t == "lmi" || t == "end" || t == "row" || t == "rhs" || t == "const" ||
         t == "sterm" || t == "mterm";
}

inline LinExpr parse_lin(Tokens& t) {
  LinExpr e;
  if (t.next() != "const") throw std::runtime_error("conic parse: expected 'const'");
  e.constant = t.next_double();
  while (!t.done() && (t.peek() == "s" || t.peek() == "m")) {
    std::string kind = t.next();
    int id = t.next_int();
    if (kind == "s") {
      e.scalars.emplace_back(id, t.next_double());
    } else {
      int dim = t.next_int();
      e.matrices.emplace_back(id, HermitianMatrix(parse_complex_block(t, dim, dim), 1e-9));
    }
  }
  return e;
}

} // namespace detail

inline std::string dump(const ConicProgram& p) {
  std::ostringstream os;
  os << "conicprogram v1\n";
  for (const auto& mv : p.matrix_vars) os << "matrixvar " << mv.name << ' ' << mv.dim << '\n';
  for (const auto& sv : p.scalar_vars) {
    os << "scalarvar " << sv.name;
    if (sv.lower == kNoLowerBound)
      os << " free\n";
    else
      os << " lb " << detail::fmt(sv.lower) << '\n';
  }
  os << "objective ";
  detail::dump_lin(os, p.objective);
  os << '\n';
  for (const auto& e : p.eq_constraints) {
    os << "eq ";
    detail::dump_lin(os, e);
    os << '\n';
  }
  for (const auto& e : p.ineq_constraints) {
    os << "ineq ";
    detail::dump_lin(os, e);
    os << '\n';
  }
  for (const auto& s : p.soc_constraints) {
    os << "soc dim " << s.vec.size() << '\n';
    for (const auto& e : s.vec) {
      os << "  row ";
      detail::dump_lin(os, e);
      os << '\n';
    }
    os << "  rhs ";
    detail::dump_lin(os, s.rhs);
    os << '\n';
  }
  for (const auto& l : p.lmi_constraints) {
    os << "lmi dim " << l.dim << '\n';
    os << "  const " << l.dim;
    detail::dump_complex_block(os, l.constant.mat());
    os << '\n';
    for (const auto& [id, c] : l.scalar_terms) {
      os << "  sterm " << id << ' ' << l.dim;
      detail::dump_complex_block(os, c.mat());
      os << '\n';
    }
    for (const auto& t : l.matrix_terms) {
      os << "  mterm " << t.var << ' ' << detail::fmt(t.scale) << ' ' << t.basis.rows() << ' '
         << t.basis.cols();
      detail::dump_complex_block(os, t.basis);
      os << '\n';
    }
    os << "end\n";
  }
  return os.str();
}

inline ConicProgram parse_dump(const std::string& text) {
  detail::Tokens t(text);
  if (t.next() != "conicprogram" || t.next() != "v1")
    throw std::runtime_error("conic parse: bad header");
  ConicProgram p;
  while (!t.done()) {
    std::string kw = t.next();
    if (kw == "matrixvar") {
      std::string name = t.next();
      p.add_matrix_var(name, t.next_int());
    } else if (kw == "scalarvar") {
      std::string name = t.next();
      std::string kind = t.next();
      if (kind == "free")
        p.add_scalar_var(name);
      else if (kind == "lb")
        p.add_scalar_var(name, t.next_double());
      else
        throw std::runtime_error("conic parse: bad scalarvar");
    } else if (kw == "objective") {
      p.objective = detail::parse_lin(t);
    } else if (kw == "eq") {
      p.eq_constraints.push_back(detail::parse_lin(t));
    } else if (kw == "ineq") {
      p.ineq_constraints.push_back(detail::parse_lin(t));
    } else if (kw == "soc") {
      if (t.next() != "dim") throw std::runtime_error("conic parse: bad soc");
      int n = t.next_int();
      SocConstraint s;
      for (int i = 0; i < n; ++i) {
        if (t.next() != "row") throw std::runtime_error("conic parse: expected row");
        s.vec.push_back(detail::parse_lin(t));
      }
      if (t.next() != "rhs") throw std::runtime_error("conic parse: expected rhs");
      s.rhs = detail::parse_lin(t);
      p.soc_constraints.push_back(std::move(s));
    } else if (kw == "lmi") {
      if (t.next() != "dim") throw std::runtime_error("conic parse: bad lmi");
      LmiExpr l;
      l.dim = t.next_int();
      if (t.next() != "const") throw std::runtime_error("conic parse: expected const");
      {
        int d = t.next_int();
        l.constant = HermitianMatrix(detail::parse_complex_block(t, d, d), 1e-9);
      }
      while (!t.done() && t.peek() != "end") {
        std::string kind = t.next();
        if (kind == "sterm") {
          int id = t.next_int();
          int d = t.next_int();
          l.scalar_terms.emplace_back(id, HermitianMatrix(detail::parse_complex_block(t, d, d), 1e-9));
        } else if (kind == "mterm") {
          CongruenceTerm ct;
          ct.var = t.next_int();
          ct.scale = t.next_double();
          int r = t.next_int(), c = t.next_int();
          ct.basis = detail::parse_complex_block(t, r, c);
          l.matrix_terms.push_back(std::move(ct));
        } else {
          throw std::runtime_error("conic parse: bad lmi term '" + kind + "'");
        }
      }
      if (t.next() != "end") throw std::runtime_error("conic parse: unterminated lmi");
      p.lmi_constraints.push_back(std::move(l));
    } else {
      throw std::runtime_error("conic parse: unknown keyword '" + kw + "'");
    }
  }
  return p;
}

} // namespace secbeam::conic

#endif
