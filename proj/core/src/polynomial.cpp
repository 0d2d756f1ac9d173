#include "gstruct/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "gstruct/error.hpp"

namespace gstruct {

Polynomial Polynomial::constant(Index vars, double c) {
  Polynomial p(vars);
  p.add_term(c, Exponents(static_cast<std::size_t>(vars), 0));
  return p;
}

Polynomial Polynomial::variable(Index vars, Index i) {
  Exponents e(static_cast<std::size_t>(vars), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return monomial(vars, 1.0, e);
}

Polynomial Polynomial::monomial(Index vars, double c, Exponents e) {
  Polynomial p(vars);
  p.add_term(c, e);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

void Polynomial::add_term(double c, const Exponents& e) {
  if (static_cast<Index>(e.size()) != vars_)
    throw Error(ErrorCode::ShapeMismatch, "monomial exponent count differs from variable count");
  for (int k : e)
    if (k < 0) throw Error(ErrorCode::ShapeMismatch, "negative exponent");
  if (c == 0.0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
  } else {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::operator()(const Vector& x) const {
  if (x.size() != vars_) throw Error(ErrorCode::ShapeMismatch, "point has wrong dimension for polynomial");
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t *= x(static_cast<Index>(i));
    s += t;
  }
  return s;
}

Polynomial Polynomial::derivative(Index i) const {
  Polynomial d(vars_);
  const auto k = static_cast<std::size_t>(i);
  for (const auto& [e, c] : terms_) {
    if (e[k] == 0) continue;
    Exponents f = e;
    f[k] -= 1;
    d.add_term(c * e[k], f);
  }
  return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.vars_ != vars_) throw Error(ErrorCode::ShapeMismatch, "polynomials in different variable counts");
  for (const auto& [e, c] : o.terms_) add_term(c, e);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.vars_ != vars_) throw Error(ErrorCode::ShapeMismatch, "polynomials in different variable counts");
  for (const auto& [e, c] : o.terms_) add_term(-c, e);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.vars_ != b.vars_) throw Error(ErrorCode::ShapeMismatch, "polynomials in different variable counts");
  Polynomial p(a.vars_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Polynomial::Exponents e = ea;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      p.add_term(ca * cb, e);
    }
  return p;
}

PolyMatrix::PolyMatrix(Index rows, Index cols, Index vars)
    : rows_(rows), cols_(cols), vars_(vars), entries_(static_cast<std::size_t>(rows * cols), Polynomial(vars)) {}

PolyMatrix PolyMatrix::constant(const Matrix& m, Index vars) {
  PolyMatrix p(m.rows(), m.cols(), vars);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) p(i, j) = Polynomial::constant(vars, m(i, j));
  return p;
}

Matrix PolyMatrix::eval(const Vector& x) const {
  Matrix m(rows_, cols_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j)(x);
  return m;
}

PolyMatrix PolyMatrix::derivative(Index k) const {
  PolyMatrix d(rows_, cols_, vars_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) d(i, j) = (*this)(i, j).derivative(k);
  return d;
}

PolyMatrix PolyMatrix::transpose() const {
  PolyMatrix t(cols_, rows_, vars_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorCode::ShapeMismatch, "polynomial matrix product shapes");
  PolyMatrix p(a.rows_, b.cols_, a.vars_);
  for (Index i = 0; i < a.rows_; ++i)
    for (Index j = 0; j < b.cols_; ++j)
      for (Index k = 0; k < a.cols_; ++k) p(i, j) += a(i, k) * b(k, j);
  return p;
}

PolyMatrix jacobian(const std::vector<Polynomial>& phi) {
  const Index n = static_cast<Index>(phi.size());
  const Index vars = n ? phi[0].vars() : 0;
  PolyMatrix j(n, vars, vars);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < vars; ++k) j(i, k) = phi[static_cast<std::size_t>(i)].derivative(k);
  return j;
}

}  // namespace gstruct
