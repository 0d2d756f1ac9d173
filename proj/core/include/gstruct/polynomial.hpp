#pragma once

#include <map>
#include <vector>

#include "gstruct/numkernel.hpp"

namespace gstruct {

// Real polynomial in a fixed number of variables, stored as exponent vector -> coefficient.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  explicit Polynomial(Index vars = 0) : vars_(vars) {}

  static Polynomial constant(Index vars, double c);
  static Polynomial variable(Index vars, Index i);
  static Polynomial monomial(Index vars, double c, Exponents e);

  Index vars() const { return vars_; }
  const std::map<Exponents, double>& terms() const { return terms_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }

  void add_term(double c, const Exponents& e);
  double operator()(const Vector& x) const;
  Polynomial derivative(Index i) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  Index vars_;
  std::map<Exponents, double> terms_;
};

// Dense matrix of polynomials, row major.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(Index rows, Index cols, Index vars);
  static PolyMatrix constant(const Matrix& m, Index vars);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index vars() const { return vars_; }
  Polynomial& operator()(Index i, Index j) { return entries_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Polynomial& operator()(Index i, Index j) const { return entries_[static_cast<std::size_t>(i * cols_ + j)]; }

  Matrix eval(const Vector& x) const;
  PolyMatrix derivative(Index i) const;
  PolyMatrix transpose() const;
  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Index vars_ = 0;
  std::vector<Polynomial> entries_;
};

// Jacobian of a polynomial map, entry (i, j) = d phi_i / d x_j.
PolyMatrix jacobian(const std::vector<Polynomial>& phi);

}  // namespace gstruct
