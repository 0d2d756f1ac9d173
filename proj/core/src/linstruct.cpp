#include "gstruct/linstruct.hpp"

#include <cmath>
#include <sstream>

#include "gstruct/error.hpp"

namespace gstruct {

namespace {

Matrix identity(Index n) { return Matrix::Identity(n, n); }

// Scale for residuals of quadratic identities such as J^2 = Id.
double square_scale(const Matrix& m) {
  const double f = frobenius(m);
  return std::max(f * f, std::sqrt(static_cast<double>(m.rows())));
}

bool square_shape(Report& r, const Matrix& m, const char* what) {
  const bool ok = m.rows() == m.cols() && m.rows() > 0 && m.allFinite();
  r.flag(std::string(what) + " is a finite square matrix", ok);
  return ok;
}

// Shortfall of the smallest singular value below the rank cut.
void nondegenerate_entry(Report& r, const std::string& name, const Matrix& m, const Tolerance& tol) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  const double cut = tol.bound(s.size() ? s(0) : 0.0);
  const double smin = s.size() ? s(s.size() - 1) : 0.0;
  r.flag(name, smin > cut, std::max(0.0, cut - smin), 0.0);
}

Matrix block_antidiag(const Matrix& upper, const Matrix& lower) {
  const Index m = upper.rows();
  Matrix out = Matrix::Zero(2 * m, 2 * m);
  out.topRightCorner(m, m) = upper;
  out.bottomLeftCorner(m, m) = lower;
  return out;
}

}  // namespace

std::string to_string(TensorKind kind) { return kind == TensorKind::Endomorphism ? "(1,1)" : "(2,0)"; }

std::string to_string(Role role) {
  switch (role) {
    case Role::Endomorphism: return "endomorphism";
    case Role::SymmetricForm: return "symmetric";
    case Role::SkewForm: return "skew";
    case Role::GeneralForm: return "form";
  }
  return "unknown";
}

Matrix canonical_complex(Index m) { return block_antidiag(-identity(m), identity(m)); }
Matrix canonical_para(Index m) { return block_antidiag(identity(m), identity(m)); }
Matrix canonical_tangent(Index m) { return block_antidiag(identity(m), Matrix::Zero(m, m)); }
Matrix canonical_symplectic(Index m) { return block_antidiag(identity(m), -identity(m)); }

KreinMetric KreinMetric::from_metric(const Matrix& g, const Tolerance& tol) {
  if (!is_symmetric(g, tol)) throw Error(ErrorCode::NotSymmetric, "Krein metric must be symmetric");
  const SymmetricEigen es = symmetric_eigen(g, tol);
  const Index n = g.rows();
  Index p = 0, q = 0;
  for (Index i = 0; i < n; ++i) {
    if (es.values(i) > tol.atol)
      ++p;
    else if (es.values(i) < -tol.atol)
      ++q;
    else
      throw Error(ErrorCode::Degenerate, "metric has a null eigenvalue");
  }
  KreinMetric k;
  k.g = g;
  k.plus_basis = es.vectors.leftCols(p);
  k.minus_basis = es.vectors.rightCols(q);
  k.neutral = p == q;
  return k;
}

ParaComplexStructure ParaComplexStructure::from_matrix(const Matrix& j, const Tolerance& tol) {
  require_square(j, "para-complex structure");
  const Matrix id = identity(j.rows());
  ParaComplexStructure p;
  p.j = j;
  p.eigen_plus = kernel_and_image(0.5 * (id + j), tol).image;
  p.eigen_minus = kernel_and_image(0.5 * (id - j), tol).image;
  return p;
}

TangentStructure TangentStructure::from_matrix(const Matrix& j, const Tolerance& tol) {
  require_square(j, "tangent structure");
  TangentStructure t;
  t.j = j;
  t.kernel_basis = kernel_and_image(j, tol).kernel;
  const Matrix pinv = j.completeOrthogonalDecomposition().pseudoInverse();
  t.complement_basis = pinv * t.kernel_basis;
  return t;
}

Report validate(const BilinearForm& b, const Tolerance& tol) {
  Report r;
  r.title = "bilinear form";
  if (!square_shape(r, b.s, "form")) return r;
  nondegenerate_entry(r, "nondegenerate", b.s, tol);
  return r;
}

Report validate(const SymplecticForm& s, const Tolerance& tol) {
  Report r;
  r.title = "symplectic form";
  if (!square_shape(r, s.s, "form")) return r;
  r.flag("even dimension", s.s.rows() % 2 == 0, static_cast<double>(s.s.rows() % 2), 0.0);
  r.check("skew-symmetric", skew_residual(s.s), tol.bound(frobenius(s.s)));
  nondegenerate_entry(r, "nondegenerate", s.s, tol);
  return r;
}

Report validate(const KreinMetric& k, const Tolerance& tol) {
  Report r;
  r.title = "Krein metric";
  if (!square_shape(r, k.g, "metric")) return r;
  const Index n = k.g.rows();
  r.check("symmetric", symmetry_residual(k.g), tol.bound(frobenius(k.g)));
  const bool shapes = k.plus_basis.rows() == n && k.minus_basis.rows() == n;
  r.flag("decomposition bases have matching length", shapes);
  if (!shapes) return r;
  Matrix b(n, k.plus_basis.cols() + k.minus_basis.cols());
  b << k.plus_basis, k.minus_basis;
  const Index rank = numerical_rank(b, tol);
  r.flag("E+ and E- span the space as a direct sum", rank == n && b.cols() == n,
         static_cast<double>(n - rank), 0.0);
  const Matrix gp = k.plus_basis.transpose() * k.g * k.plus_basis;
  const Matrix gm = k.minus_basis.transpose() * k.g * k.minus_basis;
  const double pmin = gp.size() ? symmetric_eigen(gp, tol).values.minCoeff() : 1.0;
  const double mmax = gm.size() ? symmetric_eigen(gm, tol).values.maxCoeff() : -1.0;
  r.flag("g positive definite on E+", pmin > tol.atol, std::max(0.0, tol.atol - pmin), 0.0);
  r.flag("g negative definite on E-", mmax < -tol.atol, std::max(0.0, mmax + tol.atol), 0.0);
  if (k.neutral && *k.neutral)
    r.flag("neutral flag matches dim E+ = dim E-", k.plus_basis.cols() == k.minus_basis.cols());
  const double cross = frobenius(k.plus_basis.transpose() * k.g * k.minus_basis);
  if (cross > tol.bound(frobenius(k.g)))
    r.note("E+ and E- are not g-orthogonal; fundamental_symmetry needs an orthogonal splitting");
  return r;
}

Report validate(const ComplexStructure& c, const Tolerance& tol) {
  Report r;
  r.title = "complex structure";
  if (!square_shape(r, c.i, "structure")) return r;
  const Index n = c.i.rows();
  r.flag("even dimension", n % 2 == 0, static_cast<double>(n % 2), 0.0);
  r.check("I^2 = -Id", frobenius(c.i * c.i + identity(n)), tol.bound(square_scale(c.i)));
  if (!c.decomposition) return r;
  const auto& d = *c.decomposition;
  const Index m = n / 2;
  const bool shapes = d.e1.rows() == n && d.e2.rows() == n && d.e1.cols() == m && d.e2.cols() == m &&
                      d.iso.rows() == m && d.iso.cols() == m;
  r.flag("decomposition shapes", shapes);
  if (!shapes) return r;
  Matrix b(n, n);
  b << d.e1, d.e2;
  const Index rank = numerical_rank(b, tol);
  r.flag("E1 and E2 span the space as a direct sum", rank == n, static_cast<double>(n - rank), 0.0);
  const Index iso_rank = numerical_rank(d.iso, tol);
  r.flag("I : E2 -> E1 invertible", iso_rank == m, static_cast<double>(m - iso_rank), 0.0);
  if (rank != n || iso_rank != m) return r;
  const Matrix block = block_antidiag(-d.iso, d.iso.inverse());
  const Matrix rep = b.fullPivLu().solve(c.i * b);
  r.check("block form [[0,-I],[I^-1,0]]", frobenius(rep - block), tol.bound(frobenius(block)));
  return r;
}

Report validate(const ParaComplexStructure& p, const Tolerance& tol) {
  Report r;
  r.title = "para-complex structure";
  if (!square_shape(r, p.j, "structure")) return r;
  const Index n = p.j.rows();
  r.check("J^2 = Id", frobenius(p.j * p.j - identity(n)), tol.bound(square_scale(p.j)));
  r.check("trace zero", std::abs(p.j.trace()), tol.bound(frobenius(p.j)));
  const bool shapes = p.eigen_plus.rows() == n && p.eigen_minus.rows() == n;
  r.flag("eigenspace bases have matching length", shapes);
  if (!shapes) return r;
  r.flag("dim E+ = dim E-", p.eigen_plus.cols() == p.eigen_minus.cols(),
         std::abs(static_cast<double>(p.eigen_plus.cols() - p.eigen_minus.cols())), 0.0);
  Matrix b(n, p.eigen_plus.cols() + p.eigen_minus.cols());
  b << p.eigen_plus, p.eigen_minus;
  const Index rank = numerical_rank(b, tol);
  r.flag("E+ and E- span the space as a direct sum", rank == n && b.cols() == n,
         static_cast<double>(n - rank), 0.0);
  const double scale = frobenius(p.j);
  r.check("J = Id on E+", frobenius(p.j * p.eigen_plus - p.eigen_plus), tol.bound(scale));
  r.check("J = -Id on E-", frobenius(p.j * p.eigen_minus + p.eigen_minus), tol.bound(scale));
  return r;
}

Report validate(const TangentStructure& t, const Tolerance& tol) {
  Report r;
  r.title = "tangent structure";
  if (!square_shape(r, t.j, "structure")) return r;
  const Index n = t.j.rows();
  r.flag("even dimension", n % 2 == 0, static_cast<double>(n % 2), 0.0);
  r.check("J^2 = 0", frobenius(t.j * t.j), tol.bound(square_scale(t.j)));
  const KernelImage ki = kernel_and_image(t.j, tol);
  r.flag("rank J = dim / 2", 2 * ki.rank == n, std::abs(static_cast<double>(2 * ki.rank - n)), 0.0);
  r.check("im J = ker J", std::max(subspace_gap(ki.kernel, ki.image), subspace_gap(ki.image, ki.kernel)),
          tol.bound(1.0));
  const bool shapes = t.complement_basis.rows() == n && t.complement_basis.cols() == ki.kernel.cols();
  r.flag("complement basis shape", shapes);
  if (!shapes || ki.kernel.cols() == 0) return r;
  const Index rk = numerical_rank(t.j * t.complement_basis, tol);
  r.flag("J restricted to the complement is an isomorphism onto ker J", rk == ki.kernel.cols(),
         static_cast<double>(ki.kernel.cols() - rk), 0.0);
  Matrix b(n, 2 * ki.kernel.cols());
  b << ki.kernel, t.complement_basis;
  const Index rank = numerical_rank(b, tol);
  r.flag("ker J and the complement span the space", rank == n, static_cast<double>(n - rank), 0.0);
  return r;
}

Report validate(const CotangentStructure& c, const Tolerance& tol) {
  Report r = validate(SymplecticForm{c.omega}, tol);
  r.title = "cotangent structure";
  if (c.omega.rows() != c.omega.cols()) return r;
  const Index n = c.omega.rows();
  const bool shapes = c.lagrangian.rows() == n && c.complement.rows() == n;
  r.flag("subspace bases have matching length", shapes);
  if (!shapes) return r;
  const Index lrank = numerical_rank(c.lagrangian, tol);
  const Index krank = numerical_rank(c.complement, tol);
  r.flag("dim L = dim / 2", 2 * lrank == n, std::abs(static_cast<double>(2 * lrank - n)), 0.0);
  r.flag("dim K = dim / 2", 2 * krank == n, std::abs(static_cast<double>(2 * krank - n)), 0.0);
  const double scale = frobenius(c.omega) * std::max(1.0, frobenius(c.lagrangian) * frobenius(c.lagrangian));
  r.check("Omega vanishes on L x L", frobenius(c.lagrangian.transpose() * c.omega * c.lagrangian),
          tol.bound(scale));
  Matrix b(n, c.lagrangian.cols() + c.complement.cols());
  b << c.lagrangian, c.complement;
  const Index rank = numerical_rank(b, tol);
  r.flag("L and K span the space as a direct sum", rank == n && b.cols() == n,
         static_cast<double>(n - rank), 0.0);
  return r;
}

FundamentalSymmetry fundamental_symmetry(const KreinMetric& k, const Tolerance& tol) {
  tol.validate();
  const Report r = validate(k, tol);
  if (!r.passed()) throw Error(ErrorCode::InvalidDecomposition, "Krein decomposition does not validate");
  const double cross = frobenius(k.plus_basis.transpose() * k.g * k.minus_basis);
  if (cross > tol.bound(frobenius(k.g)))
    throw Error(ErrorCode::InvalidDecomposition, "E+ and E- are not g-orthogonal");
  const Index n = k.g.rows();
  const Index p = k.plus_basis.cols();
  Matrix b(n, n);
  b << k.plus_basis, k.minus_basis;
  Vector signs = Vector::Ones(n);
  signs.tail(n - p).setConstant(-1.0);
  FundamentalSymmetry out;
  out.j = b * signs.asDiagonal() * b.fullPivLu().inverse();
  out.gamma = k.g * out.j;
  out.gamma = (0.5 * (out.gamma + out.gamma.transpose())).eval();
  return out;
}

KreinIsomorphism krein_isomorphism(const Matrix& g1, const Matrix& g2, const Tolerance& tol) {
  tol.validate();
  require_square(g1, "first metric");
  require_square(g2, "second metric");
  if (g1.rows() != g2.rows()) throw Error(ErrorCode::DimensionMismatch, "metrics have different dimensions");
  if (!is_symmetric(g1, tol) || !is_symmetric(g2, tol))
    throw Error(ErrorCode::NotSymmetric, "Krein metrics must be symmetric");
  KreinIsomorphism out;
  out.first = signature(g1, tol);
  out.second = signature(g2, tol);
  if (!out.first.nondegenerate() || !out.second.nondegenerate())
    throw Error(ErrorCode::Degenerate, "Krein metrics must be nondegenerate");
  if (!(out.first == out.second)) return out;
  // Sylvester frames N_k with N_k^T g_k N_k = diag(+-1); then phi = N_2 N_1^{-1}.
  auto frame = [&](const Matrix& g) {
    const SymmetricEigen es = symmetric_eigen(g, tol);
    return Matrix(es.vectors * es.values.cwiseAbs().cwiseSqrt().cwiseInverse().asDiagonal());
  };
  const Matrix n1 = frame(g1);
  const Matrix n2 = frame(g2);
  out.phi = n2 * n1.fullPivLu().inverse();
  out.compatible = true;
  return out;
}

Matrix tangent_normal_form(const TangentStructure& t, const Tolerance& tol) {
  tol.validate();
  const Report r = validate(t, tol);
  if (!r.passed()) throw Error(ErrorCode::InvalidStructure, "tangent structure does not validate");
  const Index n = t.j.rows();
  const Index m = n / 2;
  const Matrix k = kernel_and_image(t.j, tol).kernel;
  Matrix kk(n, m);
  for (Index i = 0; i < m; ++i) kk.col(i) = sign_normalized(k.col(i));
  // Preimages of the kernel vectors taken inside the declared complement.
  const Matrix jk = t.j * t.complement_basis;
  const Matrix coeff = jk.colPivHouseholderQr().solve(kk);
  Matrix b(n, n);
  b << kk, t.complement_basis * coeff;
  const Matrix a = b.fullPivLu().inverse();
  const double res = frobenius(b * canonical_tangent(m) * a - t.j);
  if (res > tol.bound(frobenius(t.j) * std::max(1.0, frobenius(a) * frobenius(b))))
    throw Error(ErrorCode::InvalidStructure, "normal form residual too large");
  return a;
}

ComplexDecomposition complex_decomposition(const Matrix& i, const Tolerance& tol) {
  require_square(i, "complex structure");
  const Index n = i.rows();
  if (n % 2 != 0) throw Error(ErrorCode::InvalidStructure, "complex structure needs even dimension");
  const Index m = n / 2;
  Matrix e1(n, 0), span(n, 0);
  for (Index c = 0; c < n && e1.cols() < m; ++c) {
    const Vector v = Vector::Unit(n, c);
    Matrix trial(n, span.cols() + 2);
    trial << span, v, i * v;
    if (numerical_rank(trial, tol) == span.cols() + 2) {
      span = trial;
      e1.conservativeResize(n, e1.cols() + 1);
      e1.col(e1.cols() - 1) = v;
    }
  }
  if (e1.cols() != m) throw Error(ErrorCode::InvalidStructure, "no totally real complement found");
  return {e1, i * e1, identity(m)};
}

Matrix complex_normal_form(const ComplexStructure& c, const Tolerance& tol) {
  tol.validate();
  if (!c.decomposition) throw Error(ErrorCode::MissingDecomposition, "complex normal form needs E1, E2 and I");
  const Report r = validate(c, tol);
  if (!r.passed()) throw Error(ErrorCode::InvalidStructure, "complex structure does not validate");
  const auto& d = *c.decomposition;
  const Index n = c.i.rows();
  const Index m = n / 2;
  Matrix b(n, n);
  b << d.e1, d.e2;
  Matrix scale = identity(n);
  scale.bottomRightCorner(m, m) = d.iso;
  return scale * b.fullPivLu().inverse();
}

ParaComplexStructure para_from_complex(const ComplexStructure& c, const Tolerance& tol) {
  tol.validate();
  if (!c.decomposition) throw Error(ErrorCode::MissingDecomposition, "para_from_complex needs E1 and E2");
  const Report r = validate(c, tol);
  if (!r.passed()) throw Error(ErrorCode::InvalidStructure, "complex structure does not validate");
  const auto& d = *c.decomposition;
  const Index n = c.i.rows();
  const Index m = n / 2;
  Matrix b(n, n);
  b << d.e1, d.e2;
  Vector signs = Vector::Ones(n);
  signs.head(m).setConstant(-1.0);
  const Matrix s = b * signs.asDiagonal() * b.fullPivLu().inverse();
  return ParaComplexStructure::from_matrix(s * c.i, tol);
}

DarbouxBasis darboux_basis(const Matrix& s, const Tolerance& tol) {
  tol.validate();
  require_square(s, "symplectic form");
  const Index n = s.rows();
  const double norm = frobenius(s);
  if (skew_residual(s) > tol.bound(norm)) throw Error(ErrorCode::InvalidStructure, "form is not skew-symmetric");
  if (n % 2 != 0) throw Error(ErrorCode::Degenerate, "odd dimension");
  const Index m = n / 2;
  const double cut = tol.bound(norm);
  auto omega = [&](const Vector& u, const Vector& v) { return u.dot(s * v); };

  std::vector<Vector> pool;
  for (Index c = 0; c < n; ++c) pool.push_back(Vector::Unit(n, c));
  Matrix a(n, n);
  for (Index k = 0; k < m; ++k) {
    std::size_t bi = 0, bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        const double w = std::abs(omega(pool[i], pool[j]));
        if (w > best) {
          best = w;
          bi = i;
          bj = j;
        }
      }
    if (best <= cut) {
      std::ostringstream os;
      os << "pivot " << best << " at step " << k << " is below " << cut;
      throw Error(ErrorCode::Degenerate, os.str());
    }
    const Vector e = pool[bi];
    const Vector f = pool[bj] / omega(pool[bi], pool[bj]);
    a.col(k) = e;
    a.col(m + k) = f;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(bj));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(bi));
    for (auto& w : pool) w = w - omega(w, f) * e + omega(w, e) * f;
  }
  return {a, frobenius(a.transpose() * s * a - canonical_symplectic(m))};
}

}  // namespace gstruct
