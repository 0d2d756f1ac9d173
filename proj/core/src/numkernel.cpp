#include "gstruct/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gstruct/error.hpp"

namespace gstruct {

namespace {

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

void Tolerance::validate() const {
  if (!(atol >= 0.0) || !(rtol >= 0.0) || !std::isfinite(atol) || !std::isfinite(rtol))
    throw Error(ErrorCode::InvalidTolerance, "atol and rtol must be finite and non-negative");
  if (atol == 0.0 && rtol == 0.0) throw Error(ErrorCode::InvalidTolerance, "atol and rtol cannot both be zero");
}

double frobenius(const Matrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

bool is_finite(const Matrix& m) { return m.allFinite(); }

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be square, got " + shape(m));
  if (!m.allFinite()) throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has non-finite entries");
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": shapes " + shape(a) + " and " + shape(b) + " differ");
}

double symmetry_residual(const Matrix& m) { return frobenius(m - m.transpose()); }
double skew_residual(const Matrix& m) { return frobenius(m + m.transpose()); }

bool is_symmetric(const Matrix& m, const Tolerance& tol) {
  return m.rows() == m.cols() && symmetry_residual(m) <= tol.bound(frobenius(m));
}

Vector sign_normalized(const Vector& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best)) * (1.0 + 1e-12) + 1e-300) best = i;
  return (v.size() > 0 && v(best) < 0.0) ? Vector(-v) : v;
}

Matrix canonical_basis(const Matrix& b, const Tolerance& tol) {
  const Index n = b.rows();
  if (b.cols() == 0) return Matrix(n, 0);
  // Orthonormal spanning set first so the elimination below works on O(1) entries.
  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double cut = tol.bound(s.size() ? s(0) : 0.0);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  if (r == 0) return Matrix(n, 0);
  Matrix rows = svd.matrixU().leftCols(r).transpose();

  // Reduced row echelon form with partial pivoting.
  const double pivot_cut = std::max(tol.atol, 1e-12);
  Index lead = 0;
  for (Index c = 0; c < n && lead < r; ++c) {
    Index p = lead;
    for (Index i = lead + 1; i < r; ++i)
      if (std::abs(rows(i, c)) > std::abs(rows(p, c))) p = i;
    if (std::abs(rows(p, c)) <= pivot_cut) continue;
    rows.row(lead).swap(rows.row(p));
    rows.row(lead) /= rows(lead, c);
    for (Index i = 0; i < r; ++i)
      if (i != lead) rows.row(i) -= rows(i, c) * rows.row(lead);
    ++lead;
  }

  Matrix q(n, r);
  for (Index i = 0; i < r; ++i) {
    Vector v = rows.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass)
      for (Index j = 0; j < i; ++j) v -= q.col(j).dot(v) * q.col(j);
    q.col(i) = v / v.norm();
  }
  return q;
}

SymmetricEigen symmetric_eigen(const Matrix& m, const Tolerance& tol) {
  require_square(m, "symmetric_eigen input");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw Error(ErrorCode::Degenerate, "eigendecomposition failed");
  const Index n = m.rows();
  SymmetricEigen out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  // Clusters of equal eigenvalues get a basis that depends only on the eigenspace.
  const double scale = n ? out.values.cwiseAbs().maxCoeff() : 0.0;
  const double gap = tol.bound(scale);
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && out.values(end - 1) - out.values(end) <= gap) ++end;
    if (end - start > 1) {
      Matrix block = canonical_basis(out.vectors.middleCols(start, end - start), tol);
      if (block.cols() == end - start) out.vectors.middleCols(start, end - start) = block;
    } else {
      out.vectors.col(start) = sign_normalized(out.vectors.col(start));
    }
    start = end;
  }
  return out;
}

Matrix spd_sqrt(const Matrix& m, const Tolerance& tol) {
  tol.validate();
  require_square(m, "spd_sqrt input");
  const double norm = frobenius(m);
  if (symmetry_residual(m) > tol.bound(norm))
    throw Error(ErrorCode::NotSymmetric, "spd_sqrt input is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "eigendecomposition failed");
  const Vector& lambda = es.eigenvalues();
  if (lambda.size() > 0 && lambda.minCoeff() <= tol.atol) {
    std::ostringstream os;
    os << "smallest eigenvalue " << lambda.minCoeff() << " <= atol " << tol.atol;
    throw Error(ErrorCode::NotPositiveDefinite, os.str());
  }
  const Matrix& v = es.eigenvectors();
  Matrix r = v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
  return 0.5 * (r + r.transpose());
}

Matrix metric_adjoint(const Matrix& a, const Matrix& g) {
  require_square(a, "metric_adjoint operand");
  require_square(g, "metric_adjoint metric");
  if (a.rows() != g.rows())
    throw Error(ErrorCode::DimensionMismatch, "operand " + shape(a) + " vs metric " + shape(g));
  Eigen::PartialPivLU<Matrix> lu(g);
  return lu.solve(a.transpose() * g);
}

KernelImage kernel_and_image(const Matrix& a, const Tolerance& tol) {
  tol.validate();
  if (!a.allFinite()) throw Error(ErrorCode::DimensionMismatch, "kernel_and_image input has non-finite entries");
  KernelImage out;
  if (a.size() == 0) {
    out.kernel = Matrix::Identity(a.cols(), a.cols());
    out.image = Matrix(a.rows(), 0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cut = tol.bound(s(0));
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  out.rank = r;
  out.kernel = canonical_basis(svd.matrixV().rightCols(a.cols() - r), Tolerance{1e-12, 0.0});
  out.image = canonical_basis(svd.matrixU().leftCols(r), Tolerance{1e-12, 0.0});
  return out;
}

Index numerical_rank(const Matrix& a, const Tolerance& tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  const double cut = tol.bound(s(0));
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return r;
}

Signature signature(const Matrix& symmetric, const Tolerance& tol) {
  require_square(symmetric, "signature input");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (symmetric + symmetric.transpose()),
                                           Eigen::EigenvaluesOnly);
  Signature sig;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > tol.atol)
      ++sig.positive;
    else if (l < -tol.atol)
      ++sig.negative;
    else
      ++sig.zero;
  }
  return sig;
}

Matrix checked_inverse(const Matrix& m, const Tolerance& tol) {
  require_square(m, "inverse input");
  if (numerical_rank(m, tol) < m.rows()) throw Error(ErrorCode::Singular, "matrix is numerically singular");
  return m.fullPivLu().inverse();
}

double subspace_gap(const Matrix& a, const Matrix& b) {
  if (b.cols() == 0) return 0.0;
  if (a.cols() == 0) return frobenius(b);
  return frobenius(b - a * (a.transpose() * b));
}

Matrix columns(const std::vector<Vector>& cols, Index rows) {
  Matrix m(rows, static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != rows) throw Error(ErrorCode::DimensionMismatch, "basis vector has wrong length");
    m.col(static_cast<Index>(j)) = cols[j];
  }
  return m;
}

}  // namespace gstruct
