#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gstruct {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Absolute and relative tolerance; a quantity of natural size s is "zero" when below atol + rtol * s.
struct Tolerance {
  double atol = 1e-9;
  double rtol = 1e-9;

  double bound(double scale) const { return atol + rtol * scale; }
  void validate() const;
};

double frobenius(const Matrix& m);
bool is_finite(const Matrix& m);
void require_square(const Matrix& m, const char* what);
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

double symmetry_residual(const Matrix& m);
double skew_residual(const Matrix& m);
bool is_symmetric(const Matrix& m, const Tolerance& tol);

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns, canonical within each eigenvalue cluster
};

SymmetricEigen symmetric_eigen(const Matrix& m, const Tolerance& tol = {});

// Symmetric positive definite square root through the symmetric eigendecomposition.
Matrix spd_sqrt(const Matrix& m, const Tolerance& tol = {});

// Adjoint of a with respect to the bilinear form with Gram matrix g: g^{-1} a^T g.
Matrix metric_adjoint(const Matrix& a, const Matrix& g);

struct KernelImage {
  Matrix kernel;  // orthonormal columns
  Matrix image;   // orthonormal columns
  Index rank = 0;
};

KernelImage kernel_and_image(const Matrix& a, const Tolerance& tol = {});
Index numerical_rank(const Matrix& a, const Tolerance& tol = {});

struct Signature {
  int positive = 0;
  int negative = 0;
  int zero = 0;

  bool operator==(const Signature&) const = default;
  bool nondegenerate() const { return zero == 0; }
  bool neutral() const { return zero == 0 && positive == negative; }
};

Signature signature(const Matrix& symmetric, const Tolerance& tol = {});

// Inverse with a rank check; throws Singular.
Matrix checked_inverse(const Matrix& m, const Tolerance& tol = {});

// Orthonormal basis of span(b) that depends only on the subspace: reduced row echelon
// form of the spanning rows, then Gram-Schmidt in pivot order.
Matrix canonical_basis(const Matrix& b, const Tolerance& tol = {});

// Largest-magnitude component made positive (first one wins on ties).
Vector sign_normalized(const Vector& v);

// Distance of span(b) from span(a), both given by orthonormal columns: ||(I - A A^T) B||.
double subspace_gap(const Matrix& a, const Matrix& b);

Matrix columns(const std::vector<Vector>& cols, Index rows);

}  // namespace gstruct
