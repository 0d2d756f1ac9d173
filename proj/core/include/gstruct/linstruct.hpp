#pragma once

#include <optional>
#include <string>

#include "gstruct/numkernel.hpp"
#include "gstruct/report.hpp"

namespace gstruct {

// Type (1,1) tensors act by conjugation, type (2,0) tensors by congruence.
enum class TensorKind { Endomorphism, Form };

enum class Role { Endomorphism, SymmetricForm, SkewForm, GeneralForm };

struct StructureMatrix {
  Matrix m;
  Role role = Role::Endomorphism;

  TensorKind kind() const { return role == Role::Endomorphism ? TensorKind::Endomorphism : TensorKind::Form; }
};

std::string to_string(TensorKind kind);
std::string to_string(Role role);

struct BilinearForm {
  Matrix s;

  double operator()(const Vector& u, const Vector& v) const { return u.dot(s * v); }
  // u -> B(u, .)
  Vector flat(const Vector& u) const { return s.transpose() * u; }
};

struct SymplecticForm {
  Matrix s;
};

struct KreinMetric {
  Matrix g;
  Matrix plus_basis;   // columns span E+
  Matrix minus_basis;  // columns span E-
  std::optional<bool> neutral;

  // Splits a nondegenerate symmetric g along its eigenvectors; throws Degenerate otherwise.
  static KreinMetric from_metric(const Matrix& g, const Tolerance& tol = {});
};

// E1, E2 (columns) and I : E2 -> E1 written in those bases, so that the structure reads
// [[0, -I], [I^{-1}, 0]] in the basis [E1 | E2].
struct ComplexDecomposition {
  Matrix e1;
  Matrix e2;
  Matrix iso;
};

struct ComplexStructure {
  Matrix i;
  std::optional<ComplexDecomposition> decomposition;
};

struct ParaComplexStructure {
  Matrix j;
  Matrix eigen_plus;
  Matrix eigen_minus;

  static ParaComplexStructure from_matrix(const Matrix& j, const Tolerance& tol = {});
};

struct TangentStructure {
  Matrix j;
  Matrix kernel_basis;
  Matrix complement_basis;

  static TangentStructure from_matrix(const Matrix& j, const Tolerance& tol = {});
};

struct CotangentStructure {
  Matrix omega;
  Matrix lagrangian;
  Matrix complement;
};

Matrix canonical_complex(Index m);     // [[0, -Id], [Id, 0]]
Matrix canonical_para(Index m);        // [[0, Id], [Id, 0]]
Matrix canonical_tangent(Index m);     // [[0, Id], [0, 0]]
Matrix canonical_symplectic(Index m);  // [[0, Id], [-Id, 0]]

Report validate(const BilinearForm& b, const Tolerance& tol = {});
Report validate(const SymplecticForm& s, const Tolerance& tol = {});
Report validate(const KreinMetric& k, const Tolerance& tol = {});
Report validate(const ComplexStructure& c, const Tolerance& tol = {});
Report validate(const ParaComplexStructure& p, const Tolerance& tol = {});
Report validate(const TangentStructure& t, const Tolerance& tol = {});
Report validate(const CotangentStructure& c, const Tolerance& tol = {});

struct FundamentalSymmetry {
  Matrix j;      // +1 on E+, -1 on E-
  Matrix gamma;  // gamma(u, v) = g(u, J v), positive definite
};

FundamentalSymmetry fundamental_symmetry(const KreinMetric& k, const Tolerance& tol = {});

struct KreinIsomorphism {
  bool compatible = false;
  Matrix phi;  // phi^T g2 phi = g1 when compatible
  Signature first;
  Signature second;
};

KreinIsomorphism krein_isomorphism(const Matrix& g1, const Matrix& g2, const Tolerance& tol = {});

// A with A^{-1} J_can A = J.
Matrix tangent_normal_form(const TangentStructure& t, const Tolerance& tol = {});
// A with A^{-1} I_can A = I; needs the decomposition.
Matrix complex_normal_form(const ComplexStructure& c, const Tolerance& tol = {});
// Totally real E1 picked greedily from the standard basis, E2 = I(E1), iso = Id.
ComplexDecomposition complex_decomposition(const Matrix& i, const Tolerance& tol = {});
// J = S I with S = -Id on E1 and Id on E2.
ParaComplexStructure para_from_complex(const ComplexStructure& c, const Tolerance& tol = {});

struct DarbouxBasis {
  Matrix basis;     // columns e_1..e_m, f_1..f_m
  double residual;  // ||A^T S A - [[0, Id], [-Id, 0]]||
};

DarbouxBasis darboux_basis(const Matrix& s, const Tolerance& tol = {});

}  // namespace gstruct
