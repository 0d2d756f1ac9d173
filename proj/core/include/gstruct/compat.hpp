#pragma once

#include <optional>

#include "gstruct/linstruct.hpp"

namespace gstruct {

enum class Flavor { Kahler, ParaKahler };

std::string to_string(Flavor flavor);

// Gram matrices of Omega and g, and the matrix of the (para-)complex structure.
struct CompatibleTriple {
  Flavor flavor = Flavor::Kahler;
  Matrix omega;
  Matrix g;
  Matrix structure;
};

struct PartialTriple {
  Flavor flavor = Flavor::Kahler;
  std::optional<Matrix> omega;
  std::optional<Matrix> g;
  std::optional<Matrix> structure;
};

// Omega(u, v) = g(T u, v), so S = T^T G.
Matrix omega_from(const Matrix& g, const Matrix& structure, Flavor flavor, const Tolerance& tol = {});

struct MetricFromForm {
  Matrix g;  // g(u, v) = Omega(u, T v), so G = S T
  Signature signature;
};

MetricFromForm g_from(const Matrix& omega, const Matrix& structure, Flavor flavor, const Tolerance& tol = {});

struct PolarConstruction {
  Matrix a;                 // g(A u, v) = Omega(u, v)
  Matrix a_adjoint;         // g-adjoint of A
  Matrix r;                 // g-self-adjoint positive root of A A*
  Matrix structure;         // R^{-1} A (Kahler) or A itself (para)
  Matrix corrected_metric;  // g(R u, v); equals g for the para flavor
};

PolarConstruction structure_from(const Matrix& g, const Matrix& omega, Flavor flavor, const Tolerance& tol = {});

// Square root of a g-self-adjoint positive operator that is itself g-self-adjoint (g positive definite).
Matrix metric_sqrt(const Matrix& m, const Matrix& g, const Tolerance& tol = {});

// Checks every pair present in the partial triple on the full standard basis.
Report is_compatible(const PartialTriple& pair, const Tolerance& tol = {});
Report validate(const CompatibleTriple& triple, const Tolerance& tol = {});

struct Completion {
  CompatibleTriple triple;
  Report report;
  std::optional<PolarConstruction> polar;
  std::optional<Signature> metric_signature;
};

Completion complete_triple(const PartialTriple& pair, const Tolerance& tol = {});

struct LagrangianSplitting {
  Matrix e1;
  Matrix e2;
  Report report;
};

LagrangianSplitting lagrangian_orthogonal_decomposition(const CompatibleTriple& triple, const Tolerance& tol = {});

}  // namespace gstruct
