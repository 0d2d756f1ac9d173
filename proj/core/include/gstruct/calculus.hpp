#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gstruct/linstruct.hpp"
#include "gstruct/polynomial.hpp"

namespace gstruct {

enum class DerivativeMode { FiniteDifference, Polynomial };

std::string to_string(DerivativeMode mode);

// Central difference steps; second derivatives get their own, larger step because their
// rounding error grows like eps / step^2.
struct FiniteDifference {
  double step = 1e-5;
  double second_step = 1e-4;

  static FiniteDifference with_step(double h) { return {h, std::max(h, 1e-4)}; }
  FiniteDifference scaled(double factor) const { return {step * factor, second_step * factor}; }
};

class VectorField {
 public:
  using Evaluator = std::function<Vector(const Vector&)>;

  static VectorField polynomial(std::vector<Polynomial> components);
  static VectorField sampled(Index dim, Evaluator f, FiniteDifference fd = {});
  static VectorField constant(const Vector& v, DerivativeMode mode, FiniteDifference fd = {});

  DerivativeMode mode() const { return mode_; }
  Index dim() const { return dim_; }
  const FiniteDifference& fd() const { return fd_; }
  const std::optional<std::vector<Polynomial>>& polynomials() const { return poly_; }

  Vector value(const Vector& x) const { return value_(x); }
  // (i, j) = d_j X^i
  Matrix jacobian(const Vector& x) const { return jacobian_(x); }
  // (i, j) = d_l d_j X^i
  Matrix jacobian_partial(const Vector& x, Index l) const { return jacobian_partial_(x, l); }

  VectorField with_fd(FiniteDifference fd) const;

 private:
  friend VectorField lie_bracket(const VectorField& x, const VectorField& y);
  DerivativeMode mode_ = DerivativeMode::FiniteDifference;
  Index dim_ = 0;
  FiniteDifference fd_;
  std::optional<std::vector<Polynomial>> poly_;
  Evaluator value_;
  std::function<Matrix(const Vector&)> jacobian_;
  std::function<Matrix(const Vector&, Index)> jacobian_partial_;
  // Rebuilds this field for another step; empty for polynomial fields.
  std::function<VectorField(FiniteDifference)> refit_;
};

class TensorFieldOnChart {
 public:
  using Evaluator = std::function<Matrix(const Vector&)>;

  static TensorFieldOnChart polynomial(PolyMatrix m, Role role);
  static TensorFieldOnChart sampled(Index dim, Evaluator f, Role role, FiniteDifference fd = {});
  static TensorFieldOnChart constant(const Matrix& m, Role role, DerivativeMode mode, FiniteDifference fd = {});

  DerivativeMode mode() const { return mode_; }
  Index dim() const { return dim_; }
  Role role() const { return role_; }
  TensorKind kind() const { return role_ == Role::Endomorphism ? TensorKind::Endomorphism : TensorKind::Form; }
  const FiniteDifference& fd() const { return fd_; }
  const std::optional<PolyMatrix>& polynomials() const { return poly_; }

  Matrix value(const Vector& x) const;
  Matrix partial(const Vector& x, Index i) const;
  Matrix second_partial(const Vector& x, Index i, Index j) const;

  TensorFieldOnChart with_fd(FiniteDifference fd) const;

 private:
  DerivativeMode mode_ = DerivativeMode::FiniteDifference;
  Index dim_ = 0;
  Role role_ = Role::Endomorphism;
  FiniteDifference fd_;
  std::optional<PolyMatrix> poly_;
  std::optional<std::vector<PolyMatrix>> poly_d1_;
  Evaluator eval_;
};

// Built-in fields.
TensorFieldOnChart sphere_stereographic(Index dim, FiniteDifference fd = {});
// Phi^* g0 = DPhi^T g0 DPhi; exact polynomial when mode is Polynomial.
TensorFieldOnChart pullback_metric(const std::vector<Polynomial>& phi, const Matrix& g0, DerivativeMode mode,
                                   FiniteDifference fd = {});
// Phi^* T0 = DPhi^{-1} T0 DPhi for a constant (1,1) tensor; always sampled.
TensorFieldOnChart pullback_endomorphism(const std::vector<Polynomial>& phi, const Matrix& t0,
                                         FiniteDifference fd = {});

struct Grid {
  Vector lower;
  Vector upper;
  std::vector<int> counts;

  std::vector<Vector> points() const;
  static Grid uniform(Index dim, double lo, double hi, int count);
};

// [X, Y] = DY X - DX Y
VectorField lie_bracket(const VectorField& x, const VectorField& y);

// Bracket of two fields known only through value and Jacobian at a point.
Vector bracket_at(const Vector& u, const Matrix& du, const Vector& v, const Matrix& dv);

// N_A(X,Y) = [AX,AY] - A[AX,Y] - A[X,AY] + A^2[X,Y] at x.
Vector nijenhuis(const TensorFieldOnChart& a, const VectorField& x, const VectorField& y, const Vector& at);

enum class StructureKind { Tangent, ParaComplex, Complex };

std::string to_string(StructureKind kind);

struct Verdict {
  bool holds = false;
  std::string label;
  double max_residual = 0.0;
  double threshold = 0.0;
  double discretization_estimate = 0.0;  // Richardson estimate in FD mode, 0 otherwise
  Vector worst_point;
};

// Coordinate-field Nijenhuis residual over the grid. In FD mode the bound is widened by a
// Richardson estimate of the truncation error obtained from a second pass at twice the step.
Verdict is_integrable_structure(const TensorFieldOnChart& field, StructureKind kind, const Grid& grid,
                                const Tolerance& tol = {});

// Gamma^k_ij stored at (k * n + i) * n + j.
struct Christoffel {
  Index n = 0;
  std::vector<double> data;

  explicit Christoffel(Index dim = 0) : n(dim), data(static_cast<std::size_t>(dim * dim * dim), 0.0) {}
  double& operator()(Index k, Index i, Index j) { return data[static_cast<std::size_t>((k * n + i) * n + j)]; }
  double operator()(Index k, Index i, Index j) const { return data[static_cast<std::size_t>((k * n + i) * n + j)]; }
  // (Gamma_i)^k_m = Gamma^k_im
  Matrix slice(Index i) const;
  double norm() const;
};

struct ConnectionData {
  Index n = 0;
  std::function<Christoffel(const Vector&)> gamma;
  // d_l Gamma for l = 0..n-1
  std::function<std::vector<Christoffel>(const Vector&)> gamma_partials;
};

ConnectionData levi_civita(const TensorFieldOnChart& g, const Tolerance& tol = {});
// Connection from a Christoffel evaluator alone; partials by central differences.
ConnectionData connection_from(Index n, std::function<Christoffel(const Vector&)> gamma, FiniteDifference fd = {});

// R^i_jkl stored at ((i * n + j) * n + k) * n + l.
struct Riemann {
  Index n = 0;
  std::vector<double> data;

  explicit Riemann(Index dim = 0) : n(dim), data(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}
  double& operator()(Index i, Index j, Index k, Index l) {
    return data[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  double operator()(Index i, Index j, Index k, Index l) const {
    return data[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  double norm() const;
};

Riemann curvature(const ConnectionData& conn, const Vector& at);
// Sectional curvature of span(d_0, d_1): g(R(d_0,d_1)d_1, d_0) / (g00 g11 - g01^2).
double sectional_curvature(const Riemann& r, const Matrix& g);

Verdict is_metric_integrable(const TensorFieldOnChart& g, const Grid& grid, const Tolerance& tol = {});

// (nabla_i T) for i = 0..n-1; (1,1): dT + Gamma_i T - T Gamma_i, (2,0): dT - Gamma_i^T T - T Gamma_i.
std::vector<Matrix> covariant_derivative(const ConnectionData& conn, const TensorFieldOnChart& field,
                                         const Vector& at);

struct CovariantResidual {
  double max_residual = 0.0;
  Vector worst_point;
};

CovariantResidual covariant_derivative_of_structure(const ConnectionData& conn, const TensorFieldOnChart& field,
                                                    const Grid& grid);

// Transports v along the polygon through the given vertices with RK4, `steps` steps per segment.
Vector parallel_transport(const ConnectionData& conn, const std::vector<Vector>& vertices, const Vector& v,
                          int steps = 200);

}  // namespace gstruct
