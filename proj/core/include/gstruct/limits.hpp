#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "gstruct/linstruct.hpp"

namespace gstruct {

enum class Variance { Projective, Direct };

std::string to_string(Variance v);

// Finite tower of levels 1..N. Projective maps go down (d_j -> d_i), direct maps go up
// (d_i -> d_j). Levels are numbered from 1 throughout.
class BondingSystem {
 public:
  // consecutive[k] is the map between levels k+1 and k+2. Direct towers with non-padding
  // injections need the consecutive projections.
  BondingSystem(std::vector<Index> dims, Variance variance, std::vector<Matrix> consecutive,
                std::vector<Matrix> projections = {});
  // Coordinate padding (x_1..x_i) -> (x_1..x_i, 0..0) and its coordinate projection.
  static BondingSystem padded(std::vector<Index> dims, Variance variance);

  Variance variance() const { return variance_; }
  std::size_t levels() const { return dims_.size(); }
  Index dim(std::size_t level) const;
  const std::vector<Index>& dims() const { return dims_; }

  // Overrides a non-consecutive map instead of composing it.
  void set_explicit(std::size_t i, std::size_t j, Matrix m);

  // lambda_i^j for i <= j.
  Matrix map(std::size_t i, std::size_t j) const;
  // P_i^j (direct towers only).
  Matrix projection(std::size_t i, std::size_t j) const;

 private:
  void check_pair(std::size_t i, std::size_t j) const;

  std::vector<Index> dims_;
  Variance variance_;
  std::vector<Matrix> consecutive_;
  std::vector<Matrix> projections_;
  std::map<std::pair<std::size_t, std::size_t>, Matrix> explicit_;
};

Report validate_bonding(const BondingSystem& b, const Tolerance& tol = {});

struct CoherentSequence {
  BondingSystem bonding;
  TensorKind kind = TensorKind::Endomorphism;
  std::vector<Matrix> levels;  // levels[n-1] lives on level n
};

// Residual of the coherence identity between levels i < j.
double coherence_residual(const CoherentSequence& seq, std::size_t i, std::size_t j);
Report check_coherent(const CoherentSequence& seq, const Tolerance& tol = {});

// Level-n representative applied to u ((1,1)) or evaluated on (u, v) ((2,0)).
Vector limit_apply(const CoherentSequence& seq, std::size_t level, const Vector& u, const Tolerance& tol = {});
double limit_form(const CoherentSequence& seq, std::size_t level, const Vector& u, const Vector& v,
                  const Tolerance& tol = {});

struct LevelTuple {
  std::vector<Matrix> entries;  // f_1..f_n

  std::size_t level() const { return entries.size(); }
  static LevelTuple identity(const BondingSystem& b, std::size_t n);
};

// Max over i < j <= n of the intertwining residual with the bonding maps.
double tuple_constraint_residual(const LevelTuple& t, const BondingSystem& b);
LevelTuple compose(const LevelTuple& a, const LevelTuple& b);
LevelTuple inverse(const LevelTuple& a, const Tolerance& tol = {});
// (h_0)_i^n: keep f_1..f_i.
LevelTuple truncate(const LevelTuple& a, std::size_t i);

struct LevelGroupOps {
  LevelTuple product;
  std::optional<LevelTuple> inverse_a;
  std::optional<LevelTuple> inverse_b;
  Report report;
};

LevelGroupOps level_group_ops(const LevelTuple& a, const LevelTuple& b, const BondingSystem& bonding,
                              const Tolerance& tol = {});

struct GEnMembership {
  bool member = false;
  double residual = 0.0;
  Matrix adapted_basis;  // columns adapted to E_1 c E_2 c ... c E_n
  Matrix adapted;        // A in that basis, block upper triangular for members
  // blocks[a][b] for 1 <= a <= b <= n (0-based in the vector); empty when not a member
  std::vector<std::vector<Matrix>> blocks;
};

GEnMembership gEn_membership(const Matrix& a, const BondingSystem& b, std::size_t level, const Tolerance& tol = {});

// P_i^j A iota_i^j for a member A at level j.
Matrix theta_projection(const Matrix& a, std::size_t j, std::size_t i, const BondingSystem& b,
                        const Tolerance& tol = {});

// X -> left X right between level Lie algebras.
struct AlgebraMorphism {
  Matrix left;
  Matrix right;

  Matrix operator()(const Matrix& x) const { return left * x * right; }
};

// omega(x)(v) = sum_k v_k (C_k0 + sum_l x_l C_k,l+1)
struct LevelConnectionForm {
  std::vector<std::vector<Matrix>> coefficients;

  Matrix operator()(const Vector& x, const Vector& v) const;
};

struct ConnectionFormSequence {
  BondingSystem bonding;  // shared by base and fiber
  std::vector<LevelConnectionForm> forms;
  std::vector<StructureMatrix> model_tensors;  // empty: no adaptedness checks
  std::vector<AlgebraMorphism> consecutive_morphisms;  // empty: lambda X lambda^+ or iota X P

  AlgebraMorphism morphism(std::size_t i, std::size_t j) const;
};

// Samples are points of the top level N.
Report check_connection_coherence(const ConnectionFormSequence& seq, const std::vector<Vector>& samples,
                                  const Tolerance& tol = {});

}  // namespace gstruct
