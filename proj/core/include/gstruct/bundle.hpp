#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gstruct/linstruct.hpp"

namespace gstruct {

using MatrixField = std::function<Matrix(const Vector&)>;

// x -> T0 + sum_i x_i T_i
struct AffineMatrixField {
  std::vector<Matrix> terms;

  Matrix operator()(const Vector& x) const;
  static AffineMatrixField constant(const Matrix& t) { return {{t}}; }
};

struct IsotropyGroupSpec {
  StructureMatrix model;
};

// (1,1): g T g^{-1}.  (2,0): g^{-T} S g^{-1}.  Isotropy of an endomorphism is then commutation.
Matrix tensor_action(const Matrix& g, const StructureMatrix& t, const Tolerance& tol = {});

struct Membership {
  bool member = false;
  double residual = 0.0;
  double threshold = 0.0;
};

Membership in_isotropy(const Matrix& g, const IsotropyGroupSpec& spec, const Tolerance& tol = {});

struct Chart {
  std::string name;
  Vector lower;
  Vector upper;
  std::vector<Vector> samples;

  bool contains(const Vector& x) const;
};

struct Overlap {
  std::string a;
  std::string b;
  std::vector<Vector> samples;
};

struct TripleOverlap {
  std::string a;
  std::string b;
  std::string c;
  std::vector<Vector> samples;
};

class ChartAtlas {
 public:
  ChartAtlas(Index base_dim, Index fiber_dim) : base_dim_(base_dim), fiber_dim_(fiber_dim) {}

  void add_chart(Chart chart);
  void add_overlap(Overlap overlap);
  void add_triple(TripleOverlap triple);
  // T_ab; T_ba defaults to the pointwise inverse and T_aa to the identity.
  void set_transition(const std::string& a, const std::string& b, MatrixField t);

  Index base_dim() const { return base_dim_; }
  Index fiber_dim() const { return fiber_dim_; }
  const std::vector<Chart>& charts() const { return charts_; }
  const std::vector<Overlap>& overlaps() const { return overlaps_; }
  const Chart& chart(const std::string& name) const;
  bool has_transition(const std::string& a, const std::string& b) const;
  Matrix transition(const std::string& a, const std::string& b, const Vector& x) const;

  // Declared triples, or else every triple of charts whose pairwise transitions exist,
  // sampled at the points of the (a, b) overlap lying in chart c.
  std::vector<TripleOverlap> triple_overlaps() const;
  // Connected components of the graph with charts as vertices and overlaps as edges.
  std::vector<std::vector<std::string>> overlap_components() const;
  // Overlap samples inside the chart plus its own declared samples (or its box centre).
  std::vector<Vector> chart_samples(const std::string& name) const;

 private:
  Index base_dim_;
  Index fiber_dim_;
  std::vector<Chart> charts_;
  std::vector<Overlap> overlaps_;
  std::vector<TripleOverlap> triples_;
  std::map<std::pair<std::string, std::string>, MatrixField> transitions_;
};

Report check_cocycle(const ChartAtlas& atlas, const Tolerance& tol = {});
Report check_reduction(const ChartAtlas& atlas, const IsotropyGroupSpec& spec, const Tolerance& tol = {});

struct LocalTensorField {
  Role role = Role::Endomorphism;
  std::map<std::string, MatrixField> per_chart;
};

Report check_locally_modelled(const LocalTensorField& field, const ChartAtlas& atlas, const IsotropyGroupSpec& spec,
                              const Tolerance& tol = {});

}  // namespace gstruct
