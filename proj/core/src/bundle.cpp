#include "gstruct/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gstruct/error.hpp"

namespace gstruct {

namespace {

std::string point_str(const Vector& x) {
  std::ostringstream os;
  os << "(";
  for (Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ")";
  return os.str();
}

enum class Invariant { Signature, SkewRank, Complex, Involution, Nilpotent };

struct OrbitData {
  Invariant kind;
  Signature sig;
  std::vector<Index> ranks;
  double defect = 0.0;  // how far the value is from satisfying the kind's defining relation
};

double sq(const Matrix& m) {
  const double f = frobenius(m);
  return std::max(f * f, 1.0);
}

Invariant classify(const StructureMatrix& t, const Tolerance& tol) {
  const Matrix& m = t.m;
  switch (t.role) {
    case Role::SymmetricForm: return Invariant::Signature;
    case Role::SkewForm: return Invariant::SkewRank;
    case Role::GeneralForm: throw Error(ErrorCode::UnsupportedKind, "no orbit invariant for general bilinear forms");
    case Role::Endomorphism: break;
  }
  const Index n = m.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix m2 = m * m;
  if (frobenius(m2 + id) <= tol.bound(sq(m))) return Invariant::Complex;
  if (frobenius(m2 - id) <= tol.bound(sq(m))) return Invariant::Involution;
  Matrix p = m;
  for (Index k = 1; k < n; ++k) p = p * m;
  if (frobenius(p) <= tol.bound(std::pow(std::max(frobenius(m), 1.0), static_cast<double>(n))))
    return Invariant::Nilpotent;
  throw Error(ErrorCode::UnsupportedKind, "endomorphism is neither complex, involutive nor nilpotent");
}

OrbitData orbit_data(const Matrix& m, Invariant kind, const Tolerance& tol) {
  OrbitData d{kind, {}, {}, 0.0};
  const Index n = m.rows();
  const Matrix id = Matrix::Identity(n, n);
  switch (kind) {
    case Invariant::Signature:
      d.sig = signature(m, tol);
      d.defect = symmetry_residual(m);
      break;
    case Invariant::SkewRank:
      d.ranks = {numerical_rank(m, tol)};
      d.defect = skew_residual(m);
      break;
    case Invariant::Complex:
      d.defect = frobenius(m * m + id);
      break;
    case Invariant::Involution:
      d.defect = frobenius(m * m - id);
      d.ranks = {numerical_rank(0.5 * (id + m), tol)};
      break;
    case Invariant::Nilpotent: {
      Matrix p = m;
      for (Index k = 1; k <= n; ++k) {
        d.ranks.push_back(numerical_rank(p, tol));
        p = p * m;
      }
      d.defect = frobenius(p);
      break;
    }
  }
  return d;
}

bool same_orbit(const OrbitData& a, const OrbitData& b) {
  return a.kind == b.kind && a.sig == b.sig && a.ranks == b.ranks;
}

}  // namespace

Matrix AffineMatrixField::operator()(const Vector& x) const {
  if (terms.empty()) throw Error(ErrorCode::ShapeMismatch, "affine field has no terms");
  if (static_cast<Index>(terms.size()) > x.size() + 1)
    throw Error(ErrorCode::ShapeMismatch, "affine field has more coefficients than coordinates");
  Matrix out = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) out += x(static_cast<Index>(i - 1)) * terms[i];
  return out;
}

Matrix tensor_action(const Matrix& g, const StructureMatrix& t, const Tolerance& tol) {
  require_square(g, "group element");
  require_square(t.m, "tensor");
  if (g.rows() != t.m.rows()) throw Error(ErrorCode::DimensionMismatch, "group element and tensor sizes differ");
  const Matrix gi = checked_inverse(g, tol);
  if (t.kind() == TensorKind::Endomorphism) return g * t.m * gi;
  return gi.transpose() * t.m * gi;
}

Membership in_isotropy(const Matrix& g, const IsotropyGroupSpec& spec, const Tolerance& tol) {
  Membership m;
  m.residual = frobenius(tensor_action(g, spec.model, tol) - spec.model.m);
  m.threshold = tol.bound(frobenius(spec.model.m));
  m.member = m.residual <= m.threshold;
  return m;
}

bool Chart::contains(const Vector& x) const {
  if (x.size() != lower.size()) return false;
  for (Index i = 0; i < x.size(); ++i)
    if (x(i) < lower(i) || x(i) > upper(i)) return false;
  return true;
}

void ChartAtlas::add_chart(Chart chart) {
  if (chart.lower.size() != base_dim_ || chart.upper.size() != base_dim_)
    throw Error(ErrorCode::ShapeMismatch, "chart " + chart.name + " box has wrong dimension");
  for (const auto& c : charts_)
    if (c.name == chart.name) throw Error(ErrorCode::ShapeMismatch, "duplicate chart " + chart.name);
  charts_.push_back(std::move(chart));
}

void ChartAtlas::add_overlap(Overlap overlap) {
  chart(overlap.a);
  chart(overlap.b);
  if (overlap.samples.empty())
    throw Error(ErrorCode::ShapeMismatch, "overlap " + overlap.a + "/" + overlap.b + " has no samples");
  for (const auto& x : overlap.samples)
    if (x.size() != base_dim_) throw Error(ErrorCode::ShapeMismatch, "overlap sample has wrong dimension");
  overlaps_.push_back(std::move(overlap));
}

void ChartAtlas::add_triple(TripleOverlap triple) {
  chart(triple.a);
  chart(triple.b);
  chart(triple.c);
  triples_.push_back(std::move(triple));
}

void ChartAtlas::set_transition(const std::string& a, const std::string& b, MatrixField t) {
  chart(a);
  chart(b);
  transitions_[{a, b}] = std::move(t);
}

const Chart& ChartAtlas::chart(const std::string& name) const {
  for (const auto& c : charts_)
    if (c.name == name) return c;
  throw Error(ErrorCode::ShapeMismatch, "unknown chart " + name);
}

bool ChartAtlas::has_transition(const std::string& a, const std::string& b) const {
  return a == b || transitions_.count({a, b}) || transitions_.count({b, a});
}

Matrix ChartAtlas::transition(const std::string& a, const std::string& b, const Vector& x) const {
  if (a == b) return Matrix::Identity(fiber_dim_, fiber_dim_);
  Matrix t;
  if (auto it = transitions_.find({a, b}); it != transitions_.end()) {
    t = it->second(x);
  } else if (auto jt = transitions_.find({b, a}); jt != transitions_.end()) {
    t = checked_inverse(jt->second(x));
  } else {
    throw Error(ErrorCode::ShapeMismatch, "no transition between " + a + " and " + b);
  }
  if (t.rows() != fiber_dim_ || t.cols() != fiber_dim_)
    throw Error(ErrorCode::ShapeMismatch, "transition " + a + "/" + b + " has wrong size");
  return t;
}

std::vector<TripleOverlap> ChartAtlas::triple_overlaps() const {
  if (!triples_.empty()) return triples_;
  std::vector<TripleOverlap> out;
  for (const auto& ov : overlaps_) {
    for (const auto& c : charts_) {
      if (c.name == ov.a || c.name == ov.b) continue;
      if (!has_transition(ov.a, c.name) || !has_transition(ov.b, c.name)) continue;
      TripleOverlap t{ov.a, ov.b, c.name, {}};
      for (const auto& x : ov.samples)
        if (c.contains(x)) t.samples.push_back(x);
      if (!t.samples.empty()) out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<std::vector<std::string>> ChartAtlas::overlap_components() const {
  std::map<std::string, std::string> parent;
  for (const auto& c : charts_) parent[c.name] = c.name;
  std::function<std::string(const std::string&)> find = [&](const std::string& s) {
    return parent[s] == s ? s : parent[s] = find(parent[s]);
  };
  for (const auto& ov : overlaps_) parent[find(ov.a)] = find(ov.b);
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& c : charts_) groups[find(c.name)].push_back(c.name);
  std::vector<std::vector<std::string>> out;
  for (auto& [root, names] : groups) out.push_back(std::move(names));
  return out;
}

std::vector<Vector> ChartAtlas::chart_samples(const std::string& name) const {
  const Chart& c = chart(name);
  std::vector<Vector> out = c.samples;
  if (out.empty()) out.push_back(0.5 * (c.lower + c.upper));
  for (const auto& ov : overlaps_)
    if (ov.a == name || ov.b == name)
      for (const auto& x : ov.samples) out.push_back(x);
  return out;
}

namespace {

void note_connectivity(Report& r, const ChartAtlas& atlas) {
  const auto comps = atlas.overlap_components();
  if (comps.size() > 1) {
    std::ostringstream os;
    os << "overlap graph has " << comps.size() << " connected components; conclusions hold per component";
    r.note(os.str());
  }
}

}  // namespace

Report check_cocycle(const ChartAtlas& atlas, const Tolerance& tol) {
  tol.validate();
  Report r;
  r.title = "cocycle";
  const auto triples = atlas.triple_overlaps();
  for (const auto& ov : atlas.overlaps()) {
    // Invertibility of every sampled transition value.
    double worst = std::numeric_limits<double>::infinity();
    std::string where;
    for (const auto& x : ov.samples) {
      const Matrix t = atlas.transition(ov.a, ov.b, x);
      Eigen::JacobiSVD<Matrix> svd(t);
      const Vector& s = svd.singularValues();
      const double ratio = s(s.size() - 1) / std::max(s(0), 1e-300);
      if (ratio < worst) {
        worst = ratio;
        where = point_str(x);
      }
    }
    r.flag("T_" + ov.a + ov.b + " invertible", worst > tol.bound(1.0), std::max(0.0, tol.bound(1.0) - worst), 0.0, where);
  }
  if (triples.empty()) {
    r.flag("no triple overlaps (vacuous)", true);
  }
  for (const auto& t : triples) {
    double worst = 0.0, thr = 0.0;
    std::string where;
    for (const auto& x : t.samples) {
      const Matrix ac = atlas.transition(t.a, t.c, x);
      const double res = frobenius(ac - atlas.transition(t.a, t.b, x) * atlas.transition(t.b, t.c, x));
      if (res >= worst) {
        worst = res;
        thr = tol.bound(frobenius(ac));
        where = point_str(x);
      }
    }
    r.check("T_" + t.a + t.c + " = T_" + t.a + t.b + " T_" + t.b + t.c, worst, thr, where);
  }
  note_connectivity(r, atlas);
  return r;
}

Report check_reduction(const ChartAtlas& atlas, const IsotropyGroupSpec& spec, const Tolerance& tol) {
  tol.validate();
  if (spec.model.m.rows() != atlas.fiber_dim())
    throw Error(ErrorCode::DimensionMismatch, "model tensor size differs from the fiber dimension");
  Report r;
  r.title = "reduction to the isotropy group";
  if (atlas.overlaps().empty()) r.flag("no overlaps (vacuous)", true);
  for (const auto& ov : atlas.overlaps()) {
    Membership worst;
    worst.residual = -1.0;
    std::string where;
    for (const auto& x : ov.samples) {
      const Membership m = in_isotropy(atlas.transition(ov.a, ov.b, x), spec, tol);
      if (m.residual > worst.residual) {
        worst = m;
        where = point_str(x);
      }
    }
    r.check("T_" + ov.a + ov.b + " in G(T)", worst.residual, worst.threshold, where);
  }
  note_connectivity(r, atlas);
  return r;
}

Report check_locally_modelled(const LocalTensorField& field, const ChartAtlas& atlas, const IsotropyGroupSpec& spec,
                              const Tolerance& tol) {
  tol.validate();
  const Invariant kind = classify(spec.model, tol);
  const OrbitData model = orbit_data(spec.model.m, kind, tol);
  Report r;
  r.title = "locally modelled";
  for (const auto& c : atlas.charts()) {
    auto it = field.per_chart.find(c.name);
    if (it == field.per_chart.end()) {
      r.flag("field defined on " + c.name, false);
      continue;
    }
    double defect = 0.0, thr = 0.0;
    std::vector<std::string> bad;
    for (const auto& x : atlas.chart_samples(c.name)) {
      const Matrix v = it->second(x);
      if (v.rows() != atlas.fiber_dim() || v.cols() != atlas.fiber_dim() || !v.allFinite()) {
        bad.push_back(point_str(x));
        continue;
      }
      const OrbitData d = orbit_data(v, kind, tol);
      const double bound = tol.bound(sq(v));
      defect = std::max(defect, d.defect);
      thr = std::max(thr, bound);
      if (!same_orbit(d, model) || d.defect > bound) bad.push_back(point_str(x));
    }
    std::string where;
    for (std::size_t i = 0; i < bad.size() && i < 8; ++i) where += (i ? " " : "") + bad[i];
    if (bad.size() > 8) where += " ...";
    r.flag("orbit of T on " + c.name, bad.empty(), defect, thr, where);
  }
  note_connectivity(r, atlas);
  return r;
}

}  // namespace gstruct
