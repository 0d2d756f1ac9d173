#include "gstruct/limits.hpp"

#include <cmath>
#include <sstream>
#include <tuple>

#include "gstruct/error.hpp"

namespace gstruct {

namespace {

std::string pair_str(std::size_t i, std::size_t j) {
  std::ostringstream os;
  os << "(" << i << "," << j << ")";
  return os.str();
}

bool is_padding(const Matrix& m) {
  // m : d_i -> d_j with identity on top and zeros below
  if (m.rows() < m.cols()) return false;
  return m.topRows(m.cols()).isIdentity(0.0) && m.bottomRows(m.rows() - m.cols()).isZero(0.0);
}

Matrix padding(Index from, Index to) {
  Matrix m = Matrix::Zero(to, from);
  m.topRows(from).setIdentity();
  return m;
}

}  // namespace

std::string to_string(Variance v) { return v == Variance::Projective ? "projective" : "direct"; }

BondingSystem::BondingSystem(std::vector<Index> dims, Variance variance, std::vector<Matrix> consecutive,
                             std::vector<Matrix> projections)
    : dims_(std::move(dims)),
      variance_(variance),
      consecutive_(std::move(consecutive)),
      projections_(std::move(projections)) {
  if (dims_.empty()) throw Error(ErrorCode::ShapeMismatch, "tower needs at least one level");
  for (std::size_t k = 0; k + 1 < dims_.size(); ++k)
    if (dims_[k] > dims_[k + 1] || dims_[k] <= 0)
      throw Error(ErrorCode::ShapeMismatch, "level dimensions must be positive and non-decreasing");
  if (consecutive_.size() + 1 != dims_.size())
    throw Error(ErrorCode::ShapeMismatch, "need one consecutive map per pair of neighbouring levels");
  for (std::size_t k = 0; k < consecutive_.size(); ++k) {
    const Index lo = dims_[k], hi = dims_[k + 1];
    const Matrix& m = consecutive_[k];
    const bool ok = variance_ == Variance::Projective ? (m.rows() == lo && m.cols() == hi)
                                                      : (m.rows() == hi && m.cols() == lo);
    if (!ok) throw Error(ErrorCode::ShapeMismatch, "consecutive map " + pair_str(k + 1, k + 2) + " has wrong shape");
  }
  if (variance_ == Variance::Direct) {
    if (projections_.empty()) {
      for (std::size_t k = 0; k < consecutive_.size(); ++k) {
        if (!is_padding(consecutive_[k]))
          throw Error(ErrorCode::MissingProjection,
                      "non-padding injection " + pair_str(k + 1, k + 2) + " needs explicit projections");
        projections_.push_back(padding(dims_[k], dims_[k + 1]).transpose());
      }
    }
    if (projections_.size() != consecutive_.size())
      throw Error(ErrorCode::ShapeMismatch, "need one projection per consecutive injection");
    for (std::size_t k = 0; k < projections_.size(); ++k)
      if (projections_[k].rows() != dims_[k] || projections_[k].cols() != dims_[k + 1])
        throw Error(ErrorCode::ShapeMismatch, "projection " + pair_str(k + 1, k + 2) + " has wrong shape");
  }
}

BondingSystem BondingSystem::padded(std::vector<Index> dims, Variance variance) {
  std::vector<Matrix> maps;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const Matrix pad = padding(dims[k], dims[k + 1]);
    maps.push_back(variance == Variance::Direct ? pad : Matrix(pad.transpose()));
  }
  return BondingSystem(std::move(dims), variance, std::move(maps));
}

Index BondingSystem::dim(std::size_t level) const {
  if (level < 1 || level > dims_.size()) throw Error(ErrorCode::ShapeMismatch, "level out of range");
  return dims_[level - 1];
}

void BondingSystem::check_pair(std::size_t i, std::size_t j) const {
  if (i < 1 || j > dims_.size() || i > j) throw Error(ErrorCode::ShapeMismatch, "invalid level pair " + pair_str(i, j));
}

void BondingSystem::set_explicit(std::size_t i, std::size_t j, Matrix m) {
  check_pair(i, j);
  const bool ok = variance_ == Variance::Projective ? (m.rows() == dim(i) && m.cols() == dim(j))
                                                    : (m.rows() == dim(j) && m.cols() == dim(i));
  if (!ok) throw Error(ErrorCode::ShapeMismatch, "explicit map " + pair_str(i, j) + " has wrong shape");
  explicit_[{i, j}] = std::move(m);
}

Matrix BondingSystem::map(std::size_t i, std::size_t j) const {
  check_pair(i, j);
  if (auto it = explicit_.find({i, j}); it != explicit_.end()) return it->second;
  Matrix m = Matrix::Identity(dim(i), dim(i));
  for (std::size_t k = i; k < j; ++k) {
    const Matrix& c = consecutive_[k - 1];
    m = variance_ == Variance::Projective ? Matrix(m * c) : Matrix(c * m);
  }
  return m;
}

Matrix BondingSystem::projection(std::size_t i, std::size_t j) const {
  check_pair(i, j);
  if (variance_ != Variance::Direct) throw Error(ErrorCode::ShapeMismatch, "projections belong to direct towers");
  Matrix m = Matrix::Identity(dim(i), dim(i));
  for (std::size_t k = i; k < j; ++k) m = m * projections_[k - 1];
  return m;
}

Report validate_bonding(const BondingSystem& b, const Tolerance& tol) {
  tol.validate();
  Report r;
  r.title = to_string(b.variance()) + " bonding system, " + std::to_string(b.levels()) + " levels";
  const std::size_t n = b.levels();
  for (std::size_t k = 1; k < n; ++k) {
    const Matrix m = b.map(k, k + 1);
    const Index rank = numerical_rank(m, tol);
    const bool ok = rank == b.dim(k);
    r.flag(std::string(b.variance() == Variance::Projective ? "surjective " : "injective ") + pair_str(k, k + 1), ok,
           static_cast<double>(b.dim(k) - rank), 0.0);
  }
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j)
      for (std::size_t k = j + 1; k <= n; ++k) {
        const Matrix ik = b.map(i, k);
        const Matrix composed =
            b.variance() == Variance::Projective ? Matrix(b.map(i, j) * b.map(j, k)) : Matrix(b.map(j, k) * b.map(i, j));
        r.check("composition " + pair_str(i, j) + pair_str(j, k), frobenius(ik - composed), tol.bound(frobenius(ik)));
      }
  if (b.variance() == Variance::Direct) {
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) {
        const Matrix pi = b.projection(i, j) * b.map(i, j);
        r.check("P iota = Id " + pair_str(i, j), frobenius(pi - Matrix::Identity(b.dim(i), b.dim(i))),
                tol.bound(std::sqrt(static_cast<double>(b.dim(i)))));
      }
  }
  return r;
}

double coherence_residual(const CoherentSequence& seq, std::size_t i, std::size_t j) {
  const Matrix l = seq.bonding.map(i, j);
  const Matrix& ai = seq.levels[i - 1];
  const Matrix& aj = seq.levels[j - 1];
  const bool proj = seq.bonding.variance() == Variance::Projective;
  if (seq.kind == TensorKind::Endomorphism)
    return proj ? frobenius(ai * l - l * aj) : frobenius(l * ai - aj * l);
  return proj ? frobenius(aj - l.transpose() * ai * l) : frobenius(ai - l.transpose() * aj * l);
}

Report check_coherent(const CoherentSequence& seq, const Tolerance& tol) {
  tol.validate();
  const auto& b = seq.bonding;
  if (seq.levels.size() != b.levels())
    throw Error(ErrorCode::ShapeMismatch, "sequence has a different number of levels than its bonding system");
  for (std::size_t n = 1; n <= b.levels(); ++n) {
    const Matrix& m = seq.levels[n - 1];
    if (m.rows() != b.dim(n) || m.cols() != b.dim(n))
      throw Error(ErrorCode::ShapeMismatch, "level " + std::to_string(n) + " has the wrong size");
  }
  Report r;
  r.title = to_string(b.variance()) + " " + to_string(seq.kind) + " sequence, " + std::to_string(b.levels()) +
            " levels";
  if (b.levels() == 1) r.flag("single level (vacuous)", true);
  for (std::size_t i = 1; i <= b.levels(); ++i)
    for (std::size_t j = i + 1; j <= b.levels(); ++j) {
      const Matrix l = b.map(i, j);
      const double scale = std::max(frobenius(seq.levels[i - 1]), frobenius(seq.levels[j - 1])) *
                           std::max(1.0, frobenius(l) * frobenius(l));
      r.check("coherence " + pair_str(i, j), coherence_residual(seq, i, j), tol.bound(scale), pair_str(i, j));
    }
  return r;
}

namespace {

void require_coherent(const CoherentSequence& seq, std::size_t level, const Tolerance& tol) {
  const Report r = check_coherent(seq, tol);
  if (!r.passed()) {
    const CheckEntry* w = r.worst();
    throw Error(ErrorCode::IncoherentSequence, "sequence fails " + (w ? w->name : std::string("coherence")));
  }
  if (level < 1 || level > seq.levels.size()) throw Error(ErrorCode::ShapeMismatch, "level out of range");
}

}  // namespace

Vector limit_apply(const CoherentSequence& seq, std::size_t level, const Vector& u, const Tolerance& tol) {
  if (seq.kind != TensorKind::Endomorphism) throw Error(ErrorCode::UnsupportedKind, "limit_apply needs a (1,1) sequence");
  require_coherent(seq, level, tol);
  const Matrix& a = seq.levels[level - 1];
  if (u.size() != a.cols()) throw Error(ErrorCode::ShapeMismatch, "input vector has wrong length");
  return a * u;
}

double limit_form(const CoherentSequence& seq, std::size_t level, const Vector& u, const Vector& v,
                  const Tolerance& tol) {
  if (seq.kind != TensorKind::Form) throw Error(ErrorCode::UnsupportedKind, "limit_form needs a (2,0) sequence");
  require_coherent(seq, level, tol);
  const Matrix& s = seq.levels[level - 1];
  if (u.size() != s.rows() || v.size() != s.cols()) throw Error(ErrorCode::ShapeMismatch, "input vectors have wrong length");
  return u.dot(s * v);
}

LevelTuple LevelTuple::identity(const BondingSystem& b, std::size_t n) {
  LevelTuple t;
  for (std::size_t k = 1; k <= n; ++k) t.entries.push_back(Matrix::Identity(b.dim(k), b.dim(k)));
  return t;
}

double tuple_constraint_residual(const LevelTuple& t, const BondingSystem& b) {
  const std::size_t n = t.level();
  if (n > b.levels()) throw Error(ErrorCode::ShapeMismatch, "tuple is longer than the tower");
  double worst = 0.0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      const Matrix l = b.map(i, j);
      const Matrix& fi = t.entries[i - 1];
      const Matrix& fj = t.entries[j - 1];
      const double res = b.variance() == Variance::Projective ? frobenius(fi * l - l * fj) : frobenius(l * fi - fj * l);
      worst = std::max(worst, res);
    }
  return worst;
}

LevelTuple compose(const LevelTuple& a, const LevelTuple& b) {
  if (a.level() != b.level()) throw Error(ErrorCode::DimensionMismatch, "tuples of different levels");
  LevelTuple out;
  for (std::size_t k = 0; k < a.level(); ++k) {
    if (a.entries[k].cols() != b.entries[k].rows())
      throw Error(ErrorCode::DimensionMismatch, "tuple entries at level " + std::to_string(k + 1) + " differ in size");
    out.entries.push_back(a.entries[k] * b.entries[k]);
  }
  return out;
}

LevelTuple inverse(const LevelTuple& a, const Tolerance& tol) {
  LevelTuple out;
  for (std::size_t k = 0; k < a.level(); ++k) {
    const Matrix& f = a.entries[k];
    if (f.rows() != f.cols() || numerical_rank(f, tol) < f.rows())
      throw Error(ErrorCode::NotInvertible, "entry at level " + std::to_string(k + 1) + " is not invertible");
    out.entries.push_back(f.fullPivLu().inverse());
  }
  return out;
}

LevelTuple truncate(const LevelTuple& a, std::size_t i) {
  if (i > a.level()) throw Error(ErrorCode::ShapeMismatch, "cannot truncate above the tuple level");
  LevelTuple out;
  out.entries.assign(a.entries.begin(), a.entries.begin() + static_cast<std::ptrdiff_t>(i));
  return out;
}

LevelGroupOps level_group_ops(const LevelTuple& a, const LevelTuple& b, const BondingSystem& bonding,
                              const Tolerance& tol) {
  tol.validate();
  LevelGroupOps out;
  out.product = compose(a, b);
  Report& r = out.report;
  r.title = "level group, n = " + std::to_string(a.level());
  auto scale = [](const LevelTuple& t) {
    double s = 1.0;
    for (const auto& m : t.entries) s = std::max(s, frobenius(m));
    return s;
  };
  r.check("a satisfies the intertwining constraint", tuple_constraint_residual(a, bonding), tol.bound(scale(a)));
  r.check("b satisfies the intertwining constraint", tuple_constraint_residual(b, bonding), tol.bound(scale(b)));
  r.check("a b satisfies the intertwining constraint", tuple_constraint_residual(out.product, bonding),
          tol.bound(scale(a) * scale(b)));
  for (auto [t, slot, name] : {std::tuple{&a, &out.inverse_a, "a"}, std::tuple{&b, &out.inverse_b, "b"}}) {
    try {
      *slot = inverse(*t, tol);
      r.flag(std::string(name) + " invertible (in H0)", true);
      r.check(std::string(name) + "^-1 satisfies the intertwining constraint",
              tuple_constraint_residual(**slot, bonding), tol.bound(scale(**slot)));
    } catch (const Error& e) {
      r.flag(std::string(name) + " invertible (in H0)", false, 0.0, 0.0, e.what());
    }
  }
  return out;
}

GEnMembership gEn_membership(const Matrix& a, const BondingSystem& b, std::size_t level, const Tolerance& tol) {
  tol.validate();
  if (b.variance() != Variance::Direct) throw Error(ErrorCode::ShapeMismatch, "G(E_n) lives on a direct tower");
  const Index d = b.dim(level);
  if (a.rows() != d || a.cols() != d) throw Error(ErrorCode::ShapeMismatch, "operator has the wrong size for its level");
  if (numerical_rank(a, tol) < d) throw Error(ErrorCode::Singular, "operator is not invertible");
  GEnMembership out;
  for (std::size_t k = 1; k < level; ++k) {
    const Matrix iota = b.map(k, level);
    const Matrix inside = iota * b.projection(k, level);
    out.residual = std::max(out.residual, frobenius(a * iota - inside * a * iota));
  }
  out.member = out.residual <= tol.bound(frobenius(a));
  // Basis adapted to the flag: E_1, then a complement of E_{k-1} inside E_k pushed to level n.
  std::vector<Index> sizes;
  Matrix w(d, 0);
  for (std::size_t k = 1; k <= level; ++k) {
    Matrix piece;
    if (k == 1) {
      piece = b.map(1, level);
    } else {
      const Matrix comp = kernel_and_image(b.projection(k - 1, k), tol).kernel;
      piece = b.map(k, level) * comp;
    }
    Matrix grown(d, w.cols() + piece.cols());
    grown << w, piece;
    w = grown;
    sizes.push_back(piece.cols());
  }
  out.adapted_basis = w;
  out.adapted = w.fullPivLu().solve(a * w);
  if (!out.member) return out;
  out.blocks.assign(level, std::vector<Matrix>(level));
  Index row = 0;
  for (std::size_t p = 0; p < level; ++p) {
    Index col = 0;
    for (std::size_t q = 0; q < level; ++q) {
      if (q >= p) out.blocks[p][q] = out.adapted.block(row, col, sizes[p], sizes[q]);
      col += sizes[q];
    }
    row += sizes[p];
  }
  return out;
}

Matrix theta_projection(const Matrix& a, std::size_t j, std::size_t i, const BondingSystem& b, const Tolerance& tol) {
  if (i > j) throw Error(ErrorCode::ShapeMismatch, "theta projects to a lower level");
  const GEnMembership m = gEn_membership(a, b, j, tol);
  if (!m.member) {
    std::ostringstream os;
    os << "operator at level " << j << " does not preserve the flag (residual " << m.residual << ")";
    throw Error(ErrorCode::NotMember, os.str());
  }
  if (i == j) return a;
  return b.projection(i, j) * a * b.map(i, j);
}

Matrix LevelConnectionForm::operator()(const Vector& x, const Vector& v) const {
  if (v.size() != static_cast<Index>(coefficients.size()))
    throw Error(ErrorCode::ShapeMismatch, "tangent vector length differs from the number of form directions");
  Matrix out;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const auto& c = coefficients[k];
    if (c.empty() || static_cast<Index>(c.size()) > x.size() + 1)
      throw Error(ErrorCode::ShapeMismatch, "form coefficient list has the wrong length");
    Matrix term = c[0];
    for (std::size_t l = 1; l < c.size(); ++l) term += x(static_cast<Index>(l - 1)) * c[l];
    if (k == 0)
      out = v(0) * term;
    else
      out += v(static_cast<Index>(k)) * term;
  }
  return out;
}

AlgebraMorphism ConnectionFormSequence::morphism(std::size_t i, std::size_t j) const {
  const Index di = bonding.dim(i);
  AlgebraMorphism m{Matrix::Identity(di, di), Matrix::Identity(di, di)};
  auto consecutive = [&](std::size_t k) {
    if (!consecutive_morphisms.empty()) return consecutive_morphisms[k - 1];
    const Matrix l = bonding.map(k, k + 1);
    if (bonding.variance() == Variance::Projective)
      return AlgebraMorphism{l, l.completeOrthogonalDecomposition().pseudoInverse()};
    return AlgebraMorphism{l, bonding.projection(k, k + 1)};
  };
  for (std::size_t k = i; k < j; ++k) {
    const AlgebraMorphism c = consecutive(k);
    if (bonding.variance() == Variance::Projective)
      m = {m.left * c.left, c.right * m.right};
    else
      m = {c.left * m.left, m.right * c.right};
  }
  return m;
}

Report check_connection_coherence(const ConnectionFormSequence& seq, const std::vector<Vector>& samples,
                                  const Tolerance& tol) {
  tol.validate();
  const auto& b = seq.bonding;
  const std::size_t n = b.levels();
  if (seq.forms.size() != n) throw Error(ErrorCode::ShapeMismatch, "need one connection form per level");
  if (!seq.model_tensors.empty() && seq.model_tensors.size() != n)
    throw Error(ErrorCode::ShapeMismatch, "need one model tensor per level");
  if (!seq.consecutive_morphisms.empty() && seq.consecutive_morphisms.size() + 1 != n)
    throw Error(ErrorCode::ShapeMismatch, "need one algebra morphism per consecutive pair");
  for (const auto& x : samples)
    if (x.size() != b.dim(n)) throw Error(ErrorCode::ShapeMismatch, "samples must be points of the top level");
  const bool proj = b.variance() == Variance::Projective;
  // Sample x seen at level k.
  auto at_level = [&](const Vector& x, std::size_t k) -> Vector {
    if (k == n) return x;
    return proj ? Vector(b.map(k, n) * x) : Vector(b.projection(k, n) * x);
  };
  Report r;
  r.title = to_string(b.variance()) + " connection tower, " + std::to_string(n) + " levels, " +
            std::to_string(samples.size()) + " samples";
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      const Matrix l = b.map(i, j);
      const AlgebraMorphism gam = seq.morphism(i, j);
      double worst = 0.0, scale = 0.0;
      for (const auto& xs : samples) {
        if (proj) {
          const Vector x = at_level(xs, j);
          for (Index k = 0; k < b.dim(j); ++k) {
            const Vector v = Vector::Unit(b.dim(j), k);
            const Matrix rhs = gam(seq.forms[j - 1](x, v));
            const Matrix lhs = seq.forms[i - 1](l * x, l * v);
            worst = std::max(worst, frobenius(lhs - rhs));
            scale = std::max(scale, frobenius(rhs));
          }
        } else {
          const Vector x = at_level(xs, i);
          for (Index k = 0; k < b.dim(i); ++k) {
            const Vector v = Vector::Unit(b.dim(i), k);
            const Matrix rhs = gam(seq.forms[i - 1](x, v));
            const Matrix lhs = seq.forms[j - 1](l * x, l * v);
            worst = std::max(worst, frobenius(lhs - rhs));
            scale = std::max(scale, frobenius(rhs));
          }
        }
      }
      r.check("connection coherence " + pair_str(i, j), worst, tol.bound(scale), pair_str(i, j));
    }
  for (std::size_t k = 1; k <= n && !seq.model_tensors.empty(); ++k) {
    const StructureMatrix& t = seq.model_tensors[k - 1];
    if (t.m.rows() != b.dim(k)) throw Error(ErrorCode::ShapeMismatch, "model tensor has the wrong size");
    double worst = 0.0, scale = 0.0;
    for (const auto& xs : samples) {
      const Vector x = at_level(xs, k);
      for (Index d = 0; d < b.dim(k); ++d) {
        const Matrix a = seq.forms[k - 1](x, Vector::Unit(b.dim(k), d));
        // Derivative at the identity of the tensor action along a.
        const Matrix lin = t.kind() == TensorKind::Endomorphism ? Matrix(a * t.m - t.m * a)
                                                                : Matrix(-a.transpose() * t.m - t.m * a);
        worst = std::max(worst, frobenius(lin));
        scale = std::max(scale, frobenius(a) * frobenius(t.m));
      }
    }
    r.check("adapted at level " + std::to_string(k), worst, tol.bound(scale), "level " + std::to_string(k));
  }
  return r;
}

}  // namespace gstruct
