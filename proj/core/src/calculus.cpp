#include "gstruct/calculus.hpp"

#include <algorithm>
#include <cmath>
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

void require_point(const Vector& x, Index dim) {
  if (x.size() != dim) throw Error(ErrorCode::ShapeMismatch, "point has wrong dimension");
}

template <class F>
auto central(const F& f, const Vector& x, Index i, double h) {
  Vector xp = x, xm = x;
  xp(i) += h;
  xm(i) -= h;
  return ((f(xp) - f(xm)) / (2.0 * h)).eval();
}

template <class F>
auto second_central(const F& f, const Vector& x, Index i, Index j, double s) {
  if (i == j) {
    Vector xp = x, xm = x;
    xp(i) += s;
    xm(i) -= s;
    return ((f(xp) - 2.0 * f(x) + f(xm)) / (s * s)).eval();
  }
  auto shifted = [&](double a, double b) {
    Vector y = x;
    y(i) += a;
    y(j) += b;
    return f(y);
  };
  return ((shifted(s, s) - shifted(s, -s) - shifted(-s, s) + shifted(-s, -s)) / (4.0 * s * s)).eval();
}

void check_fd(const FiniteDifference& fd) {
  if (!(fd.step > 0.0) || !(fd.second_step > 0.0) || !std::isfinite(fd.step) || !std::isfinite(fd.second_step))
    throw Error(ErrorCode::InvalidTolerance, "finite-difference steps must be positive");
}

}  // namespace

std::string to_string(DerivativeMode mode) {
  return mode == DerivativeMode::Polynomial ? "polynomial" : "finite_difference";
}

std::string to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::Tangent: return "tangent";
    case StructureKind::ParaComplex: return "para_complex";
    case StructureKind::Complex: return "complex";
  }
  return "unknown";
}

VectorField VectorField::polynomial(std::vector<Polynomial> components) {
  const Index n = static_cast<Index>(components.size());
  for (const auto& p : components)
    if (p.vars() != n) throw Error(ErrorCode::ShapeMismatch, "vector field components must use dim variables");
  VectorField f;
  f.mode_ = DerivativeMode::Polynomial;
  f.dim_ = n;
  const PolyMatrix d = gstruct::jacobian(components);
  std::vector<PolyMatrix> dd;
  for (Index l = 0; l < n; ++l) dd.push_back(d.derivative(l));
  f.poly_ = components;
  f.value_ = [components, n](const Vector& x) {
    require_point(x, n);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = components[static_cast<std::size_t>(i)](x);
    return v;
  };
  f.jacobian_ = [d, n](const Vector& x) {
    require_point(x, n);
    return d.eval(x);
  };
  f.jacobian_partial_ = [dd, n](const Vector& x, Index l) {
    require_point(x, n);
    return dd[static_cast<std::size_t>(l)].eval(x);
  };
  return f;
}

VectorField VectorField::sampled(Index dim, Evaluator eval, FiniteDifference fd) {
  check_fd(fd);
  VectorField f;
  f.mode_ = DerivativeMode::FiniteDifference;
  f.dim_ = dim;
  f.fd_ = fd;
  auto checked = [eval, dim](const Vector& x) {
    require_point(x, dim);
    Vector v = eval(x);
    if (v.size() != dim) throw Error(ErrorCode::ShapeMismatch, "vector field evaluator returned wrong size");
    return v;
  };
  f.value_ = checked;
  f.jacobian_ = [checked, dim, fd](const Vector& x) {
    Matrix j(dim, dim);
    for (Index c = 0; c < dim; ++c) j.col(c) = central(checked, x, c, fd.step);
    return j;
  };
  f.jacobian_partial_ = [checked, dim, fd](const Vector& x, Index l) {
    Matrix j(dim, dim);
    for (Index c = 0; c < dim; ++c) j.col(c) = second_central(checked, x, l, c, fd.second_step);
    return j;
  };
  f.refit_ = [dim, eval](FiniteDifference other) { return sampled(dim, eval, other); };
  return f;
}

VectorField VectorField::constant(const Vector& v, DerivativeMode mode, FiniteDifference fd) {
  const Index n = v.size();
  if (mode == DerivativeMode::Polynomial) {
    std::vector<Polynomial> comps;
    for (Index i = 0; i < n; ++i) comps.push_back(Polynomial::constant(n, v(i)));
    return polynomial(comps);
  }
  return sampled(n, [v](const Vector&) { return v; }, fd);
}

VectorField VectorField::with_fd(FiniteDifference fd) const {
  if (mode_ == DerivativeMode::Polynomial || !refit_) return *this;
  return refit_(fd);
}

TensorFieldOnChart TensorFieldOnChart::polynomial(PolyMatrix m, Role role) {
  if (m.rows() != m.cols() || m.vars() != m.rows())
    throw Error(ErrorCode::ShapeMismatch, "tensor field must be square with dim variables");
  TensorFieldOnChart t;
  t.mode_ = DerivativeMode::Polynomial;
  t.dim_ = m.rows();
  t.role_ = role;
  std::vector<PolyMatrix> d1;
  for (Index i = 0; i < t.dim_; ++i) d1.push_back(m.derivative(i));
  t.poly_d1_ = std::move(d1);
  t.poly_ = std::move(m);
  return t;
}

TensorFieldOnChart TensorFieldOnChart::sampled(Index dim, Evaluator f, Role role, FiniteDifference fd) {
  check_fd(fd);
  TensorFieldOnChart t;
  t.mode_ = DerivativeMode::FiniteDifference;
  t.dim_ = dim;
  t.role_ = role;
  t.fd_ = fd;
  t.eval_ = std::move(f);
  return t;
}

TensorFieldOnChart TensorFieldOnChart::constant(const Matrix& m, Role role, DerivativeMode mode, FiniteDifference fd) {
  require_square(m, "constant tensor field");
  if (mode == DerivativeMode::Polynomial) return polynomial(PolyMatrix::constant(m, m.rows()), role);
  return sampled(m.rows(), [m](const Vector&) { return m; }, role, fd);
}

Matrix TensorFieldOnChart::value(const Vector& x) const {
  require_point(x, dim_);
  if (poly_) return poly_->eval(x);
  Matrix v = eval_(x);
  if (v.rows() != dim_ || v.cols() != dim_) throw Error(ErrorCode::ShapeMismatch, "tensor evaluator returned wrong size");
  return v;
}

Matrix TensorFieldOnChart::partial(const Vector& x, Index i) const {
  require_point(x, dim_);
  if (poly_) return (*poly_d1_)[static_cast<std::size_t>(i)].eval(x);
  return central([this](const Vector& y) { return value(y); }, x, i, fd_.step);
}

Matrix TensorFieldOnChart::second_partial(const Vector& x, Index i, Index j) const {
  require_point(x, dim_);
  if (poly_) return (*poly_d1_)[static_cast<std::size_t>(i)].derivative(j).eval(x);
  return second_central([this](const Vector& y) { return value(y); }, x, i, j, fd_.second_step);
}

TensorFieldOnChart TensorFieldOnChart::with_fd(FiniteDifference fd) const {
  if (mode_ == DerivativeMode::Polynomial) return *this;
  check_fd(fd);
  TensorFieldOnChart t = *this;
  t.fd_ = fd;
  return t;
}

TensorFieldOnChart sphere_stereographic(Index dim, FiniteDifference fd) {
  return TensorFieldOnChart::sampled(
      dim,
      [dim](const Vector& x) {
        const double c = 2.0 / (1.0 + x.squaredNorm());
        return Matrix(c * c * Matrix::Identity(dim, dim));
      },
      Role::SymmetricForm, fd);
}

TensorFieldOnChart pullback_metric(const std::vector<Polynomial>& phi, const Matrix& g0, DerivativeMode mode,
                                   FiniteDifference fd) {
  const Index n = static_cast<Index>(phi.size());
  if (g0.rows() != n || g0.cols() != n) throw Error(ErrorCode::ShapeMismatch, "base metric size differs from map");
  const PolyMatrix d = jacobian(phi);
  if (mode == DerivativeMode::Polynomial)
    return TensorFieldOnChart::polynomial(d.transpose() * PolyMatrix::constant(g0, n) * d, Role::SymmetricForm);
  return TensorFieldOnChart::sampled(
      n,
      [d, g0](const Vector& x) {
        const Matrix j = d.eval(x);
        return Matrix(j.transpose() * g0 * j);
      },
      Role::SymmetricForm, fd);
}

TensorFieldOnChart pullback_endomorphism(const std::vector<Polynomial>& phi, const Matrix& t0, FiniteDifference fd) {
  const Index n = static_cast<Index>(phi.size());
  if (t0.rows() != n || t0.cols() != n) throw Error(ErrorCode::ShapeMismatch, "base tensor size differs from map");
  const PolyMatrix d = jacobian(phi);
  return TensorFieldOnChart::sampled(
      n,
      [d, t0](const Vector& x) {
        const Matrix j = d.eval(x);
        return Matrix(j.fullPivLu().solve(t0 * j));
      },
      Role::Endomorphism, fd);
}

std::vector<Vector> Grid::points() const {
  const Index n = lower.size();
  if (upper.size() != n || static_cast<Index>(counts.size()) != n)
    throw Error(ErrorCode::ShapeMismatch, "grid bounds and counts differ in length");
  for (int c : counts)
    if (c < 1) throw Error(ErrorCode::ShapeMismatch, "grid counts must be positive");
  std::vector<Vector> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Vector p(n);
    for (Index i = 0; i < n; ++i) {
      const int c = counts[static_cast<std::size_t>(i)];
      p(i) = c == 1 ? 0.5 * (lower(i) + upper(i))
                    : lower(i) + (upper(i) - lower(i)) * idx[static_cast<std::size_t>(i)] / double(c - 1);
    }
    out.push_back(p);
    Index k = n - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == counts[static_cast<std::size_t>(k)]) {
      idx[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

Grid Grid::uniform(Index dim, double lo, double hi, int count) {
  return {Vector::Constant(dim, lo), Vector::Constant(dim, hi), std::vector<int>(static_cast<std::size_t>(dim), count)};
}

Vector bracket_at(const Vector& u, const Matrix& du, const Vector& v, const Matrix& dv) { return dv * u - du * v; }

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  if (x.mode() != y.mode()) throw Error(ErrorCode::ModeMismatch, "bracket of fields in different derivative modes");
  if (x.dim() != y.dim()) throw Error(ErrorCode::ShapeMismatch, "bracket of fields of different dimensions");
  const Index n = x.dim();
  if (x.mode() == DerivativeMode::Polynomial) {
    const auto& px = *x.polynomials();
    const auto& py = *y.polynomials();
    std::vector<Polynomial> z(static_cast<std::size_t>(n), Polynomial(n));
    for (std::size_t k = 0; k < z.size(); ++k)
      for (std::size_t j = 0; j < z.size(); ++j) {
        z[k] += py[k].derivative(static_cast<Index>(j)) * px[j];
        z[k] -= px[k].derivative(static_cast<Index>(j)) * py[j];
      }
    return VectorField::polynomial(std::move(z));
  }
  VectorField f;
  f.mode_ = DerivativeMode::FiniteDifference;
  f.dim_ = n;
  f.fd_ = x.fd();
  f.value_ = [x, y](const Vector& p) { return bracket_at(x.value(p), x.jacobian(p), y.value(p), y.jacobian(p)); };
  // Product rule on DY X - DX Y using the fields' own second derivatives.
  f.jacobian_ = [x, y, n](const Vector& p) {
    const Vector xv = x.value(p), yv = y.value(p);
    const Matrix dx = x.jacobian(p), dy = y.jacobian(p);
    Matrix j(n, n);
    for (Index l = 0; l < n; ++l)
      j.col(l) = y.jacobian_partial(p, l) * xv + dy * dx.col(l) - x.jacobian_partial(p, l) * yv - dx * dy.col(l);
    return j;
  };
  const auto jac = f.jacobian_;
  const double s = x.fd().second_step;
  f.jacobian_partial_ = [jac, s](const Vector& p, Index l) { return central(jac, p, l, s); };
  f.refit_ = [x, y](FiniteDifference other) { return lie_bracket(x.with_fd(other), y.with_fd(other)); };
  return f;
}

Vector nijenhuis(const TensorFieldOnChart& a, const VectorField& x, const VectorField& y, const Vector& at) {
  if (a.kind() != TensorKind::Endomorphism) throw Error(ErrorCode::UnsupportedKind, "Nijenhuis tensor needs a (1,1) field");
  if (a.mode() != x.mode() || a.mode() != y.mode())
    throw Error(ErrorCode::ModeMismatch, "Nijenhuis inputs use different derivative modes");
  const Index n = a.dim();
  if (x.dim() != n || y.dim() != n) throw Error(ErrorCode::ShapeMismatch, "field dimensions differ");
  const Matrix av = a.value(at);
  std::vector<Matrix> da;
  for (Index l = 0; l < n; ++l) da.push_back(a.partial(at, l));
  const Vector xv = x.value(at), yv = y.value(at);
  const Matrix dx = x.jacobian(at), dy = y.jacobian(at);
  // Value and Jacobian of the composite field A X.
  auto applied = [&](const Vector& v, const Matrix& dv) {
    Matrix d(n, n);
    for (Index l = 0; l < n; ++l) d.col(l) = da[static_cast<std::size_t>(l)] * v + av * dv.col(l);
    return std::make_pair(Vector(av * v), d);
  };
  const auto [ax, dax] = applied(xv, dx);
  const auto [ay, day] = applied(yv, dy);
  return bracket_at(ax, dax, ay, day) - av * bracket_at(ax, dax, yv, dy) - av * bracket_at(xv, dx, ay, day) +
         av * av * bracket_at(xv, dx, yv, dy);
}

namespace {

void validate_at(const Matrix& j, StructureKind kind, const Vector& x, const Tolerance& tol) {
  const Index n = j.rows();
  const Matrix id = Matrix::Identity(n, n);
  const double f = frobenius(j);
  const double bound = tol.bound(std::max(f * f, 1.0));
  bool ok = true;
  std::string why;
  switch (kind) {
    case StructureKind::Tangent:
      ok = frobenius(j * j) <= bound && 2 * numerical_rank(j, tol) == n;
      why = "J^2 = 0 with rank dim/2";
      break;
    case StructureKind::ParaComplex:
      ok = frobenius(j * j - id) <= bound && std::abs(j.trace()) <= tol.bound(f);
      why = "J^2 = Id with trace 0";
      break;
    case StructureKind::Complex:
      ok = frobenius(j * j + id) <= bound;
      why = "J^2 = -Id";
      break;
  }
  if (!ok) throw Error(ErrorCode::InvalidStructureAtPoint, why + " fails at " + point_str(x));
}

// Max over coordinate pairs of ||N(d_i, d_j)||, and the N values themselves.
std::pair<double, std::vector<Vector>> coordinate_nijenhuis(const TensorFieldOnChart& a, const Vector& x) {
  const Index n = a.dim();
  std::vector<Vector> vals;
  double worst = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const VectorField ei = VectorField::constant(Vector::Unit(n, i), a.mode(), a.fd());
      const VectorField ej = VectorField::constant(Vector::Unit(n, j), a.mode(), a.fd());
      vals.push_back(nijenhuis(a, ei, ej, x));
      worst = std::max(worst, vals.back().norm());
    }
  return {worst, vals};
}

}  // namespace

Verdict is_integrable_structure(const TensorFieldOnChart& field, StructureKind kind, const Grid& grid,
                                const Tolerance& tol) {
  tol.validate();
  if (field.kind() != TensorKind::Endomorphism)
    throw Error(ErrorCode::UnsupportedKind, "integrability of a structure needs a (1,1) field");
  const bool fd = field.mode() == DerivativeMode::FiniteDifference;
  const TensorFieldOnChart coarse = field.with_fd(field.fd().scaled(2.0));
  Verdict v;
  v.holds = true;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (const Vector& x : grid.points()) {
    const Matrix j = field.value(x);
    validate_at(j, kind, x, tol);
    const auto [res, vals] = coordinate_nijenhuis(field, x);
    double est = 0.0;
    if (fd) {
      const auto [res2, vals2] = coordinate_nijenhuis(coarse, x);
      for (std::size_t k = 0; k < vals.size(); ++k) est = std::max(est, (vals[k] - vals2[k]).norm() / 3.0);
    }
    const double f = frobenius(j);
    const double thr = tol.bound(std::max(f * f, 1.0)) + 2.0 * est;
    if (res > thr) v.holds = false;
    if (res - thr > worst_excess || v.worst_point.size() == 0) {
      worst_excess = res - thr;
      v.threshold = thr;
      v.discretization_estimate = est;
      v.worst_point = x;
    }
    v.max_residual = std::max(v.max_residual, res);
  }
  if (kind == StructureKind::Complex)
    v.label = v.holds ? "formally integrable" : "not formally integrable";
  else
    v.label = v.holds ? "integrable" : "not integrable";
  return v;
}

Matrix Christoffel::slice(Index i) const {
  Matrix s(n, n);
  for (Index k = 0; k < n; ++k)
    for (Index m = 0; m < n; ++m) s(k, m) = (*this)(k, i, m);
  return s;
}

double Christoffel::norm() const {
  double s = 0.0;
  for (double d : data) s += d * d;
  return std::sqrt(s);
}

double Riemann::norm() const {
  double s = 0.0;
  for (double d : data) s += d * d;
  return std::sqrt(s);
}

ConnectionData levi_civita(const TensorFieldOnChart& g, const Tolerance& tol) {
  tol.validate();
  if (g.kind() != TensorKind::Form) throw Error(ErrorCode::UnsupportedKind, "Levi-Civita connection needs a (2,0) metric");
  const Index n = g.dim();
  struct Pointwise {
    Matrix gi;
    std::vector<Matrix> dg;
  };
  auto prepare = [g, n, tol](const Vector& x) {
    const Matrix gv = g.value(x);
    if (numerical_rank(gv, tol) < n)
      throw Error(ErrorCode::DegenerateMetricAtPoint, "metric is degenerate at " + point_str(x));
    Pointwise p;
    p.gi = gv.fullPivLu().inverse();
    for (Index i = 0; i < n; ++i) p.dg.push_back(g.partial(x, i));
    return p;
  };
  // Lowered symbols from the Koszul formula on coordinate fields: Gamma_{m,ij}.
  auto lowered = [n](const std::vector<Matrix>& dg, Index m, Index i, Index j) {
    return 0.5 * (dg[static_cast<std::size_t>(i)](j, m) + dg[static_cast<std::size_t>(j)](i, m) -
                  dg[static_cast<std::size_t>(m)](i, j));
  };
  ConnectionData c;
  c.n = n;
  c.gamma = [prepare, lowered, n](const Vector& x) {
    const Pointwise p = prepare(x);
    Christoffel gam(n);
    for (Index k = 0; k < n; ++k)
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
          double s = 0.0;
          for (Index m = 0; m < n; ++m) s += p.gi(k, m) * lowered(p.dg, m, i, j);
          gam(k, i, j) = s;
        }
    return gam;
  };
  c.gamma_partials = [prepare, lowered, g, n](const Vector& x) {
    const Pointwise p = prepare(x);
    // ddg[l][i] = d_l d_i g
    std::vector<std::vector<Matrix>> ddg(static_cast<std::size_t>(n), std::vector<Matrix>(static_cast<std::size_t>(n)));
    for (Index l = 0; l < n; ++l)
      for (Index i = l; i < n; ++i) {
        ddg[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] = g.second_partial(x, l, i);
        ddg[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] = ddg[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
      }
    std::vector<Christoffel> out;
    for (Index l = 0; l < n; ++l) {
      const Matrix dgi = -p.gi * p.dg[static_cast<std::size_t>(l)] * p.gi;
      const auto& dd = ddg[static_cast<std::size_t>(l)];
      Christoffel d(n);
      for (Index k = 0; k < n; ++k)
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Index m = 0; m < n; ++m)
              s += dgi(k, m) * lowered(p.dg, m, i, j) + p.gi(k, m) * lowered(dd, m, i, j);
            d(k, i, j) = s;
          }
      out.push_back(std::move(d));
    }
    return out;
  };
  return c;
}

ConnectionData connection_from(Index n, std::function<Christoffel(const Vector&)> gamma, FiniteDifference fd) {
  check_fd(fd);
  ConnectionData c;
  c.n = n;
  c.gamma = gamma;
  c.gamma_partials = [gamma, n, fd](const Vector& x) {
    std::vector<Christoffel> out;
    for (Index l = 0; l < n; ++l) {
      Vector xp = x, xm = x;
      xp(l) += fd.step;
      xm(l) -= fd.step;
      const Christoffel a = gamma(xp), b = gamma(xm);
      Christoffel d(n);
      for (std::size_t k = 0; k < d.data.size(); ++k) d.data[k] = (a.data[k] - b.data[k]) / (2.0 * fd.step);
      out.push_back(std::move(d));
    }
    return out;
  };
  return c;
}

Riemann curvature(const ConnectionData& conn, const Vector& at) {
  const Index n = conn.n;
  const Christoffel g = conn.gamma(at);
  const std::vector<Christoffel> dg = conn.gamma_partials(at);
  Riemann r(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < n; ++l) {
          double s = dg[static_cast<std::size_t>(k)](i, l, j) - dg[static_cast<std::size_t>(l)](i, k, j);
          for (Index m = 0; m < n; ++m) s += g(i, k, m) * g(m, l, j) - g(i, l, m) * g(m, k, j);
          r(i, j, k, l) = s;
        }
  return r;
}

double sectional_curvature(const Riemann& r, const Matrix& g) {
  double num = 0.0;
  for (Index i = 0; i < r.n; ++i) num += g(0, i) * r(i, 1, 0, 1);
  return num / (g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1));
}

Verdict is_metric_integrable(const TensorFieldOnChart& g, const Grid& grid, const Tolerance& tol) {
  tol.validate();
  const bool fd = g.mode() == DerivativeMode::FiniteDifference;
  const ConnectionData conn = levi_civita(g, tol);
  const ConnectionData coarse = levi_civita(g.with_fd(g.fd().scaled(2.0)), tol);
  Verdict v;
  v.holds = true;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (const Vector& x : grid.points()) {
    const Riemann r = curvature(conn, x);
    const double res = r.norm();
    double est = 0.0;
    if (fd) {
      const Riemann r2 = curvature(coarse, x);
      double s = 0.0;
      for (std::size_t k = 0; k < r.data.size(); ++k) s += (r.data[k] - r2.data[k]) * (r.data[k] - r2.data[k]);
      est = std::sqrt(s) / 3.0;
    }
    const double thr = tol.bound(1.0) + 2.0 * est;
    if (res > thr) v.holds = false;
    if (res - thr > worst_excess || v.worst_point.size() == 0) {
      worst_excess = res - thr;
      v.threshold = thr;
      v.discretization_estimate = est;
      v.worst_point = x;
    }
    v.max_residual = std::max(v.max_residual, res);
  }
  v.label = v.holds ? "flat (integrable)" : "curved (not integrable)";
  return v;
}

std::vector<Matrix> covariant_derivative(const ConnectionData& conn, const TensorFieldOnChart& field, const Vector& at) {
  const Index n = conn.n;
  if (field.dim() != n) throw Error(ErrorCode::ShapeMismatch, "field and connection dimensions differ");
  const Christoffel g = conn.gamma(at);
  const Matrix t = field.value(at);
  std::vector<Matrix> out;
  for (Index i = 0; i < n; ++i) {
    const Matrix gi = g.slice(i);
    const Matrix dt = field.partial(at, i);
    if (field.kind() == TensorKind::Endomorphism)
      out.push_back(dt + gi * t - t * gi);
    else
      out.push_back(dt - gi.transpose() * t - t * gi);
  }
  return out;
}

CovariantResidual covariant_derivative_of_structure(const ConnectionData& conn, const TensorFieldOnChart& field,
                                                    const Grid& grid) {
  CovariantResidual out;
  out.max_residual = -1.0;
  for (const Vector& x : grid.points()) {
    double s = 0.0;
    for (const Matrix& m : covariant_derivative(conn, field, x)) s = std::max(s, frobenius(m));
    if (s > out.max_residual) {
      out.max_residual = s;
      out.worst_point = x;
    }
  }
  return out;
}

Vector parallel_transport(const ConnectionData& conn, const std::vector<Vector>& vertices, const Vector& v, int steps) {
  Vector cur = v;
  auto rhs = [&](const Vector& p, const Vector& vel, const Vector& w) {
    const Christoffel g = conn.gamma(p);
    Matrix a = Matrix::Zero(conn.n, conn.n);
    for (Index i = 0; i < conn.n; ++i) a += vel(i) * g.slice(i);
    return Vector(-a * w);
  };
  for (std::size_t s = 0; s + 1 < vertices.size(); ++s) {
    const Vector& p0 = vertices[s];
    const Vector vel = vertices[s + 1] - p0;
    const double dt = 1.0 / steps;
    for (int k = 0; k < steps; ++k) {
      const double t = k * dt;
      const Vector k1 = rhs(p0 + t * vel, vel, cur);
      const Vector k2 = rhs(p0 + (t + 0.5 * dt) * vel, vel, cur + 0.5 * dt * k1);
      const Vector k3 = rhs(p0 + (t + 0.5 * dt) * vel, vel, cur + 0.5 * dt * k2);
      const Vector k4 = rhs(p0 + (t + dt) * vel, vel, cur + dt * k3);
      cur += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return cur;
}

}  // namespace gstruct
