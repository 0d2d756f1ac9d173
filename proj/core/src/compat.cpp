#include "gstruct/compat.hpp"

#include <cmath>
#include <sstream>

#include "gstruct/error.hpp"

namespace gstruct {

namespace {

double sq_scale(const Matrix& a, const Matrix& b) { return std::max(1.0, frobenius(a) * frobenius(b)); }

double sign_of(Flavor f) { return f == Flavor::Kahler ? 1.0 : -1.0; }

// Omega(T u, T v) = +-Omega(u, v) and g(T u, T v) = +-g(u, v), as T^T X T -+ X.
double invariance_residual(const Matrix& x, const Matrix& t, Flavor f) {
  return frobenius(t.transpose() * x * t - sign_of(f) * x);
}

void structure_entries(Report& r, const Matrix& t, Flavor f, const Tolerance& tol) {
  const Index n = t.rows();
  const Matrix id = Matrix::Identity(n, n);
  const double scale = sq_scale(t, t);
  if (f == Flavor::Kahler) {
    r.check("I^2 = -Id", frobenius(t * t + id), tol.bound(scale));
  } else {
    r.check("J^2 = Id", frobenius(t * t - id), tol.bound(scale));
    r.check("trace J = 0", std::abs(t.trace()), tol.bound(frobenius(t)));
  }
}

void metric_signature_entry(Report& r, const std::string& name, const Matrix& g, Flavor f, const Tolerance& tol) {
  const Signature s = signature(g, tol);
  const bool ok = f == Flavor::Kahler ? (s.positive == g.rows()) : s.neutral();
  std::ostringstream os;
  os << "signature (" << s.positive << "," << s.negative << "," << s.zero << ")";
  r.flag(name, ok, 0.0, 0.0, os.str());
}

void require_dims(const Matrix& a, const Matrix& b, const char* what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows()) throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimensions differ");
}

Report pair_omega_structure(const Matrix& s, const Matrix& t, Flavor f, const Tolerance& tol) {
  Report r;
  r.title = "(omega, structure)";
  structure_entries(r, t, f, tol);
  r.check("Omega skew", skew_residual(s), tol.bound(frobenius(s)));
  r.check(f == Flavor::Kahler ? "Omega(Iu,Iv) = Omega(u,v)" : "Omega(Ju,Jv) = -Omega(u,v)",
          invariance_residual(s, t, f), tol.bound(frobenius(s) * sq_scale(t, t)));
  const Matrix g = s * t;
  r.check("Omega(u,Tv) symmetric", symmetry_residual(g), tol.bound(frobenius(g)));
  metric_signature_entry(r, f == Flavor::Kahler ? "Omega(u,Iv) positive definite" : "Omega(u,Jv) neutral", g, f,
                         tol);
  return r;
}

Report pair_metric_structure(const Matrix& g, const Matrix& t, Flavor f, const Tolerance& tol) {
  Report r;
  r.title = "(g, structure)";
  structure_entries(r, t, f, tol);
  r.check("g symmetric", symmetry_residual(g), tol.bound(frobenius(g)));
  metric_signature_entry(r, f == Flavor::Kahler ? "g positive definite" : "g neutral", g, f, tol);
  r.check(f == Flavor::Kahler ? "g(Iu,Iv) = g(u,v)" : "g(Ju,Jv) = -g(u,v)", invariance_residual(g, t, f),
          tol.bound(frobenius(g) * sq_scale(t, t)));
  return r;
}

Report pair_metric_omega(const Matrix& g, const Matrix& s, Flavor f, const Tolerance& tol) {
  Report r;
  r.title = "(g, omega)";
  r.check("g symmetric", symmetry_residual(g), tol.bound(frobenius(g)));
  r.check("Omega skew", skew_residual(s), tol.bound(frobenius(s)));
  metric_signature_entry(r, f == Flavor::Kahler ? "g positive definite" : "g neutral", g, f, tol);
  Eigen::JacobiSVD<Matrix> svd(s);
  const Vector& sv = svd.singularValues();
  const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
  const double cut = tol.bound(sv.size() ? sv(0) : 0.0);
  r.flag("Omega nondegenerate (rank check)", smin > cut, std::max(0.0, cut - smin), 0.0);
  if (smin <= cut) return r;
  const Matrix a = g.fullPivLu().solve(Matrix(s.transpose()));
  structure_entries(r, a, f, tol);
  return r;
}

}  // namespace

std::string to_string(Flavor flavor) { return flavor == Flavor::Kahler ? "kahler" : "para_kahler"; }

Matrix omega_from(const Matrix& g, const Matrix& structure, Flavor flavor, const Tolerance& tol) {
  tol.validate();
  require_dims(g, structure, "omega_from");
  const Report pre = pair_metric_structure(g, structure, flavor, tol);
  if (!pre.passed()) throw Error(ErrorCode::IncompatibleInputs, "metric and structure are not compatible");
  Matrix s = structure.transpose() * g;
  return 0.5 * (s - s.transpose());
}

MetricFromForm g_from(const Matrix& omega, const Matrix& structure, Flavor flavor, const Tolerance& tol) {
  tol.validate();
  require_dims(omega, structure, "g_from");
  const Report pre = pair_omega_structure(omega, structure, flavor, tol);
  if (!pre.passed()) {
    const CheckEntry* w = pre.worst();
    throw Error(ErrorCode::IncompatibleInputs, "form and structure are not compatible: " + (w ? w->name : ""));
  }
  MetricFromForm out;
  const Matrix g = omega * structure;
  out.g = 0.5 * (g + g.transpose());
  out.signature = signature(out.g, tol);
  return out;
}

Matrix metric_sqrt(const Matrix& m, const Matrix& g, const Tolerance& tol) {
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "metric is not positive definite");
  // With G = L L^T the operator L^T M L^{-T} is symmetric; its root transported back is g-self-adjoint.
  const Matrix l = llt.matrixL();
  const Matrix lt = l.transpose();
  const Matrix lt_inv = lt.triangularView<Eigen::Upper>().solve(Matrix::Identity(g.rows(), g.rows()));
  const Matrix sym = lt * m * lt_inv;
  Matrix root;
  try {
    root = spd_sqrt(0.5 * (sym + sym.transpose()), tol);
  } catch (const Error& e) {
    throw Error(ErrorCode::NotPositive, e.what());
  }
  return lt_inv * root * lt;
}

PolarConstruction structure_from(const Matrix& g, const Matrix& omega, Flavor flavor, const Tolerance& tol) {
  tol.validate();
  require_dims(g, omega, "structure_from");
  if (symmetry_residual(g) > tol.bound(frobenius(g))) throw Error(ErrorCode::NotSymmetric, "metric is not symmetric");
  if (skew_residual(omega) > tol.bound(frobenius(omega)))
    throw Error(ErrorCode::InvalidStructure, "form is not skew-symmetric");
  const Index n = g.rows();
  const Signature sig = signature(g, tol);
  if (flavor == Flavor::Kahler && sig.positive != n)
    throw Error(ErrorCode::NotPositiveDefinite, "Kahler flavor needs a positive definite metric");
  if (flavor == Flavor::ParaKahler && !sig.neutral())
    throw Error(ErrorCode::IncompatibleInputs, "para-Kahler flavor needs a neutral metric");
  if (numerical_rank(omega, tol) < n) throw Error(ErrorCode::Degenerate, "form is degenerate");

  PolarConstruction out;
  out.a = g.fullPivLu().solve(Matrix(omega.transpose()));
  out.a_adjoint = metric_adjoint(out.a, g);
  const Matrix id = Matrix::Identity(n, n);
  if (flavor == Flavor::ParaKahler) {
    const double res = frobenius(out.a * out.a - id);
    if (res > tol.bound(sq_scale(out.a, out.a))) {
      std::ostringstream os;
      os << "||J^2 - Id|| = " << res;
      throw Error(ErrorCode::NotInvolutive, os.str());
    }
    out.r = id;
    out.structure = out.a;
    out.corrected_metric = g;
    return out;
  }
  out.r = metric_sqrt(out.a * out.a_adjoint, g, tol);
  out.structure = out.r.fullPivLu().solve(out.a);
  const Matrix gr = g * out.r;
  out.corrected_metric = 0.5 * (gr + gr.transpose());
  return out;
}

Report is_compatible(const PartialTriple& p, const Tolerance& tol) {
  tol.validate();
  Report r;
  r.title = "compatibility (" + to_string(p.flavor) + ")";
  Index n = -1;
  for (const auto* m : {&p.omega, &p.g, &p.structure}) {
    if (!*m) continue;
    if ((*m)->rows() != (*m)->cols() || (n >= 0 && (*m)->rows() != n)) {
      r.flag("matching square dimensions", false);
      return r;
    }
    n = (*m)->rows();
  }
  if (p.omega && p.structure) r.merge(pair_omega_structure(*p.omega, *p.structure, p.flavor, tol), "(omega, structure)");
  if (p.g && p.structure) r.merge(pair_metric_structure(*p.g, *p.structure, p.flavor, tol), "(g, structure)");
  if (p.g && p.omega) r.merge(pair_metric_omega(*p.g, *p.omega, p.flavor, tol), "(g, omega)");
  return r;
}

Report validate(const CompatibleTriple& t, const Tolerance& tol) {
  Report r = is_compatible(PartialTriple{t.flavor, t.omega, t.g, t.structure}, tol);
  r.title = "compatible triple (" + to_string(t.flavor) + ")";
  if (t.flavor == Flavor::ParaKahler && t.structure.rows() == t.g.rows() && t.omega.rows() == t.g.rows()) {
    // The two metric conventions differ by a sign; record which one links g and Omega here.
    const Matrix link = t.omega * t.structure;
    const double plus = frobenius(t.g - link);
    const double minus = frobenius(t.g + link);
    r.note(plus <= minus ? "g(u,v) = Omega(u,Jv)" : "g(u,v) = -Omega(u,Jv)");
  }
  return r;
}

Completion complete_triple(const PartialTriple& p, const Tolerance& tol) {
  tol.validate();
  const int given = int(p.omega.has_value()) + int(p.g.has_value()) + int(p.structure.has_value());
  if (given != 2) throw Error(ErrorCode::IncompatibleInputs, "exactly two of omega, g, structure must be given");
  Completion c;
  c.triple.flavor = p.flavor;
  if (!p.omega) {
    c.triple.g = *p.g;
    c.triple.structure = *p.structure;
    c.triple.omega = omega_from(*p.g, *p.structure, p.flavor, tol);
  } else if (!p.g) {
    c.triple.omega = *p.omega;
    c.triple.structure = *p.structure;
    MetricFromForm m = g_from(*p.omega, *p.structure, p.flavor, tol);
    c.triple.g = m.g;
    c.metric_signature = m.signature;
  } else {
    PolarConstruction pc = structure_from(*p.g, *p.omega, p.flavor, tol);
    c.triple.omega = *p.omega;
    c.triple.g = pc.corrected_metric;
    c.triple.structure = pc.structure;
    c.polar = std::move(pc);
  }
  c.report = validate(c.triple, tol);
  if (c.polar && p.flavor == Flavor::Kahler)
    c.report.check("I R = R I", frobenius(c.triple.structure * c.polar->r - c.polar->r * c.triple.structure),
                   tol.bound(frobenius(c.polar->r) * frobenius(c.triple.structure)));
  if (!c.report.passed()) throw Error(ErrorCode::InvalidTriple, "completed triple fails a compatibility predicate");
  return c;
}

LagrangianSplitting lagrangian_orthogonal_decomposition(const CompatibleTriple& t, const Tolerance& tol) {
  tol.validate();
  const Report pre = validate(t, tol);
  if (!pre.passed()) throw Error(ErrorCode::InvalidTriple, "triple does not validate");
  const Index n = t.g.rows();
  const Index m = n / 2;
  LagrangianSplitting out;
  if (t.flavor == Flavor::Kahler) {
    // Unitary Gram-Schmidt: each new vector is g-orthogonal to the previous v's and I v's.
    std::vector<Vector> vs;
    auto gdot = [&](const Vector& a, const Vector& b) { return a.dot(t.g * b); };
    for (Index c = 0; c < n && static_cast<Index>(vs.size()) < m; ++c) {
      Vector w = Vector::Unit(n, c);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : vs) {
          const Vector iv = t.structure * v;
          w -= gdot(v, w) * v + gdot(iv, w) * iv;
        }
      const double len = std::sqrt(std::max(gdot(w, w), 0.0));
      if (len > 1e-8) vs.push_back(w / len);
    }
    if (static_cast<Index>(vs.size()) != m) throw Error(ErrorCode::InvalidTriple, "no unitary basis found");
    out.e1 = columns(vs, n);
    out.e2 = t.structure * out.e1;
  } else {
    // u = p + q', w = p - q' = J u with q' chosen so that g(u_k, u_l) = delta_kl.
    const ParaComplexStructure pc = ParaComplexStructure::from_matrix(t.structure, tol);
    const Matrix& pp = pc.eigen_plus;
    const Matrix& qq = pc.eigen_minus;
    if (pp.cols() != m || qq.cols() != m) throw Error(ErrorCode::InvalidTriple, "eigenspaces have wrong dimension");
    const Matrix pairing = pp.transpose() * t.g * qq;
    if (numerical_rank(pairing, tol) < m) throw Error(ErrorCode::InvalidTriple, "eigenspaces are not g-dual");
    const Matrix q2 = 0.5 * qq * pairing.inverse();
    out.e1 = pp + q2;
    out.e2 = pp - q2;
  }

  Report& r = out.report;
  r.title = "Lagrangian splitting (" + to_string(t.flavor) + ")";
  Matrix b(n, 2 * m);
  b << out.e1, out.e2;
  const Index rank = numerical_rank(b, tol);
  r.flag("E1 + E2 spans", rank == n, static_cast<double>(n - rank), 0.0);
  r.flag("dim E1 = dim E2", out.e1.cols() == out.e2.cols());
  const double scale = frobenius(t.omega) * sq_scale(b, b) + frobenius(t.g) * sq_scale(b, b);
  r.check("Omega = 0 on E1 x E1", frobenius(out.e1.transpose() * t.omega * out.e1), tol.bound(scale));
  r.check("Omega = 0 on E2 x E2", frobenius(out.e2.transpose() * t.omega * out.e2), tol.bound(scale));
  if (t.flavor == Flavor::Kahler) {
    r.check("g(E1, E2) = 0", frobenius(out.e1.transpose() * t.g * out.e2), tol.bound(scale));
  } else {
    const double p = symmetric_eigen(out.e1.transpose() * t.g * out.e1, tol).values.minCoeff();
    const double q = symmetric_eigen(out.e2.transpose() * t.g * out.e2, tol).values.maxCoeff();
    r.flag("g positive definite on E1", p > tol.atol, std::max(0.0, tol.atol - p), 0.0);
    r.flag("g negative definite on E2", q < -tol.atol, std::max(0.0, q + tol.atol), 0.0);
  }
  if (!r.passed()) throw Error(ErrorCode::InvalidTriple, "splitting fails its defining conditions");
  return out;
}

}  // namespace gstruct
