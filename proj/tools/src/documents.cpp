#include "documents.hpp"

#include <fstream>
#include <sstream>

#include "gstruct/error.hpp"

namespace gstruct::cli {

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw DocumentError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

std::string require_string(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_string()) throw DocumentError(where + ": field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

Index require_index(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw DocumentError(where + ": field \"" + key + "\" must be a non-negative integer");
  return static_cast<Index>(v.get<long long>());
}

double to_number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw DocumentError(what + ": expected a number");
  return j.get<double>();
}

Polynomial to_polynomial(const Json& j, Index vars, const std::string& what) {
  if (j.is_number()) return Polynomial::constant(vars, j.get<double>());
  if (!j.is_array()) throw DocumentError(what + ": polynomial must be a number or a list of terms");
  Polynomial p(vars);
  for (const auto& term : j) {
    const double c = to_number(require(term, "c", what), what + ".c");
    const Json& e = require(term, "p", what);
    if (!e.is_array() || static_cast<Index>(e.size()) != vars)
      throw DocumentError(what + ": exponent list must have one entry per variable");
    Polynomial::Exponents ex;
    for (const auto& k : e) {
      if (!k.is_number_integer() || k.get<int>() < 0) throw DocumentError(what + ": exponents must be non-negative");
      ex.push_back(k.get<int>());
    }
    p.add_term(c, ex);
  }
  return p;
}

std::vector<Polynomial> to_polynomials(const Json& j, Index vars, const std::string& what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != vars)
    throw DocumentError(what + ": need one polynomial per coordinate");
  std::vector<Polynomial> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(to_polynomial(j[i], vars, what));
  return out;
}

PolyMatrix to_poly_matrix(const Json& j, Index vars, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw DocumentError(what + ": expected a matrix of polynomials");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  PolyMatrix m(rows, cols, vars);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw DocumentError(what + ": ragged rows");
    for (Index c = 0; c < cols; ++c) m(r, c) = to_polynomial(row[static_cast<std::size_t>(c)], vars, what);
  }
  return m;
}

Matrix columns_or_empty(const Json& j, const char* key, Index rows, const std::string& what) {
  if (!j.contains(key)) return Matrix(rows, 0);
  return to_matrix(j.at(key), what + "." + key);
}

}  // namespace

Json load_json(const std::string& path, std::string& raw) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DocumentError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  raw = ss.str();
  try {
    return Json::parse(raw);
  } catch (const Json::parse_error& e) {
    throw DocumentError(path + ": " + e.what());
  }
}

Matrix to_matrix(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw DocumentError(what + ": expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (!j[0].is_array()) throw DocumentError(what + ": expected a nested array");
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw DocumentError(what + ": ragged rows");
    for (Index c = 0; c < cols; ++c) m(r, c) = to_number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

Vector to_vector(const Json& j, const std::string& what) {
  if (!j.is_array()) throw DocumentError(what + ": expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = to_number(j[i], what);
  return v;
}

std::vector<Vector> to_points(const Json& j, const std::string& what) {
  if (!j.is_array()) throw DocumentError(what + ": expected an array of points");
  std::vector<Vector> out;
  for (const auto& p : j) out.push_back(to_vector(p, what));
  return out;
}

Json from_matrix(const Matrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json from_vector(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

StructureDocument parse_structure(const Json& j) {
  StructureDocument d;
  d.kind = require_string(j, "kind", "structure");
  d.matrix = to_matrix(require(j, "matrix", "structure"), "structure.matrix");
  d.dim = j.contains("dim") ? require_index(j, "dim", "structure") : d.matrix.rows();
  if (d.matrix.rows() != d.dim || d.matrix.cols() != d.dim)
    throw DocumentError("structure: matrix is not dim x dim");
  if (j.contains("decomposition")) d.decomposition = j.at("decomposition");
  return d;
}

Report validate_structure(const StructureDocument& doc, const Tolerance& tol) {
  const Matrix& m = doc.matrix;
  const Json& dec = doc.decomposition;
  const std::string where = "structure.decomposition";
  if (doc.kind == "complex") {
    ComplexStructure c{m, std::nullopt};
    if (!dec.is_null())
      c.decomposition = ComplexDecomposition{to_matrix(require(dec, "e1", where), where + ".e1"),
                                             to_matrix(require(dec, "e2", where), where + ".e2"),
                                             to_matrix(require(dec, "iso", where), where + ".iso")};
    Report r = validate(c, tol);
    if (!c.decomposition) r.note("no decomposition given; block form not checked");
    return r;
  }
  if (doc.kind == "para_complex") return validate(ParaComplexStructure::from_matrix(m, tol), tol);
  if (doc.kind == "tangent") return validate(TangentStructure::from_matrix(m, tol), tol);
  if (doc.kind == "symplectic") return validate(SymplecticForm{m}, tol);
  if (doc.kind == "krein") {
    if (dec.is_null()) return validate(KreinMetric::from_metric(m, tol), tol);
    KreinMetric k{m, columns_or_empty(dec, "plus", doc.dim, where), columns_or_empty(dec, "minus", doc.dim, where),
                  std::nullopt};
    return validate(k, tol);
  }
  if (doc.kind == "cotangent") {
    if (dec.is_null()) throw DocumentError("cotangent structure needs a decomposition with lagrangian and complement");
    CotangentStructure c{m, to_matrix(require(dec, "lagrangian", where), where + ".lagrangian"),
                         to_matrix(require(dec, "complement", where), where + ".complement")};
    return validate(c, tol);
  }
  if (doc.kind == "bilinear") return validate(BilinearForm{m}, tol);
  throw DocumentError("unknown structure kind \"" + doc.kind + "\"");
}

Role role_of(const Json& j) {
  if (j.contains("role")) {
    const std::string r = require_string(j, "role", "tensor");
    if (r == "endomorphism") return Role::Endomorphism;
    if (r == "symmetric_form") return Role::SymmetricForm;
    if (r == "skew_form") return Role::SkewForm;
    if (r == "general_form") return Role::GeneralForm;
    throw DocumentError("unknown role \"" + r + "\"");
  }
  const std::string k = require_string(j, "kind", "tensor");
  if (k == "complex" || k == "para_complex" || k == "tangent") return Role::Endomorphism;
  if (k == "symplectic" || k == "cotangent") return Role::SkewForm;
  if (k == "krein" || k == "metric") return Role::SymmetricForm;
  if (k == "bilinear") return Role::GeneralForm;
  throw DocumentError("unknown tensor kind \"" + k + "\"");
}

Flavor parse_flavor(const std::string& s) {
  if (s == "kahler") return Flavor::Kahler;
  if (s == "para_kahler") return Flavor::ParaKahler;
  throw DocumentError("unknown flavor \"" + s + "\" (expected kahler or para_kahler)");
}

PartialTriple parse_pair(const Json& j) {
  PartialTriple p;
  p.flavor = parse_flavor(j.contains("flavor") ? require_string(j, "flavor", "pair") : std::string("kahler"));
  if (j.contains("omega")) p.omega = to_matrix(j.at("omega"), "pair.omega");
  if (j.contains("metric")) p.g = to_matrix(j.at("metric"), "pair.metric");
  if (j.contains("structure")) p.structure = to_matrix(j.at("structure"), "pair.structure");
  return p;
}

ChartAtlas parse_atlas(const Json& j) {
  const Index fiber = require_index(j, "dim", "atlas");
  const Index base = j.contains("base_dim") ? require_index(j, "base_dim", "atlas") : Index{1};
  ChartAtlas atlas(base, fiber);
  for (const auto& c : require(j, "charts", "atlas")) {
    Chart chart;
    chart.name = require_string(c, "name", "chart");
    chart.lower = to_vector(require(c, "lower", "chart"), "chart.lower");
    chart.upper = to_vector(require(c, "upper", "chart"), "chart.upper");
    if (chart.lower.size() != base || chart.upper.size() != base)
      throw DocumentError("chart " + chart.name + ": box corners must have base_dim entries");
    if (c.contains("samples")) chart.samples = to_points(c.at("samples"), "chart.samples");
    atlas.add_chart(std::move(chart));
  }
  if (j.contains("overlaps"))
    for (const auto& o : j.at("overlaps"))
      atlas.add_overlap(Overlap{require_string(o, "a", "overlap"), require_string(o, "b", "overlap"),
                                to_points(require(o, "samples", "overlap"), "overlap.samples")});
  if (j.contains("triples"))
    for (const auto& t : j.at("triples"))
      atlas.add_triple(TripleOverlap{require_string(t, "a", "triple"), require_string(t, "b", "triple"),
                                     require_string(t, "c", "triple"),
                                     to_points(require(t, "samples", "triple"), "triple.samples")});
  if (j.contains("transitions"))
    for (const auto& t : j.at("transitions")) {
      const std::string a = require_string(t, "from", "transition");
      const std::string b = require_string(t, "to", "transition");
      AffineMatrixField f;
      if (t.contains("constant")) {
        f = AffineMatrixField::constant(to_matrix(t.at("constant"), "transition.constant"));
      } else if (t.contains("affine_field")) {
        for (const auto& term : t.at("affine_field")) f.terms.push_back(to_matrix(term, "transition.affine_field"));
        if (f.terms.empty() || static_cast<Index>(f.terms.size()) > base + 1)
          throw DocumentError("transition " + a + "->" + b + ": affine_field needs 1..base_dim+1 terms");
      } else {
        throw DocumentError("transition " + a + "->" + b + ": need \"constant\" or \"affine_field\"");
      }
      for (const auto& m : f.terms)
        if (m.rows() != fiber || m.cols() != fiber)
          throw DocumentError("transition " + a + "->" + b + ": matrices must be dim x dim");
      atlas.set_transition(a, b, f);
    }
  return atlas;
}

StructureKind parse_structure_kind(const std::string& s) {
  if (s == "tangent") return StructureKind::Tangent;
  if (s == "para_complex") return StructureKind::ParaComplex;
  if (s == "complex") return StructureKind::Complex;
  throw DocumentError("unknown structure kind \"" + s + "\" (expected tangent, para_complex or complex)");
}

FieldDocument parse_field(const Json& j, Role role, const FiniteDifference& fd) {
  FieldDocument d;
  d.kind = j.contains("kind") ? require_string(j, "kind", "field") : std::string("metric");
  d.dim = require_index(j, "dim", "field");
  if (d.dim == 0) throw DocumentError("field: dim must be positive");
  const Json& f = require(j, "field", "field");
  const bool has_poly = f.contains("polynomial");
  std::string mode = j.contains("mode") ? require_string(j, "mode", "field")
                                        : std::string(has_poly ? "polynomial" : "finite_difference");
  if (mode == "polynomial")
    d.mode = DerivativeMode::Polynomial;
  else if (mode == "finite_difference")
    d.mode = DerivativeMode::FiniteDifference;
  else
    throw DocumentError("field: unknown mode \"" + mode + "\"");

  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    d.grid.lower = to_vector(require(g, "lower", "grid"), "grid.lower");
    d.grid.upper = to_vector(require(g, "upper", "grid"), "grid.upper");
    for (const auto& c : require(g, "counts", "grid")) {
      if (!c.is_number_integer() || c.get<int>() <= 0) throw DocumentError("grid.counts must be positive integers");
      d.grid.counts.push_back(c.get<int>());
    }
    if (d.grid.lower.size() != d.dim || d.grid.upper.size() != d.dim ||
        static_cast<Index>(d.grid.counts.size()) != d.dim)
      throw DocumentError("grid: lower, upper and counts need dim entries");
  } else {
    d.grid = Grid::uniform(d.dim, -0.5, 0.5, 5);
  }

  if (has_poly) {
    PolyMatrix pm = to_poly_matrix(f.at("polynomial"), d.dim, "field.polynomial");
    if (pm.rows() != d.dim || pm.cols() != d.dim) throw DocumentError("field.polynomial must be dim x dim");
    if (d.mode == DerivativeMode::Polynomial)
      d.field = TensorFieldOnChart::polynomial(std::move(pm), role);
    else
      d.field = TensorFieldOnChart::sampled(d.dim, [pm](const Vector& x) { return pm.eval(x); }, role, fd);
    return d;
  }
  const std::string name = require_string(f, "name", "field");
  if (name == "constant") {
    const Matrix m = to_matrix(require(f, "matrix", "field"), "field.matrix");
    if (m.rows() != d.dim || m.cols() != d.dim) throw DocumentError("field.matrix must be dim x dim");
    d.field = TensorFieldOnChart::constant(m, role, d.mode, fd);
  } else if (name == "pullback_flat") {
    const auto phi = to_polynomials(require(f, "phi", "field"), d.dim, "field.phi");
    const Matrix model = to_matrix(require(f, "model", "field"), "field.model");
    if (model.rows() != d.dim || model.cols() != d.dim) throw DocumentError("field.model must be dim x dim");
    if (role == Role::Endomorphism) {
      d.mode = DerivativeMode::FiniteDifference;
      d.field = pullback_endomorphism(phi, model, fd);
    } else {
      d.field = pullback_metric(phi, model, d.mode, fd);
    }
  } else if (name == "sphere_stereographic") {
    if (role == Role::Endomorphism) throw DocumentError("sphere_stereographic is a metric");
    d.mode = DerivativeMode::FiniteDifference;
    d.field = sphere_stereographic(d.dim, fd);
  } else {
    throw DocumentError("field: unknown named field \"" + name + "\"");
  }
  return d;
}

TowerDocument parse_tower(const Json& j, bool connection) {
  TowerDocument d;
  std::vector<Index> dims;
  for (const auto& v : require(j, "dims", "tower")) {
    if (!v.is_number_integer() || v.get<long long>() <= 0) throw DocumentError("tower.dims must be positive integers");
    dims.push_back(static_cast<Index>(v.get<long long>()));
  }
  const std::string var = require_string(j, "variance", "tower");
  Variance variance;
  if (var == "projective")
    variance = Variance::Projective;
  else if (var == "direct")
    variance = Variance::Direct;
  else
    throw DocumentError("tower.variance must be projective or direct");
  std::vector<Matrix> consecutive, projections;
  if (j.contains("consecutive")) {
    for (const auto& m : j.at("consecutive")) consecutive.push_back(to_matrix(m, "tower.consecutive"));
  }
  if (j.contains("projections"))
    for (const auto& m : j.at("projections")) projections.push_back(to_matrix(m, "tower.projections"));
  if (j.contains("consecutive"))
    d.bonding.emplace(dims, variance, std::move(consecutive), std::move(projections));
  else
    d.bonding.emplace(BondingSystem::padded(dims, variance));
  if (j.contains("explicit"))
    for (const auto& e : j.at("explicit"))
      d.bonding->set_explicit(static_cast<std::size_t>(require_index(e, "i", "explicit")),
                              static_cast<std::size_t>(require_index(e, "j", "explicit")),
                              to_matrix(require(e, "matrix", "explicit"), "explicit.matrix"));

  if (j.contains("structures")) {
    std::size_t k = 0;
    for (const auto& s : j.at("structures")) {
      ++k;
      const std::string kind = require_string(s, "kind", "structures");
      TensorKind tk;
      if (kind == "endomorphism")
        tk = TensorKind::Endomorphism;
      else if (kind == "form")
        tk = TensorKind::Form;
      else
        throw DocumentError("structures.kind must be endomorphism or form");
      TowerSequence seq{s.contains("name") ? require_string(s, "name", "structures") : "sequence " + std::to_string(k),
                        CoherentSequence{*d.bonding, tk, {}}};
      for (const auto& m : require(s, "levels", "structures")) seq.sequence.levels.push_back(to_matrix(m, "levels"));
      d.sequences.push_back(std::move(seq));
    }
  }
  if (!connection) return d;

  ConnectionFormSequence c{*d.bonding, {}, {}, {}};
  for (const auto& level : require(j, "forms", "tower")) {
    LevelConnectionForm form;
    for (const auto& direction : level) {
      std::vector<Matrix> coeffs;
      for (const auto& m : direction) coeffs.push_back(to_matrix(m, "forms"));
      form.coefficients.push_back(std::move(coeffs));
    }
    c.forms.push_back(std::move(form));
  }
  if (j.contains("morphisms"))
    for (const auto& m : j.at("morphisms"))
      c.consecutive_morphisms.push_back(AlgebraMorphism{to_matrix(require(m, "left", "morphisms"), "morphisms.left"),
                                                        to_matrix(require(m, "right", "morphisms"), "morphisms.right")});
  if (j.contains("model")) {
    const Json& model = j.at("model");
    const Role role = role_of(model);
    for (const auto& m : require(model, "levels", "model")) c.model_tensors.push_back({to_matrix(m, "model"), role});
  }
  if (j.contains("samples")) d.samples = to_points(j.at("samples"), "tower.samples");
  d.connection = std::move(c);
  return d;
}

}  // namespace gstruct::cli
