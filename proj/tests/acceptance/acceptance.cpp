// Acceptance suite: one line per criterion, exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "atlas_gen.hpp"
#include "generators.hpp"
#include "gstruct/bundle.hpp"
#include "gstruct/calculus.hpp"
#include "gstruct/compat.hpp"
#include "gstruct/limits.hpp"
#include "gstruct/loopspace.hpp"

using namespace gstruct;
using namespace gstruct::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double rel(const Matrix& got, const Matrix& want) { return (got - want).norm() / std::max(1.0, want.norm()); }

// 1. Polar construction on random (g, Omega) pairs.
Outcome polar_suite() {
  Rng rng(1001);
  double worst = 0.0;
  bool spd = true;
  const auto start = std::chrono::steady_clock::now();
  for (int k = 0; k < 500; ++k) {
    const Index n = 2 * (1 + k % 6);
    const Matrix g = random_spd(n, rng);
    const Matrix s = random_skew_nondegenerate(n, rng);
    const PolarConstruction pc = structure_from(g, s, Flavor::Kahler);
    const Matrix& i = pc.structure;
    const Matrix& gb = pc.corrected_metric;
    const Matrix id = Matrix::Identity(n, n);
    worst = std::max(worst, (i * i + id).norm());
    spd = spd && (gb - gb.transpose()).norm() == 0.0 && Eigen::LLT<Matrix>(gb).info() == Eigen::Success;
    // Omega(I u, I v) = Omega(u, v) and g(u, v) = Omega(u, I v) on the standard basis.
    worst = std::max(worst, (i.transpose() * s * i - s).norm());
    worst = std::max(worst, (s * i - gb).norm());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-8 && spd && secs <= 10.0,
          "500 pairs, dims 2-12: max residual " + sci(worst) + " (<= 1e-08), corrected metric SPD " +
              (spd ? "yes" : "no") + ", " + sci(secs) + " s (<= 10 s)"};
}

// 2. Completion of each missing element, then re-derivation of the given ones.
Outcome completion_suite() {
  Rng rng(1002);
  double worst = 0.0;
  int failures = 0;
  for (Flavor flavor : {Flavor::Kahler, Flavor::ParaKahler}) {
    // omega_from and g_from disagree by this sign on para triples.
    const double sigma = flavor == Flavor::Kahler ? 1.0 : -1.0;
    for (int missing = 0; missing < 3; ++missing)
      for (int k = 0; k < 200; ++k) {
        const Index m = 1 + k % 4;
        const CompatibleTriple t = flavor == Flavor::Kahler ? random_kahler_triple(m, rng) : random_para_triple(m, rng);
        PartialTriple p{flavor, t.omega, t.g, t.structure};
        if (missing == 0) p.omega.reset();
        if (missing == 1) p.g.reset();
        if (missing == 2) p.structure.reset();
        try {
          const CompatibleTriple c = complete_triple(p).triple;
          double e = 0.0;
          if (missing == 0) {
            e = std::max(e, rel(c.omega, t.omega));
            e = std::max(e, rel(sigma * g_from(c.omega, c.structure, flavor).g, t.g));
            e = std::max(e, rel(structure_from(t.g, c.omega, flavor).structure, t.structure));
          } else if (missing == 1) {
            e = std::max(e, rel(sigma * c.g, t.g));
            e = std::max(e, rel(omega_from(sigma * c.g, c.structure, flavor), t.omega));
            e = std::max(e, rel(structure_from(sigma * c.g, c.omega, flavor).structure, t.structure));
          } else {
            e = std::max(e, rel(c.structure, t.structure));
            e = std::max(e, rel(c.g, t.g));
            e = std::max(e, rel(omega_from(c.g, c.structure, flavor), t.omega));
            e = std::max(e, rel(sigma * g_from(c.omega, c.structure, flavor).g, t.g));
          }
          worst = std::max(worst, e);
        } catch (const std::exception&) {
          ++failures;
        }
      }
  }
  return {worst <= 1e-9 && failures == 0,
          "3 cases x 200 pairs x 2 flavors: max relative error " + sci(worst) + " (<= 1e-09), " +
              std::to_string(failures) + " rejected (para metric compared up to the link sign -1)"};
}

// 3. Flat pullback metrics and the sphere.
Outcome flatness_suite() {
  Rng rng(1003);
  const Grid grid = Grid::uniform(2, -0.5, 0.5, 5);
  const std::vector<Matrix> models = {diag({1, 1}), diag({1, -1}), diag({-1, -1})};
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const TensorFieldOnChart g =
        pullback_metric(random_quadratic_diffeo(2, rng), models[static_cast<std::size_t>(k % 3)],
                        DerivativeMode::FiniteDifference);
    const ConnectionData c = levi_civita(g);
    for (const Vector& x : grid.points()) worst = std::max(worst, curvature(c, x).norm());
  }
  const TensorFieldOnChart sphere = sphere_stereographic(2);
  const ConnectionData cs = levi_civita(sphere);
  double dev = 0.0;
  for (const Vector& x : grid.points())
    dev = std::max(dev, std::abs(sectional_curvature(curvature(cs, x), sphere.value(x)) - 1.0));
  return {worst <= 1e-5 && dev <= 1e-4, "50 pullback metrics, signatures (2,0) (1,1) (0,2): max |R| " + sci(worst) +
                                            " (<= 1e-05); sphere |K - 1| " + sci(dev) + " (<= 1e-04)"};
}

// 4. Nijenhuis criterion.
Outcome nijenhuis_suite() {
  Rng rng(1004);
  const Grid grid = Grid::uniform(4, -0.5, 0.5, 3);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const bool tangent = k % 2 == 0;
    const auto phi = random_quadratic_diffeo(4, rng);
    const Verdict v = is_integrable_structure(
        pullback_endomorphism(phi, tangent ? canonical_tangent(2) : canonical_para(2)),
        tangent ? StructureKind::Tangent : StructureKind::ParaComplex, grid);
    worst = std::max(worst, v.max_residual);
  }
  // J = [[Id, 0], [C(x), -Id]] squares to Id for every C; linear C(x) generically breaks involutivity.
  double weakest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 10; ++k) {
    std::vector<Matrix> c;
    for (int l = 0; l < 4; ++l) c.push_back(random_matrix(2, 2, rng));
    const TensorFieldOnChart f = TensorFieldOnChart::sampled(
        4,
        [c](const Vector& x) {
          Matrix j = diag({1, 1, -1, -1});
          for (Index l = 0; l < 4; ++l) j.block(2, 0, 2, 2) += x(l) * c[static_cast<std::size_t>(l)];
          return j;
        },
        Role::Endomorphism);
    weakest = std::min(weakest, is_integrable_structure(f, StructureKind::ParaComplex, grid).max_residual);
  }
  return {worst <= 1e-6 && weakest >= 1e-2, "50 pullbacks: max |N| " + sci(worst) + " (<= 1e-06); 10 twisted fields: min |N| " +
                                                sci(weakest) + " (>= 1e-02)"};
}

// 5. Reduction of generated atlases and a left perturbation off the group.
Outcome reduction_suite() {
  Rng rng(1005);
  const std::vector<StructureMatrix> models = {
      {canonical_complex(2), Role::Endomorphism}, {canonical_para(2), Role::Endomorphism},
      {canonical_tangent(2), Role::Endomorphism}, {canonical_symplectic(2), Role::SkewForm},
      {diag({1, 1, -1, -1}), Role::SymmetricForm}};
  const double eps = 1e-3;
  bool clean = true;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  int detected = 0, total = 0;
  for (const auto& model : models)
    for (int k = 0; k < 10; ++k) {
      const GeneratedAtlas g = generate_atlas(model, 4, rng);
      const IsotropyGroupSpec spec{model};
      clean = clean && check_cocycle(g.atlas).passed() && check_reduction(g.atlas, spec).passed();
      // (I + eps X) T with |d rho(X)| = 1 moves the model by eps to first order.
      Matrix x = random_matrix(4, 4, rng);
      x /= linearized_action(x, model).norm();
      const Overlap& ov = g.atlas.overlaps()[static_cast<std::size_t>(k) % g.atlas.overlaps().size()];
      ChartAtlas bent = g.atlas;
      const ChartAtlas orig = g.atlas;
      const Matrix left = Matrix::Identity(4, 4) + eps * x;
      bent.set_transition(ov.a, ov.b, [orig, left, a = ov.a, b = ov.b](const Vector& p) {
        return Matrix(left * orig.transition(a, b, p));
      });
      const Report r = check_reduction(bent, spec);
      const CheckEntry* e = r.find("T_" + ov.a + ov.b + " in G(T)");
      ++total;
      if (e && !e->pass) ++detected;
      if (e) {
        lo = std::min(lo, e->residual / eps);
        hi = std::max(hi, e->residual / eps);
      }
    }
  const bool ok = clean && detected == total && lo >= 0.5 && hi <= 2.0;
  return {ok, "50 generated atlases reduce: " + std::string(clean ? "yes" : "no") + "; perturbation detected " +
                  std::to_string(detected) + "/" + std::to_string(total) + ", measured/injected in [" + sci(lo) +
                  ", " + sci(hi) + "] (within x2)"};
}

// 6. Towers of depth 8.
Outcome tower_suite() {
  Rng rng(1006);
  std::vector<Index> dims;
  for (Index k = 1; k <= 8; ++k) dims.push_back(2 * k);
  double coherence = 0.0;
  int sequences = 0;
  for (Variance v : {Variance::Direct, Variance::Projective}) {
    const BondingSystem b = BondingSystem::padded(dims, v);
    if (!validate_bonding(b).passed()) return {false, "padded tower fails validation"};
    const Index top = dims.back();
    // Diagonal endomorphisms, block lower (projective) or upper (direct) endomorphisms, and forms.
    Matrix blocks = random_matrix(top, top, rng);
    for (Index r = 0; r < top; ++r)
      for (Index c = 0; c < top; ++c)
        if ((v == Variance::Projective && c / 2 > r / 2) || (v == Variance::Direct && r / 2 > c / 2)) blocks(r, c) = 0.0;
    Matrix sym = random_matrix(top, top, rng);
    sym = (sym + sym.transpose()).eval();
    std::vector<CoherentSequence> seqs(3, CoherentSequence{b, TensorKind::Endomorphism, {}});
    seqs[2].kind = TensorKind::Form;
    for (Index d : dims) {
      Matrix dg = Matrix::Zero(d, d);
      for (Index k = 0; k < d; ++k) dg(k, k) = static_cast<double>(k + 1);
      seqs[0].levels.push_back(dg);
      if (v == Variance::Direct) {
        seqs[1].levels.push_back(blocks.topLeftCorner(d, d));
        seqs[2].levels.push_back(sym.topLeftCorner(d, d));
      } else {
        seqs[1].levels.push_back(blocks.topLeftCorner(d, d));
        Matrix w = Matrix::Zero(d, d);
        w.topLeftCorner(2, 2) = sym.topLeftCorner(2, 2);
        seqs[2].levels.push_back(w);
      }
    }
    for (const auto& s : seqs) {
      const Report r = check_coherent(s);
      if (!r.passed()) return {false, "a coherent sequence fails: " + r.worst()->name};
      coherence = std::max(coherence, r.max_residual());
      ++sequences;
    }
  }
  const BondingSystem direct = BondingSystem::padded(dims, Variance::Direct);
  double theta = 0.0;
  for (int k = 0; k < 100; ++k) {
    Matrix a = random_matrix(16, 16, rng, 0.5);
    for (Index r = 0; r < 16; ++r)
      for (Index c = 0; c < 16; ++c) {
        if (r / 2 > c / 2) a(r, c) = 0.0;
        if (r == c) a(r, c) += 3.0;
      }
    const Matrix via = theta_projection(theta_projection(a, 8, 4, direct), 4, 1, direct);
    theta = std::max(theta, (theta_projection(a, 8, 1, direct) - via).norm());
  }
  const BondingSystem proj = BondingSystem::padded(dims, Variance::Projective);
  auto random_tuple = [&] {
    Matrix m = random_matrix(16, 16, rng, 0.5);
    for (Index r = 0; r < 16; ++r)
      for (Index c = 0; c < 16; ++c) {
        if (c / 2 > r / 2) m(r, c) = 0.0;
        if (r == c) m(r, c) += 3.0;
      }
    LevelTuple t;
    for (Index d : dims) t.entries.push_back(m.topLeftCorner(d, d));
    return t;
  };
  double closure = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const LevelTuple p = compose(random_tuple(), random_tuple());
    closure = std::max(closure, tuple_constraint_residual(p, proj));
  }
  const bool ok = coherence == 0.0 && theta <= 1e-12 && closure <= 1e-10;
  return {ok, std::to_string(sequences) + " depth-8 sequences: max coherence residual " + sci(coherence) +
                  " (exact); theta functoriality " + sci(theta) + " (<= 1e-12); tuple closure " + sci(closure) +
                  " (<= 1e-10)"};
}

Matrix embed(const Matrix& c, Index k, Index d) {
  Matrix m = Matrix::Zero(d, d);
  m.block(2 * (k / 2), 2 * (k / 2), 2, 2) = c;
  return m;
}

// 7. Connection coherence and localized adaptedness failures.
Outcome connection_suite() {
  Rng rng(1007);
  const Matrix k2 = mat(2, 2, {0, -1, 1, 0});
  const std::vector<Index> dims{2, 4, 6, 8};
  std::vector<Vector> samples;
  for (int s = 0; s < 20; ++s) samples.push_back(random_vector(8, rng));
  bool ok = true;
  int localized = 0, perturbed = 0;
  double worst = 0.0;
  for (Variance v : {Variance::Direct, Variance::Projective}) {
    const BondingSystem b = BondingSystem::padded(dims, v);
    ConnectionFormSequence seq{b, {}, {}, {}};
    for (Index d : dims) {
      LevelConnectionForm f;
      for (Index k = 0; k < d; ++k) {
        std::vector<Matrix> coeffs{embed(k2, k, d)};
        for (Index l = 0; l < d; ++l)
          coeffs.push_back(0.1 * static_cast<double>(1 + (k + l) % 3) * embed(k2, std::max(k, l), d));
        f.coefficients.push_back(coeffs);
      }
      seq.forms.push_back(f);
      seq.model_tensors.push_back({Matrix::Identity(d, d), Role::SymmetricForm});
    }
    const Report r = check_connection_coherence(seq, samples);
    ok = ok && r.passed();
    worst = std::max(worst, r.max_residual());
    for (std::size_t level = 1; level <= dims.size(); ++level) {
      ConnectionFormSequence bad = seq;
      const Index d = dims[level - 1];
      bad.forms[level - 1].coefficients[static_cast<std::size_t>(d - 1)][0] += embed(Matrix::Identity(2, 2), d - 1, d);
      const Report rb = check_connection_coherence(bad, samples);
      ++perturbed;
      bool here = true;
      for (std::size_t k = 1; k <= dims.size(); ++k) {
        const CheckEntry* e = rb.find("adapted at level " + std::to_string(k));
        here = here && e && (e->pass == (k != level));
      }
      if (here) ++localized;
    }
  }
  return {ok && localized == perturbed, "both variances, 4 levels, 20 samples: pass " + std::string(ok ? "yes" : "no") +
                                            ", max residual " + sci(worst) + "; perturbations localized " +
                                            std::to_string(localized) + "/" + std::to_string(perturbed)};
}

// 8. Loop-space demo.
Outcome loop_suite() {
  const auto start = std::chrono::steady_clock::now();
  const LoopDemo demo = loopspace_demo(3, 16, 8);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double worst = std::max(demo.compatibility.max_residual(), demo.coherence.max_residual());
  return {demo.passed() && worst == 0.0 && secs <= 1.0,
          "Kahler target, N = 16, 3 levels: pass " + std::string(demo.passed() ? "yes" : "no") + ", max residual " +
              sci(worst) + " (exact), " + sci(secs) + " s (<= 1 s)"};
}

// 9. Second order convergence of every finite-difference derivative.
Outcome convergence_suite() {
  Rng rng(1009);
  const Index n = 3;
  auto quartic = [&](Index vars) {
    Polynomial p = Polynomial::constant(vars, uniform(rng, -1, 1));
    for (Index i = 0; i < vars; ++i) {
      const Polynomial xi = Polynomial::variable(vars, i);
      p += uniform(rng, -1, 1) * xi + uniform(rng, -1, 1) * (xi * xi * xi) + uniform(rng, -1, 1) * (xi * xi * xi * xi);
    }
    p += uniform(rng, -1, 1) * (Polynomial::variable(vars, 0) * Polynomial::variable(vars, 1) *
                                Polynomial::variable(vars, vars - 1));
    return p;
  };
  std::vector<Polynomial> px, py;
  for (Index k = 0; k < n; ++k) px.push_back(quartic(n)), py.push_back(quartic(n));
  PolyMatrix pa(n, n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) pa(i, j) = 0.3 * quartic(n);
  const auto phi = random_cubic_diffeo(n, rng, 0.2);
  const Matrix g0 = diag({1, 2, -1});
  const Vector at = (Vector(3) << 0.2, -0.1, 0.15).finished();

  auto sampled_field = [](const std::vector<Polynomial>& p, FiniteDifference fd) {
    return VectorField::sampled(static_cast<Index>(p.size()), [p](const Vector& x) {
      Vector v(static_cast<Index>(p.size()));
      for (std::size_t k = 0; k < p.size(); ++k) v(static_cast<Index>(k)) = p[k](x);
      return v;
    }, fd);
  };
  // Quantities computed with derivatives, each as a flat list of numbers.
  auto quantities = [&](bool exact, FiniteDifference fd) {
    std::vector<std::vector<double>> q;
    const VectorField x = exact ? VectorField::polynomial(px) : sampled_field(px, fd);
    const VectorField y = exact ? VectorField::polynomial(py) : sampled_field(py, fd);
    const TensorFieldOnChart a =
        exact ? TensorFieldOnChart::polynomial(pa, Role::Endomorphism)
              : TensorFieldOnChart::sampled(n, [pa](const Vector& p) { return pa.eval(p); }, Role::Endomorphism, fd);
    const TensorFieldOnChart g =
        pullback_metric(phi, g0, exact ? DerivativeMode::Polynomial : DerivativeMode::FiniteDifference, fd);
    const Vector br = lie_bracket(x, y).value(at);
    q.push_back({br.data(), br.data() + br.size()});
    const Vector nij = nijenhuis(a, x, y, at);
    q.push_back({nij.data(), nij.data() + nij.size()});
    const ConnectionData c = levi_civita(g);
    q.push_back(c.gamma(at).data);
    q.push_back(curvature(c, at).data);
    std::vector<double> cov;
    for (const Matrix& m : covariant_derivative(c, a, at)) cov.insert(cov.end(), m.data(), m.data() + m.size());
    q.push_back(cov);
    return q;
  };
  const auto ref = quantities(true, {});
  const std::vector<std::string> names = {"bracket", "Nijenhuis", "Christoffel", "curvature", "covariant derivative"};
  std::vector<std::vector<double>> errors(names.size());
  for (double h : {4e-2, 2e-2, 1e-2}) {
    const auto got = quantities(false, {h, h});
    for (std::size_t k = 0; k < names.size(); ++k) {
      double e = 0.0;
      for (std::size_t i = 0; i < ref[k].size(); ++i) e = std::max(e, std::abs(got[k][i] - ref[k][i]));
      errors[k].push_back(e);
    }
  }
  double weakest = std::numeric_limits<double>::infinity();
  std::string which;
  for (std::size_t k = 0; k < names.size(); ++k)
    for (std::size_t s = 0; s + 1 < errors[k].size(); ++s) {
      const double ratio = errors[k][s] / errors[k][s + 1];
      if (!(ratio >= weakest)) {
        weakest = ratio;
        which = names[k];
      }
    }
  return {weakest >= 3.5, "5 derivative-based quantities, h = 4e-2 -> 1e-2: min reduction per halving " + sci(weakest) +
                              " (" + which + ", >= 3.5)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"polar construction", polar_suite},   {"triple completion", completion_suite},
      {"flat pullbacks", flatness_suite},    {"Nijenhuis criterion", nijenhuis_suite},
      {"cocycle and reduction", reduction_suite}, {"tower suite", tower_suite},
      {"connection coherence", connection_suite}, {"loop-space demo", loop_suite},
      {"finite-difference convergence", convergence_suite}};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %zu  %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
