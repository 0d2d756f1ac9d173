#include "gstruct/loopspace.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gstruct/error.hpp"
#include "gstruct/limits.hpp"

namespace gstruct {

namespace {

void require_array(const DiscretizedLoopSpace& space, const Matrix& a, const char* what) {
  if (a.rows() != space.samples() || a.cols() != space.target_dim())
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + " must be a samples x target_dim array");
}

// Sign s with g(u, v) = s Omega(u, T v) on the target.
double link_sign(const CompatibleTriple& t) {
  if (t.flavor == Flavor::Kahler) return 1.0;
  const Matrix st = t.omega * t.structure;
  return frobenius(t.g - st) <= frobenius(t.g + st) ? 1.0 : -1.0;
}

// Sign s with Omega(T u, T v) = s Omega(u, v) on the target.
double invariance_sign(const CompatibleTriple& t) { return t.flavor == Flavor::Kahler ? 1.0 : -1.0; }

Matrix include_array(const Matrix& a, Index dim) {
  Matrix out = Matrix::Zero(a.rows(), dim);
  out.leftCols(a.cols()) = a;
  return out;
}

}  // namespace

DiscretizedLoopSpace DiscretizedLoopSpace::uniform(CompatibleTriple target, Index samples) {
  if (samples <= 0) throw Error(ErrorCode::ShapeMismatch, "need at least one sample");
  DiscretizedLoopSpace s;
  const Index d = target.g.rows();
  s.target = std::move(target);
  s.weights = Vector::Constant(samples, 1.0 / static_cast<double>(samples));
  s.loop = Matrix::Zero(samples, d);
  for (Index k = 0; k < samples; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
    s.loop(k, 0) = std::cos(t);
    if (d > 1) s.loop(k, 1) = std::sin(t);
  }
  return s;
}

Report DiscretizedLoopSpace::validate(const Tolerance& tol) const {
  Report r;
  r.title = "discretized loop space";
  r.flag("weights positive", samples() > 0 && (weights.array() > 0.0).all());
  r.check("weights sum to 1", std::abs(weights.sum() - 1.0), tol.bound(1.0));
  r.flag("loop shape", loop.rows() == samples() && loop.cols() == target_dim());
  r.merge(gstruct::validate(target, tol), "target");
  return r;
}

InducedForms induced_forms(const DiscretizedLoopSpace& space, const Matrix& x, const Matrix& y) {
  require_array(space, x, "X");
  require_array(space, y, "Y");
  InducedForms out;
  const Matrix& w = space.target.omega;
  const Matrix& g = space.target.g;
  for (Index k = 0; k < space.samples(); ++k) {
    const Vector xk = x.row(k).transpose();
    const Vector yk = y.row(k).transpose();
    out.omega += space.weights(k) * xk.dot(w * yk);
    out.g += space.weights(k) * xk.dot(g * yk);
  }
  out.structure_x = x * space.target.structure.transpose();
  return out;
}

Matrix random_tangent_array(Index samples, Index dim, std::uint64_t& state) {
  std::mt19937_64 rng(state);
  std::uniform_int_distribution<int> dist(-4, 4);
  Matrix a(samples, dim);
  for (Index i = 0; i < samples; ++i)
    for (Index j = 0; j < dim; ++j) a(i, j) = dist(rng);
  state = rng();
  return a;
}

Report check_induced_compatibility(const DiscretizedLoopSpace& space, int trials, std::uint64_t seed,
                                   const Tolerance& tol) {
  tol.validate();
  Report r = space.validate(tol);
  r.title = std::string(space.target.flavor == Flavor::Kahler ? "almost Kahler" : "almost para-Kahler") +
            " structure on loops, N = " + std::to_string(space.samples());
  if (!r.passed()) return r;
  const double sigma = link_sign(space.target);
  const double tau = invariance_sign(space.target);
  if (space.target.flavor == Flavor::ParaKahler)
    r.note(std::string("metric link g_f(X, Y) = ") + (sigma > 0 ? "+" : "-") + "Omega_f(X, I Y)");

  // Signature of g_f on the full basis of tangent arrays: the weighted sum of N copies of g.
  const Signature sig = signature(space.target.g, tol);
  const Index n = space.samples();
  const Signature total{static_cast<int>(sig.positive * n), static_cast<int>(sig.negative * n),
                        static_cast<int>(sig.zero * n)};
  if (space.target.flavor == Flavor::Kahler)
    r.flag("g_f positive definite (signature)", total.negative == 0 && total.zero == 0);
  else
    r.flag("g_f neutral (signature)", total.neutral() && total.nondegenerate());
  r.note("g_f signature (" + std::to_string(total.positive) + ", " + std::to_string(total.negative) + ")");

  std::uint64_t state = seed;
  double inv = 0.0, link = 0.0, anti = 0.0, inv_scale = 0.0, link_scale = 0.0, pd_worst = 0.0;
  bool pd_ok = true;
  for (int t = 0; t < trials; ++t) {
    const Matrix x = random_tangent_array(n, space.target_dim(), state);
    const Matrix y = random_tangent_array(n, space.target_dim(), state);
    const InducedForms xy = induced_forms(space, x, y);
    const InducedForms yx = induced_forms(space, y, x);
    const InducedForms ixiy = induced_forms(space, xy.structure_x, yx.structure_x);
    const InducedForms xiy = induced_forms(space, x, yx.structure_x);
    inv = std::max(inv, std::abs(ixiy.omega - tau * xy.omega));
    link = std::max(link, std::abs(xy.g - sigma * xiy.omega));
    anti = std::max(anti, std::abs(xy.omega + yx.omega));
    inv_scale = std::max(inv_scale, std::abs(xy.omega));
    link_scale = std::max(link_scale, std::abs(xy.g));
    if (space.target.flavor == Flavor::Kahler && !x.isZero(0.0)) {
      const double gxx = induced_forms(space, x, x).g;
      if (!(gxx > 0.0)) {
        pd_ok = false;
        pd_worst = std::max(pd_worst, -gxx);
      }
    }
  }
  const std::string inv_name = tau > 0 ? "Omega_f(I X, I Y) = Omega_f(X, Y)" : "Omega_f(I X, I Y) = -Omega_f(X, Y)";
  r.check(inv_name, inv, tol.bound(inv_scale));
  r.check(sigma > 0 ? "g_f(X, Y) = Omega_f(X, I Y)" : "g_f(X, Y) = -Omega_f(X, I Y)", link, tol.bound(link_scale));
  r.check("Omega_f antisymmetric", anti, tol.bound(inv_scale));
  if (space.target.flavor == Flavor::Kahler) r.flag("g_f(X, X) > 0 on trials", pd_ok, pd_worst, 0.0);
  return r;
}

std::vector<CompatibleTriple> ascending_targets(std::size_t levels, Flavor flavor) {
  Matrix i2(2, 2), g2(2, 2);
  if (flavor == Flavor::Kahler) {
    i2 << 0, -1, 1, 0;
    g2.setIdentity();
  } else {
    i2 << 0, 1, 1, 0;
    g2 << 1, 0, 0, -1;
  }
  const Matrix w2 = i2.transpose() * g2;
  std::vector<CompatibleTriple> out;
  for (std::size_t k = 1; k <= levels; ++k) {
    const Index d = 2 * static_cast<Index>(k);
    CompatibleTriple t{flavor, Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d)};
    for (Index b = 0; b < d; b += 2) {
      t.omega.block(b, b, 2, 2) = w2;
      t.g.block(b, b, 2, 2) = g2;
      t.structure.block(b, b, 2, 2) = i2;
    }
    out.push_back(std::move(t));
  }
  return out;
}

Report ascending_coherence(const std::vector<CompatibleTriple>& targets, Index samples, int trials, std::uint64_t seed,
                           const Tolerance& tol) {
  tol.validate();
  if (targets.empty()) throw Error(ErrorCode::ShapeMismatch, "need at least one target level");
  std::vector<Index> dims;
  for (const auto& t : targets) dims.push_back(t.g.rows());
  const BondingSystem bonding = BondingSystem::padded(dims, Variance::Direct);

  Report r;
  r.title = "ascending loop spaces, " + std::to_string(targets.size()) + " levels, N = " + std::to_string(samples);
  CoherentSequence omega{bonding, TensorKind::Form, {}};
  CoherentSequence metric{bonding, TensorKind::Form, {}};
  CoherentSequence structure{bonding, TensorKind::Endomorphism, {}};
  for (const auto& t : targets) {
    omega.levels.push_back(t.omega);
    metric.levels.push_back(t.g);
    structure.levels.push_back(t.structure);
  }
  r.merge(check_coherent(omega, tol), "Omega");
  r.merge(check_coherent(metric, tol), "g");
  r.merge(check_coherent(structure, tol), "I");

  std::vector<DiscretizedLoopSpace> spaces;
  for (const auto& t : targets) spaces.push_back(DiscretizedLoopSpace::uniform(t, samples));
  std::uint64_t state = seed;
  for (std::size_t i = 0; i < spaces.size(); ++i)
    for (std::size_t j = i + 1; j < spaces.size(); ++j) {
      const Index di = dims[i], dj = dims[j];
      double w_res = 0.0, g_res = 0.0, i_res = 0.0, scale = 0.0;
      for (int t = 0; t < trials; ++t) {
        const Matrix x = random_tangent_array(samples, di, state);
        const Matrix y = random_tangent_array(samples, di, state);
        const InducedForms low = induced_forms(spaces[i], x, y);
        const InducedForms high = induced_forms(spaces[j], include_array(x, dj), include_array(y, dj));
        w_res = std::max(w_res, std::abs(high.omega - low.omega));
        g_res = std::max(g_res, std::abs(high.g - low.g));
        i_res = std::max(i_res, frobenius(high.structure_x - include_array(low.structure_x, dj)));
        scale = std::max({scale, std::abs(low.omega), std::abs(low.g), frobenius(low.structure_x)});
      }
      const std::string where = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      r.check("Omega_f coherence " + where, w_res, tol.bound(scale), where);
      r.check("g_f coherence " + where, g_res, tol.bound(scale), where);
      r.check("I_f coherence " + where, i_res, tol.bound(scale), where);
    }
  return r;
}

LoopDemo loopspace_demo(std::size_t levels, Index samples, std::uint64_t seed, Flavor flavor, const Tolerance& tol) {
  const auto targets = ascending_targets(levels, flavor);
  LoopDemo demo;
  const auto space = DiscretizedLoopSpace::uniform(targets.back(), samples);
  demo.compatibility = check_induced_compatibility(space, 16, seed, tol);
  demo.coherence = ascending_coherence(targets, samples, 16, seed ^ 0x9e3779b97f4a7c15ULL, tol);
  return demo;
}

}  // namespace gstruct
