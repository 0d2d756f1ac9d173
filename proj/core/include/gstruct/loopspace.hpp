#pragma once

#include <cstdint>

#include "gstruct/compat.hpp"

namespace gstruct {

// Maps from N sample points of the circle into a constant-coefficient target R^{2m}.
// Tangent vectors at a loop are N x 2m arrays, one target vector per sample.
struct DiscretizedLoopSpace {
  CompatibleTriple target;
  Vector weights;  // quadrature weights, positive, summing to 1
  Matrix loop;     // N x 2m

  // Uniform weights 1/N (the trapezoid rule on the circle) and the loop t -> (cos 2 pi t, sin 2 pi t, 0, ...).
  static DiscretizedLoopSpace uniform(CompatibleTriple target, Index samples);

  Index samples() const { return weights.size(); }
  Index target_dim() const { return target.g.rows(); }
  Report validate(const Tolerance& tol = {}) const;
};

struct InducedForms {
  double omega = 0.0;
  double g = 0.0;
  Matrix structure_x;  // the target structure applied to X at every sample
};

InducedForms induced_forms(const DiscretizedLoopSpace& space, const Matrix& x, const Matrix& y);

// Random integer-valued tangent arrays in [-4, 4], drawn from a seeded mt19937_64.
Matrix random_tangent_array(Index samples, Index dim, std::uint64_t& state);

Report check_induced_compatibility(const DiscretizedLoopSpace& space, int trials, std::uint64_t seed,
                                   const Tolerance& tol = {});

// Levels R^2, R^4, ..., R^{2k}: the 2x2 canonical block repeated along the diagonal.
std::vector<CompatibleTriple> ascending_targets(std::size_t levels, Flavor flavor);

Report ascending_coherence(const std::vector<CompatibleTriple>& targets, Index samples, int trials, std::uint64_t seed,
                           const Tolerance& tol = {});

struct LoopDemo {
  Report compatibility;
  Report coherence;
  bool passed() const { return compatibility.passed() && coherence.passed(); }
};

LoopDemo loopspace_demo(std::size_t levels, Index samples, std::uint64_t seed, Flavor flavor = Flavor::Kahler,
                        const Tolerance& tol = {});

}  // namespace gstruct
