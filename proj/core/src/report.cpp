#include "gstruct/report.hpp"

#include <algorithm>
#include <cmath>

#include "gstruct/error.hpp"

namespace gstruct {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidDecomposition: return "InvalidDecomposition";
    case ErrorCode::InvalidStructure: return "InvalidStructure";
    case ErrorCode::MissingDecomposition: return "MissingDecomposition";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::IncompatibleInputs: return "IncompatibleInputs";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::NotInvolutive: return "NotInvolutive";
    case ErrorCode::InvalidTriple: return "InvalidTriple";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::InvalidStructureAtPoint: return "InvalidStructureAtPoint";
    case ErrorCode::DegenerateMetricAtPoint: return "DegenerateMetricAtPoint";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MissingProjection: return "MissingProjection";
    case ErrorCode::IncoherentSequence: return "IncoherentSequence";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NotMember: return "NotMember";
    case ErrorCode::InvalidTolerance: return "InvalidTolerance";
  }
  return "Unknown";
}

CheckEntry& Report::check(std::string name, double residual, double threshold, std::string location) {
  // NaN residuals never pass.
  bool ok = std::isfinite(residual) && residual <= threshold;
  entries.push_back({std::move(name), ok, residual, threshold, std::move(location)});
  return entries.back();
}

CheckEntry& Report::flag(std::string name, bool pass, double residual, double threshold,
                         std::string location) {
  entries.push_back({std::move(name), pass, residual, threshold, std::move(location)});
  return entries.back();
}

void Report::merge(const Report& other, const std::string& prefix) {
  for (const auto& e : other.entries) {
    CheckEntry copy = e;
    if (!prefix.empty()) copy.name = prefix + ": " + copy.name;
    entries.push_back(std::move(copy));
  }
  for (const auto& n : other.notes) notes.push_back(prefix.empty() ? n : prefix + ": " + n);
}

bool Report::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.pass; });
}

double Report::max_residual() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.residual);
  return m;
}

const CheckEntry* Report::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

const CheckEntry* Report::worst() const {
  const CheckEntry* w = nullptr;
  for (const auto& e : entries) {
    if (!w || (!e.pass && w->pass) || (e.pass == w->pass && e.residual > w->residual)) w = &e;
  }
  return w;
}

}  // namespace gstruct
