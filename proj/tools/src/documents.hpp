#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gstruct/bundle.hpp"
#include "gstruct/calculus.hpp"
#include "gstruct/compat.hpp"
#include "gstruct/limits.hpp"

namespace gstruct::cli {

using Json = nlohmann::json;

// Malformed or incomplete input document; the tool maps it to exit status 2.
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json load_json(const std::string& path, std::string& raw);

Matrix to_matrix(const Json& j, const std::string& what);
Vector to_vector(const Json& j, const std::string& what);
std::vector<Vector> to_points(const Json& j, const std::string& what);
Json from_matrix(const Matrix& m);
Json from_vector(const Vector& v);

// { "kind", "dim", "matrix", optional "decomposition" }
struct StructureDocument {
  std::string kind;
  Index dim = 0;
  Matrix matrix;
  Json decomposition;
};

StructureDocument parse_structure(const Json& j);
Report validate_structure(const StructureDocument& doc, const Tolerance& tol);
Role role_of(const Json& j);

PartialTriple parse_pair(const Json& j);
Flavor parse_flavor(const std::string& s);

ChartAtlas parse_atlas(const Json& j);

struct FieldDocument {
  std::string kind;  // structure kind, or "metric"
  Index dim = 0;
  DerivativeMode mode = DerivativeMode::FiniteDifference;
  Grid grid;
  std::optional<TensorFieldOnChart> field;
};

// fd applies to sampled fields only.
FieldDocument parse_field(const Json& j, Role role, const FiniteDifference& fd);
StructureKind parse_structure_kind(const std::string& s);

struct TowerSequence {
  std::string name;
  CoherentSequence sequence;
};

struct TowerDocument {
  std::optional<BondingSystem> bonding;
  std::vector<TowerSequence> sequences;
  std::optional<ConnectionFormSequence> connection;
  std::vector<Vector> samples;
};

TowerDocument parse_tower(const Json& j, bool connection);

}  // namespace gstruct::cli
