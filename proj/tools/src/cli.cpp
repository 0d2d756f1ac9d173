#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "documents.hpp"
#include "gstruct/error.hpp"
#include "gstruct/loopspace.hpp"

namespace gstruct::cli {

namespace {

struct Settings {
  double atol = 1e-9;
  double rtol = 1e-9;
  std::optional<double> fd_step;
  bool json = false;
  std::optional<std::uint64_t> seed;

  Tolerance tol() const { return {atol, rtol}; }
  FiniteDifference fd() const { return fd_step ? FiniteDifference::with_step(*fd_step) : FiniteDifference{}; }
};

// Everything a subcommand hands back for printing.
struct Outcome {
  std::vector<Report> reports;
  Json result = Json::object();
  std::optional<std::string> error;

  bool passed() const {
    if (error) return false;
    for (const auto& r : reports)
      if (!r.passed()) return false;
    return true;
  }
};

std::uint64_t fnv1a(std::uint64_t h, const std::string& bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Json to_json(const Report& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"name", e.name},
                       {"pass", e.pass},
                       {"residual", e.residual},
                       {"threshold", e.threshold},
                       {"location", e.location}});
  return {{"title", r.title}, {"entries", entries}, {"notes", r.notes}, {"pass", r.passed()}};
}

void print_text(std::ostream& out, const std::string& command, const std::string& digest, const Outcome& o) {
  out << command << "\ninputs digest: " << digest << "\n";
  for (const auto& r : o.reports) {
    out << "[" << r.title << "]\n";
    for (const auto& e : r.entries) {
      out << "  " << (e.pass ? "PASS" : "FAIL") << "  " << e.name << "  residual=" << fmt(e.residual)
          << " threshold=" << fmt(e.threshold);
      if (!e.location.empty()) out << "  at " << e.location;
      out << "\n";
    }
    for (const auto& n : r.notes) out << "  note: " << n << "\n";
  }
  if (o.error) out << "error: " << *o.error << "\n";
  if (!o.result.empty()) out << "result: " << o.result.dump() << "\n";
  out << "status: " << (o.passed() ? "pass" : "fail") << "\n";
}

Report verdict_report(const Verdict& v, const std::string& title) {
  Report r;
  r.title = title;
  std::string where;
  for (Index i = 0; i < v.worst_point.size(); ++i) where += (i ? "," : "(") + fmt(v.worst_point(i));
  if (!where.empty()) where += ")";
  r.flag(v.label, v.holds, v.max_residual, v.threshold, where);
  if (v.discretization_estimate > 0.0) r.note("discretization estimate " + fmt(v.discretization_estimate));
  return r;
}

Json triple_json(const CompatibleTriple& t) {
  return {{"flavor", t.flavor == Flavor::Kahler ? "kahler" : "para_kahler"},
          {"omega", from_matrix(t.omega)},
          {"metric", from_matrix(t.g)},
          {"structure", from_matrix(t.structure)}};
}

std::vector<Vector> random_points(Index dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    Vector x(dim);
    for (Index i = 0; i < dim; ++i) x(i) = u(rng);
    out.push_back(x);
  }
  return out;
}

// Document-level failures of the core (unknown chart names, bad shapes) count as input errors.
template <typename F>
auto parse_stage(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw DocumentError(e.what());
  }
}

Outcome cmd_validate(const Json& doc, const Settings& s) {
  const StructureDocument d = parse_stage([&] { return parse_structure(doc); });
  Outcome o;
  o.reports.push_back(parse_stage([&] { return validate_structure(d, s.tol()); }));
  return o;
}

Outcome cmd_triple(const Json& doc, const Settings& s) {
  const PartialTriple p = parse_stage([&] { return parse_pair(doc); });
  Outcome o;
  const Completion c = complete_triple(p, s.tol());
  o.reports.push_back(c.report);
  o.result["triple"] = triple_json(c.triple);
  if (c.metric_signature)
    o.result["metric_signature"] = {c.metric_signature->positive, c.metric_signature->negative};
  return o;
}

Outcome cmd_darboux(const Json& doc, const Settings& s) {
  const Matrix m = parse_stage([&] { return to_matrix(doc.contains("matrix") ? doc.at("matrix") : doc, "form"); });
  Outcome o;
  Report pre = validate(SymplecticForm{m}, s.tol());
  o.reports.push_back(pre);
  if (!pre.passed()) return o;
  const DarbouxBasis b = darboux_basis(m, s.tol());
  Report r;
  r.title = "Darboux basis";
  const double a = frobenius(b.basis);
  r.check("A^T S A = [[0, Id], [-Id, 0]]", b.residual, s.tol().bound(frobenius(m) * a * a));
  o.reports.push_back(r);
  o.result["basis"] = from_matrix(b.basis);
  return o;
}

Outcome cmd_cocycle(const Json& doc, const Settings& s) {
  const ChartAtlas atlas = parse_stage([&] { return parse_atlas(doc); });
  Outcome o;
  o.reports.push_back(check_cocycle(atlas, s.tol()));
  return o;
}

MatrixField tensor_field(const Json& j, Index dim) {
  AffineMatrixField f;
  if (j.contains("constant"))
    f = AffineMatrixField::constant(to_matrix(j.at("constant"), "per_chart.constant"));
  else if (j.contains("affine_field"))
    for (const auto& t : j.at("affine_field")) f.terms.push_back(to_matrix(t, "per_chart.affine_field"));
  else
    throw DocumentError("per_chart entries need \"constant\" or \"affine_field\"");
  for (const auto& m : f.terms)
    if (m.rows() != dim || m.cols() != dim) throw DocumentError("per_chart matrices must be dim x dim");
  return f;
}

Outcome cmd_reduce(const Json& atlas_doc, const Json& tensor_doc, const Settings& s) {
  const ChartAtlas atlas = parse_stage([&] { return parse_atlas(atlas_doc); });
  const Role role = parse_stage([&] { return role_of(tensor_doc); });
  if (!tensor_doc.contains("matrix")) throw DocumentError("tensor: missing field \"matrix\"");
  const Matrix model = parse_stage([&] { return to_matrix(tensor_doc.at("matrix"), "tensor.matrix"); });
  if (model.rows() != atlas.fiber_dim() || model.cols() != atlas.fiber_dim())
    throw DocumentError("tensor matrix must match the atlas fiber dimension");
  const IsotropyGroupSpec spec{{model, role}};
  Outcome o;
  o.reports.push_back(check_reduction(atlas, spec, s.tol()));
  if (tensor_doc.contains("per_chart")) {
    LocalTensorField field{role, {}};
    for (const auto& [name, entry] : tensor_doc.at("per_chart").items())
      field.per_chart[name] = tensor_field(entry, atlas.fiber_dim());
    o.reports.push_back(check_locally_modelled(field, atlas, spec, s.tol()));
  }
  return o;
}

Outcome cmd_nijenhuis(const Json& doc, const Settings& s) {
  if (!doc.contains("kind")) throw DocumentError("field: missing field \"kind\"");
  const StructureKind kind = parse_stage([&] { return parse_structure_kind(doc.at("kind").get<std::string>()); });
  const FieldDocument d = parse_stage([&] { return parse_field(doc, Role::Endomorphism, s.fd()); });
  Outcome o;
  const Verdict v = is_integrable_structure(*d.field, kind, d.grid, s.tol());
  o.reports.push_back(verdict_report(v, to_string(kind) + " structure field, " + to_string(d.mode) + " derivatives"));
  return o;
}

Outcome cmd_curvature(const Json& doc, const Settings& s) {
  const FieldDocument d = parse_stage([&] { return parse_field(doc, Role::SymmetricForm, s.fd()); });
  Outcome o;
  const Verdict v = is_metric_integrable(*d.field, d.grid, s.tol());
  Report r = verdict_report(v, "metric, " + to_string(d.mode) + " derivatives");
  if (d.dim >= 2) {
    const ConnectionData conn = levi_civita(*d.field, s.tol());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& x : d.grid.points()) {
      const double k = sectional_curvature(curvature(conn, x), d.field->value(x));
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
    r.note("sectional curvature of span(d_0, d_1) in [" + fmt(lo) + ", " + fmt(hi) + "]");
    o.result["sectional_curvature"] = {{"min", lo}, {"max", hi}};
    if (doc.contains("expect_sectional")) {
      const Json& e = doc.at("expect_sectional");
      if (!e.contains("value") || !e.contains("tolerance"))
        throw DocumentError("expect_sectional needs value and tolerance");
      const double want = e.at("value").get<double>();
      r.check("sectional curvature = " + fmt(want), std::max(std::abs(lo - want), std::abs(hi - want)),
              e.at("tolerance").get<double>());
    }
  }
  o.reports.push_back(r);
  return o;
}

Outcome cmd_tower(const Json& doc, const Settings& s) {
  const TowerDocument d = parse_stage([&] { return parse_tower(doc, false); });
  Outcome o;
  o.reports.push_back(validate_bonding(*d.bonding, s.tol()));
  for (const auto& seq : d.sequences) {
    Report r = check_coherent(seq.sequence, s.tol());
    r.title = seq.name + ": " + r.title;
    o.reports.push_back(r);
  }
  return o;
}

Outcome cmd_connection(const Json& doc, const Settings& s) {
  TowerDocument d = parse_stage([&] { return parse_tower(doc, true); });
  if (d.samples.empty()) {
    if (s.json && !s.seed) throw DocumentError("--json with generated sample points needs an explicit --seed");
    d.samples = random_points(d.bonding->dim(d.bonding->levels()), 20, s.seed.value_or(0));
  }
  Outcome o;
  o.reports.push_back(validate_bonding(*d.bonding, s.tol()));
  o.reports.push_back(check_connection_coherence(*d.connection, d.samples, s.tol()));
  return o;
}

Outcome cmd_loopspace(std::size_t levels, Index samples, const std::string& flavor, const Settings& s) {
  if (s.json && !s.seed) throw DocumentError("loopspace demo with --json needs an explicit --seed");
  if (levels == 0 || samples <= 0) throw DocumentError("--levels and --samples must be positive");
  const Flavor f = parse_flavor(flavor);
  Outcome o;
  const LoopDemo demo = loopspace_demo(levels, samples, s.seed.value_or(0), f, s.tol());
  o.reports.push_back(demo.compatibility);
  o.reports.push_back(demo.coherence);
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Checks and constructs linear and integrable geometric structures", "gstruct"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings s;
  app.add_option("--atol", s.atol, "absolute tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--rtol", s.rtol, "relative tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--fd-step", s.fd_step, "finite difference step")->check(CLI::PositiveNumber);
  app.add_flag("--json", s.json, "machine readable report");
  app.add_option("--seed", s.seed, "seed for randomized subcommands");

  std::string file, file2, flavor = "kahler";
  std::size_t levels = 3;
  Index samples = 16;
  auto* validate_cmd = app.add_subcommand("validate", "validate a structure document");
  validate_cmd->add_option("structure", file)->required();
  auto* triple_cmd = app.add_subcommand("triple", "compatible triples");
  triple_cmd->require_subcommand(1);
  auto* complete_cmd = triple_cmd->add_subcommand("complete", "complete a compatible pair");
  complete_cmd->add_option("pair", file)->required();
  auto* darboux_cmd = app.add_subcommand("darboux", "Darboux basis of a symplectic form");
  darboux_cmd->add_option("form", file)->required();
  auto* cocycle_cmd = app.add_subcommand("cocycle", "cocycle condition of an atlas");
  cocycle_cmd->add_option("atlas", file)->required();
  auto* reduce_cmd = app.add_subcommand("reduce", "reduction of an atlas to an isotropy group");
  reduce_cmd->add_option("atlas", file)->required();
  reduce_cmd->add_option("tensor", file2)->required();
  auto* nijenhuis_cmd = app.add_subcommand("nijenhuis", "integrability of a structure field");
  nijenhuis_cmd->add_option("field", file)->required();
  auto* curvature_cmd = app.add_subcommand("curvature", "flatness of a metric field");
  curvature_cmd->add_option("metric", file)->required();
  auto* tower_cmd = app.add_subcommand("tower", "towers of levels");
  tower_cmd->require_subcommand(1);
  auto* tower_check = tower_cmd->add_subcommand("check", "bonding maps and coherent sequences");
  tower_check->add_option("tower", file)->required();
  auto* connection_cmd = app.add_subcommand("connection", "connection form towers");
  connection_cmd->require_subcommand(1);
  auto* connection_check = connection_cmd->add_subcommand("check", "connection coherence and adaptedness");
  connection_check->add_option("tower", file)->required();
  auto* loop_cmd = app.add_subcommand("loopspace", "discretized loop spaces");
  loop_cmd->require_subcommand(1);
  auto* demo_cmd = loop_cmd->add_subcommand("demo", "induced structures on ascending loop spaces");
  demo_cmd->add_option("--levels", levels, "number of ascending targets")->check(CLI::PositiveNumber);
  demo_cmd->add_option("--samples", samples, "sample points on the circle")->check(CLI::PositiveNumber);
  demo_cmd->add_option("--flavor", flavor, "kahler or para_kahler");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  std::string command;
  std::string raw_inputs;
  Outcome o;
  try {
    s.tol().validate();
    std::string raw;
    auto load = [&](const std::string& path) {
      Json j = load_json(path, raw);
      raw_inputs += raw;
      return j;
    };
    if (validate_cmd->parsed()) {
      command = "validate";
      const Json doc = load(file);
      o = cmd_validate(doc, s);
    } else if (complete_cmd->parsed()) {
      command = "triple complete";
      const Json doc = load(file);
      o = cmd_triple(doc, s);
    } else if (darboux_cmd->parsed()) {
      command = "darboux";
      const Json doc = load(file);
      o = cmd_darboux(doc, s);
    } else if (cocycle_cmd->parsed()) {
      command = "cocycle";
      const Json doc = load(file);
      o = cmd_cocycle(doc, s);
    } else if (reduce_cmd->parsed()) {
      command = "reduce";
      const Json a = load(file);
      const Json t = load(file2);
      o = cmd_reduce(a, t, s);
    } else if (nijenhuis_cmd->parsed()) {
      command = "nijenhuis";
      const Json doc = load(file);
      o = cmd_nijenhuis(doc, s);
    } else if (curvature_cmd->parsed()) {
      command = "curvature";
      const Json doc = load(file);
      o = cmd_curvature(doc, s);
    } else if (tower_check->parsed()) {
      command = "tower check";
      const Json doc = load(file);
      o = cmd_tower(doc, s);
    } else if (connection_check->parsed()) {
      command = "connection check";
      const Json doc = load(file);
      o = cmd_connection(doc, s);
    } else if (demo_cmd->parsed()) {
      command = "loopspace demo";
      raw_inputs = "levels=" + std::to_string(levels) + ";samples=" + std::to_string(samples) + ";flavor=" + flavor;
      o = cmd_loopspace(levels, samples, flavor, s);
    }
  } catch (const DocumentError& e) {
    err << "gstruct: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    err << "gstruct: malformed document: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidTolerance) {
      err << "gstruct: " << e.what() << "\n";
      return 2;
    }
    o.error = e.what();
  }

  std::uint64_t h = 14695981039346656037ULL;
  h = fnv1a(h, command);
  h = fnv1a(h, raw_inputs);
  char settings[160];
  std::snprintf(settings, sizeof settings, "atol=%.17g;rtol=%.17g;fd=%.17g;seed=%llu", s.atol, s.rtol,
                s.fd_step.value_or(0.0), static_cast<unsigned long long>(s.seed.value_or(0)));
  h = fnv1a(h, settings);
  const std::string digest = hex(h);
  const int code = o.passed() ? 0 : 1;

  if (s.json) {
    Json j;
    j["command"] = command;
    j["inputs_digest"] = digest;
    j["tolerance"] = {{"atol", s.atol}, {"rtol", s.rtol}};
    j["fd_step"] = {{"step", s.fd().step}, {"second_step", s.fd().second_step}};
    if (s.seed) j["seed"] = *s.seed;
    j["reports"] = Json::array();
    for (const auto& r : o.reports) j["reports"].push_back(to_json(r));
    if (!o.result.empty()) j["result"] = o.result;
    if (o.error) j["error"] = *o.error;
    j["status"] = code == 0 ? "pass" : "fail";
    j["exit_code"] = code;
    out << j.dump(2) << "\n";
  } else {
    print_text(out, command, digest, o);
  }
  return code;
}

}  // namespace gstruct::cli
