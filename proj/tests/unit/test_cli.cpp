#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "documents.hpp"
#include "generators.hpp"

using namespace gstruct;
using Json = nlohmann::json;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string example(const std::string& name) { return std::string(GSTRUCT_EXAMPLES_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("gstruct_test_" + name);
  std::ofstream(path) << contents;
  return path.string();
}

}  // namespace

TEST(Cli, ExampleExitCodes) {
  const std::vector<std::pair<std::vector<std::string>, int>> cases = {
      {{"validate", example("complex_can.json")}, 0},
      {{"validate", example("symplectic.json")}, 0},
      {{"triple", "complete", example("pair_kahler.json")}, 0},
      {{"darboux", example("symplectic.json")}, 0},
      {{"cocycle", example("atlas.json")}, 0},
      {{"reduce", example("atlas.json"), example("complex_tensor.json")}, 0},
      {{"nijenhuis", example("para_pullback.json")}, 0},
      {{"nijenhuis", example("para_polynomial.json")}, 0},
      {{"nijenhuis", example("para_twisted.json")}, 1},
      {{"curvature", example("flat_metric.json")}, 0},
      {{"curvature", example("sphere.json")}, 1},
      {{"tower", "check", example("tower.json")}, 0},
      {{"connection", "check", example("connection.json")}, 0},
      {{"loopspace", "demo"}, 0},
      {{"loopspace", "demo", "--levels", "2", "--samples", "8", "--flavor", "para_kahler"}, 0},
  };
  for (const auto& [args, want] : cases) {
    const Invocation r = invoke(args);
    EXPECT_EQ(r.code, want) << args[0] << " " << args.back() << "\n" << r.out << r.err;
    EXPECT_NE(r.out.find(want == 0 ? "status: pass" : "status: fail"), std::string::npos);
  }
}

TEST(Cli, TripleCompleteEmitsCanonicalStructure) {
  const Invocation r = invoke({"--json", "triple", "complete", example("pair_kahler.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  const Matrix structure = cli::to_matrix(j["result"]["triple"]["structure"], "structure");
  EXPECT_LT((structure - canonical_complex(2)).norm(), 1e-15);
  EXPECT_EQ(j["status"], "pass");
  EXPECT_EQ(j["exit_code"], 0);
}

TEST(Cli, SphereCurvatureMatchesExpectation) {
  const Invocation r = invoke({"--json", "curvature", example("sphere.json")});
  ASSERT_EQ(r.code, 1);
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["result"]["sectional_curvature"]["min"].get<double>(), 1.0, 1e-4);
  EXPECT_NEAR(j["result"]["sectional_curvature"]["max"].get<double>(), 1.0, 1e-4);
}

TEST(Cli, ParseErrorsExitTwo) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"validate"}).code, 2);
  EXPECT_EQ(invoke({"validate", "/nonexistent/structure.json"}).code, 2);
  EXPECT_EQ(invoke({"validate", temp_file("broken.json", "{\"kind\": ")}).code, 2);
  EXPECT_EQ(invoke({"validate", temp_file("nokind.json", "{\"matrix\": [[1]]}")}).code, 2);
  EXPECT_EQ(invoke({"validate", temp_file("ragged.json", "{\"kind\": \"tangent\", \"matrix\": [[0, 1], [0]]}")}).code, 2);
  EXPECT_EQ(invoke({"--atol", "-1", "loopspace", "demo"}).code, 2);
  EXPECT_EQ(invoke({"--atol", "0", "--rtol", "0", "loopspace", "demo"}).code, 2);
  EXPECT_EQ(invoke({"--fd-step", "0", "loopspace", "demo"}).code, 2);
  EXPECT_EQ(invoke({"--json", "loopspace", "demo"}).code, 2);
}

TEST(Cli, FailingChecksExitOne) {
  const std::string bad = temp_file("bad_complex.json", R"({"kind": "complex", "dim": 2, "matrix": [[1, 0], [0, 1]]})");
  const Invocation r = invoke({"validate", bad});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  const Invocation t = invoke({"--atol", "1e-30", "--rtol", "1e-30", "nijenhuis", example("para_pullback.json")});
  EXPECT_EQ(t.code, 1);
}

TEST(Cli, DeterministicBytes) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"--json", "--seed", "7", "loopspace", "demo"},
           {"--seed", "7", "connection", "check", example("connection.json")},
           {"--json", "curvature", example("sphere.json")},
           {"cocycle", example("atlas.json")}}) {
    const Invocation a = invoke(args), b = invoke(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.code, b.code);
  }
  const Invocation s7 = invoke({"--json", "--seed", "7", "loopspace", "demo"});
  const Invocation s8 = invoke({"--json", "--seed", "8", "loopspace", "demo"});
  EXPECT_NE(Json::parse(s7.out)["inputs_digest"], Json::parse(s8.out)["inputs_digest"]);
}

TEST(Cli, JsonReportRoundTripsResiduals) {
  // Residuals in the emitted report equal the ones computed directly, bit for bit.
  const std::string path = example("complex_can.json");
  const Invocation r = invoke({"--json", "validate", path});
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  std::string raw;
  const Report direct = cli::validate_structure(cli::parse_structure(cli::load_json(path, raw)), Tolerance{});
  const Json& entries = j["reports"][0]["entries"];
  ASSERT_EQ(entries.size(), direct.entries.size());
  for (std::size_t k = 0; k < direct.entries.size(); ++k) {
    EXPECT_EQ(entries[k]["name"], direct.entries[k].name);
    EXPECT_EQ(entries[k]["residual"].get<double>(), direct.entries[k].residual);
    EXPECT_EQ(entries[k]["threshold"].get<double>(), direct.entries[k].threshold);
  }
  // Dump and parse again: still identical.
  const Json again = Json::parse(j.dump());
  EXPECT_EQ(again, j);
  const Invocation curv = invoke({"--json", "curvature", example("sphere.json")});
  const Json c = Json::parse(curv.out);
  EXPECT_EQ(Json::parse(c.dump(2)), c);
  EXPECT_EQ(c["reports"][0]["entries"][0]["residual"].get<double>(),
            Json::parse(c.dump())["reports"][0]["entries"][0]["residual"].get<double>());
}

TEST(Cli, JsonFieldsPresent) {
  const Invocation r = invoke({"--json", "--seed", "3", "tower", "check", example("tower.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  for (const char* key : {"command", "inputs_digest", "tolerance", "fd_step", "seed", "reports", "status", "exit_code"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["command"], "tower check");
  EXPECT_EQ(j["reports"].size(), 3u);
}

TEST(Cli, DomainErrorsAreReportedAsFailures) {
  const std::string singular = temp_file(
      "singular_pair.json", R"({"flavor": "kahler", "metric": [[1, 0], [0, 1]], "omega": [[0, 0], [0, 0]]})");
  const Invocation r = invoke({"--json", "triple", "complete", singular});
  EXPECT_EQ(r.code, 1);
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["error"].is_string());
  EXPECT_EQ(j["status"], "fail");
}
