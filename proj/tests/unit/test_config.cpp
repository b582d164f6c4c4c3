#include <colorgpt/config.hpp>
#include <colorgpt/errors.hpp>
#include <gtest/gtest.h>

#include <fstream>

#include "test_support.hpp"

using namespace colorgpt;
using nlohmann::json;
using colorgpt::testing::TempDir;

TEST(RunConfig, Defaults) {
  const auto c = RunConfig::from_json(json::object());
  EXPECT_EQ(c.task, PromptConfig::Task::Completion);
  EXPECT_EQ(c.mask_counts, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(c.llm.kind, LlmProviderConfig::Kind::Mock);
  const auto arms = c.resolved_arms();
  ASSERT_EQ(arms.size(), 1u);
  EXPECT_EQ(arms[0].name, "default");
  const auto g = RunConfig::from_json(json{{"task", "generation"}});
  EXPECT_EQ(g.prompt.task, PromptConfig::Task::Generation);
  EXPECT_EQ(g.prompt.representation, Representation::parse("wordhex-h"));
}

TEST(RunConfig, UnknownKeysRejected) {
  for (const auto& j : {json{{"corpuss", "x"}}, json{{"llm", {{"modle", "x"}}}}, json{{"mock", {{"colour", "x"}}}},
                        json{{"prompt", {{"style", "x"}}}}, json{{"arms", {{{"name", "a"}, {"temp", 1}}}}},
                        json{{"metrics", {{"p", 1}}}}}) {
    EXPECT_THROW(RunConfig::from_json(j), ValidationError) << j.dump();
  }
}

TEST(RunConfig, BadValues) {
  EXPECT_THROW(RunConfig::from_json(json{{"task", "ranking"}}), ValidationError);
  EXPECT_THROW(RunConfig::from_json(json{{"seed", "zero"}}), ValidationError);
  EXPECT_THROW(RunConfig::from_json(json{{"mock", {{"fixed_color", "#12"}}}}), ValidationError);
  EXPECT_THROW(RunConfig::from_json(json{{"mock", {{"fixed_palette", {"#000000"}}}}}), ValidationError);
  EXPECT_THROW(RunConfig::from_json(json{{"prompt", {{"representation", "hsv"}}}}), ValidationError);
  EXPECT_THROW(RunConfig::from_json(json{{"arms", {{{"task", "generation"}}}}}), ValidationError);
  EXPECT_THROW(RunConfig::from_json(json{{"arms", {{{"name", "a"}}, {{"name", "a"}}}}}), ValidationError);
  auto c = RunConfig::from_json(json{{"mask_counts", {1, 4}}});
  c.corpus = colorgpt::testing::fixture("corpus.jsonl");
  c.manifest = colorgpt::testing::fixture("split.json");
  EXPECT_THROW(c.validate(), ValidationError);
  c.mask_counts = {1};
  EXPECT_NO_THROW(c.validate());
  c.parallel = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(RunConfig, ValidateNeedsInputs) {
  auto c = RunConfig::from_json(json::object());
  EXPECT_THROW(c.validate(), ValidationError);
  c.corpus = "/nonexistent/corpus.jsonl";
  c.manifest = colorgpt::testing::fixture("split.json");
  EXPECT_THROW(c.validate(), ValidationError);
  auto g = RunConfig::from_json(json{{"task", "generation"}});
  EXPECT_THROW(g.validate(), ValidationError);
}

TEST(RunConfig, RelativePathsResolveAgainstFile) {
  TempDir dir("config");
  std::filesystem::create_directories(dir / "cfg");
  std::ofstream(dir / "cfg" / "run.json") << R"({
    // comments are allowed
    "corpus": "../data/corpus.jsonl",
    "manifest": "/abs/split.json",
    "output_dir": "out",
    "mock": {"fixtures": "fx.json"}
  })";
  const auto c = RunConfig::load(dir / "cfg" / "run.json");
  EXPECT_EQ(c.corpus, (dir / "data" / "corpus.jsonl").lexically_normal());
  EXPECT_EQ(c.manifest, std::filesystem::path("/abs/split.json"));
  EXPECT_EQ(c.output_dir, (dir / "cfg" / "out").lexically_normal());
  EXPECT_EQ(c.mock.fixtures, (dir / "cfg" / "fx.json").lexically_normal());
  EXPECT_THROW(RunConfig::load(dir / "missing.json"), IoError);
  std::ofstream(dir / "bad.json") << "{";
  EXPECT_THROW(RunConfig::load(dir / "bad.json"), ParseError);
}

TEST(RunConfig, MatrixExpandsCartesianProduct) {
  const auto c = RunConfig::from_json(
      json::parse(R"({"matrix": {"representation": ["hex", "cielab"], "profile": ["short", "long"]}})"));
  ASSERT_EQ(c.arms.size(), 4u);
  std::set<std::string> names;
  for (const auto& a : c.arms) names.insert(a.name);
  EXPECT_EQ(names, (std::set<std::string>{"default", "profile=long", "representation=cielab",
                                          "representation=cielab,profile=long"}));
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"matrix": {"profile": []}})")), ValidationError);
}

TEST(RunConfig, ShippedAblationConfigsLoad) {
  const auto dir = colorgpt::testing::config_path("").parent_path();
  const auto c = RunConfig::load(dir / "ablation_completion.json");
  EXPECT_EQ(c.arms.size(), 10u);
  EXPECT_NO_THROW(c.validate());
  const auto g = RunConfig::load(dir / "ablation_generation.json");
  EXPECT_EQ(g.task, PromptConfig::Task::Generation);
  EXPECT_NO_THROW(g.validate());
}

TEST(RunConfig, ToJsonHasNoSecrets) {
  auto c = RunConfig::from_json(json::object());
  c.llm.api_key = "sk-secret";
  EXPECT_EQ(c.to_json().dump().find("sk-secret"), std::string::npos);
  EXPECT_EQ(c.to_json()["llm"]["mock_mode"], "echo");
}

TEST(ArmName, DerivedFromDifferences) {
  PromptConfig base;
  PromptConfig arm = base;
  EXPECT_EQ(arm_name(arm, base), "default");
  arm.representation = Representation::parse("cielab");
  arm.profile = PromptConfig::Profile::Long;
  EXPECT_EQ(arm_name(arm, base), "representation=cielab,profile=long");
  arm = base;
  arm.exemplar_count = 2;
  EXPECT_EQ(arm_name(arm, base), "exemplar_count=2");
  const auto c = RunConfig::from_json(json::parse(R"({"arms": [{"model": "m2"}, {"profile": "long", "model": "m2"}]})"));
  EXPECT_EQ(c.arms[0].name, "model=m2");
  EXPECT_EQ(c.arms[1].name, "profile=long,model=m2");
}
