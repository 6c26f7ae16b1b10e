#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "geoprobe/pipeline.hpp"

using namespace geoprobe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("geoprobe_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::json desk_config(std::size_t dim, std::size_t hidden, std::size_t epochs) {
  return {{"builder", {{"samples_per_type", 400}, {"triplet_quota", 40}, {"location_objects", 20}}},
          {"encoder", {{"dim", dim}}},
          {"hyperparams", {{"hidden", hidden}, {"max_epochs", epochs}, {"patience", std::min<std::size_t>(10, epochs)}}}};
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
  const fs::path p = dir / "config.json";
  write_json(p, j);
  return p;
}

const std::vector<std::pair<TaskId, std::string>> kAllRuns{
    {TaskId::T1, "default"},      {TaskId::T2, "default"},
    {TaskId::T2, "polygon_only"}, {TaskId::T3, "default"},
    {TaskId::T4, "without_geometry_type"}, {TaskId::T4, "with_geometry_type"},
    {TaskId::T5, "default"},      {TaskId::T5, "disjoint_only"},
    {TaskId::T6, "default"}};

/// generate -> truth -> encode(reference) -> run every variant -> report.
fs::path full_pipeline(const fs::path& root, const nlohmann::json& cfg) {
  const fs::path data = root / "data", reports = root / "reports";
  cmd_generate(write_config(root, cfg), data);
  cmd_truth(data);
  cmd_encode(data, {"reference", "", {}});
  for (const auto& [task, variant] : kAllRuns) cmd_run(data, {task, variant, 7, reports, {}});
  cmd_report(reports);
  return reports;
}

}  // namespace

TEST(PipelineConfig, JsonRoundTripAndDefaults) {
  PipelineConfig c;
  c.builder.samples_per_type = 12;
  c.encoder.reference.dim = 32;
  c.hp.hidden = 9;
  c.k = 3;
  c.sources.push_back({"a.wkt", "wkt", "osm"});
  const auto back = pipeline_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(to_json(pipeline_config_from_json(nlohmann::json::object())), to_json(PipelineConfig{}));
}

TEST(PipelineConfig, RejectsBadValues) {
  EXPECT_THROW(pipeline_config_from_json(nlohmann::json::array()), ConfigError);
  EXPECT_THROW(pipeline_config_from_json({{"encoder", {{"kind", "word2vec"}}}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json({{"encoder", {{"window", 4}, {"overlap", 4}}}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json({{"hyperparams", {{"patience", 200}}}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json({{"builder", {{"split_ratios", {0.5, 0.5, 0.5}}}}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json({{"hyperparams", {{"hidden", "wide"}}}}), ConfigError);
  EXPECT_THROW(pipeline_config_from_json({{"sources", {{{"path", "x"}, {"format", "shp"}}}}}), ConfigError);
}

TEST(PipelineConfig, SampleConfigsParse) {
  for (const char* name : {"config.json", "desk.json"}) {
    const auto path = fs::path(GEOPROBE_SAMPLES_DIR) / name;
    EXPECT_NO_THROW(pipeline_config_from_json(read_json(path))) << name;
  }
  EXPECT_EQ(to_json(pipeline_config_from_json(read_json(fs::path(GEOPROBE_SAMPLES_DIR) / "config.json"))),
            to_json(PipelineConfig{}));
}

TEST(Pipeline, CommandErrors) {
  const auto root = scratch("errors");
  EXPECT_THROW(cmd_generate(root / "missing.json", root / "out"), ConfigError);
  std::ofstream(root / "broken.json") << "{ not json";
  EXPECT_THROW(cmd_generate(root / "broken.json", root / "out"), ConfigError);
  EXPECT_THROW(cmd_truth(root / "nowhere"), DataError);
  EXPECT_THROW(cmd_report(root / "nowhere"), DataError);
  EXPECT_THROW(cmd_report(root), DataError);
}

TEST(Pipeline, EndToEndSmallRun) {
  const auto root = scratch("small");
  const fs::path data = root / "data";
  const auto n = cmd_generate(write_config(root, desk_config(32, 16, 3)), data);
  EXPECT_EQ(n, 3u * 400u + 3u * 40u);
  const auto truth = cmd_truth(data);
  EXPECT_GT(truth.triplets, 0u);
  EXPECT_GT(truth.queries, 0u);
  for (int t = 1; t <= 6; ++t) EXPECT_TRUE(fs::exists(DataPaths{data}.task(static_cast<TaskId>(t))));
  const auto manifest = read_json(DataPaths{data}.manifest());
  EXPECT_EQ(manifest.at("records").get<std::size_t>(), n);
  EXPECT_TRUE(manifest.at("build").contains("warnings"));

  const auto first = cmd_encode(data, {"reference", "", {}});
  EXPECT_EQ(first.added, n + truth.queries);
  EXPECT_EQ(cmd_encode(data, {"reference", "", {}}).added, 0u);

  // A cache from a different encoder is refused.
  auto other = pipeline_config_from_json(read_json(DataPaths{data}.config()));
  other.encoder.reference.dim = 16;
  write_json(DataPaths{data}.config(), to_json(other));
  EXPECT_THROW(cmd_encode(data, {"reference", "", {}}), DataError);
  other.encoder.reference.dim = 32;
  write_json(DataPaths{data}.config(), to_json(other));

  const fs::path reports = root / "reports";
  for (const auto& [task, variant] : kAllRuns) {
    const auto r = cmd_run(data, {task, variant, 1, reports, {}});
    EXPECT_EQ(r.task, task);
    EXPECT_EQ(r.variant, variant);
    EXPECT_EQ(r.encoder(), first.encoder_id);
  }
  EXPECT_THROW(cmd_run(data, {TaskId::T1, "polygon_only", 1, reports, {}}), ConfigError);
  EXPECT_THROW(cmd_run(data, {TaskId::T1, "default", 1, reports, root / "none.cache"}), DataError);

  const auto doc = cmd_report(reports);
  EXPECT_EQ(doc.results.size(), kAllRuns.size());
  EXPECT_EQ(reports_from_json(read_json(reports / "results.json")).size(), kAllRuns.size());
  EXPECT_TRUE(fs::exists(reports / "results.md"));
  const auto model = load_checkpoint(reports / ("t1-default-" + first.encoder_id + ".model.json"));
  EXPECT_EQ(model.classes.size(), 3u);
}

TEST(Pipeline, ProviderFailuresAreProviderErrors) {
  const auto root = scratch("provider");
  const fs::path data = root / "data";
  auto cfg = desk_config(16, 8, 2);
  cfg["builder"]["samples_per_type"] = 20;
  cfg["builder"]["triplet_quota"] = 2;
  cmd_generate(write_config(root, cfg), data);
  EXPECT_THROW(cmd_encode(data, {"provider", "http://127.0.0.1:9", {}}), ProviderError);
}

TEST(Pipeline, SourcesAreSampledPerType) {
  const auto root = scratch("sources");
  std::vector<GeometryRecord> records;
  for (int i = 0; i < 30; ++i) {
    const double x = -89.45 + 0.001 * i;
    records.push_back({"p" + std::to_string(i), parse_wkt("POINT (" + std::to_string(x) + " 43.08)"), ""});
    records.push_back({"l" + std::to_string(i),
                       parse_wkt("LINESTRING (" + std::to_string(x) + " 43.07, " + std::to_string(x) + " 43.071)"), ""});
  }
  records.push_back({"far", parse_wkt("POINT (10 10)"), ""});
  write_records(root / "in.wkt", records);
  auto cfg = desk_config(16, 8, 2);
  cfg["builder"]["samples_per_type"] = 10;
  cfg["builder"]["triplet_quota"] = 3;
  cfg["sources"] = {{{"path", "in.wkt"}, {"format", "wkt"}, {"source", "fixture"}}};
  const auto n = cmd_generate(write_config(root, cfg), root / "data");
  EXPECT_EQ(n, 10u + 10u + 3u + 3u);
  const auto out = read_records(DataPaths{root / "data"}.geometries());
  for (const auto& r : out) {
    EXPECT_NE(r.id, "far");
    EXPECT_TRUE(r.source == "fixture" || r.source == "duplicate");
  }
  EXPECT_EQ(cmd_generate(write_config(root, cfg), root / "again"), n);
  EXPECT_EQ(slurp(root / "data" / "geometries.wkt"), slurp(root / "again" / "geometries.wkt"));
}

TEST(Pipeline, RepeatedRunsWriteIdenticalResults) {
  const auto a = full_pipeline(scratch("det_a"), desk_config(32, 16, 4));
  const auto b = full_pipeline(scratch("det_b"), desk_config(32, 16, 4));
  EXPECT_EQ(slurp(a / "results.json"), slurp(b / "results.json"));
  EXPECT_EQ(slurp(a / "results.md"), slurp(b / "results.md"));
}

// With the reference encoder the geometry type is already a token of the
// input, so the one-hot type features must not hurt the predicate probe.
TEST(Pipeline, GeometryTypeFeaturesDoNotHurtPredicateAccuracy) {
  const auto root = scratch("t4trend");
  const fs::path data = root / "data";
  cmd_generate(write_config(root, desk_config(768, 256, 100)), data);
  cmd_truth(data);
  cmd_encode(data, {"reference", "", {}});
  const auto without = cmd_run(data, {TaskId::T4, "without_geometry_type", 1, root / "r", {}});
  const auto with = cmd_run(data, {TaskId::T4, "with_geometry_type", 1, root / "r", {}});
  EXPECT_GE(with.test, without.test);
  EXPECT_EQ(with.metadata.at("input_dim").get<std::size_t>(), without.metadata.at("input_dim").get<std::size_t>() + 6);
}
