#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "geoprobe/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kProvider = 3 };

}  // namespace

int main(int argc, char** argv) {
  using namespace geoprobe;
  CLI::App app{"Probe how well text embeddings of WKT geometries preserve geometry and spatial relations"};
  app.require_subcommand(1);

  std::string config, out, in, encoder = "reference", endpoint, cache, task, variant = "default";
  std::uint64_t seed = 0;

  auto* gen = app.add_subcommand("generate", "Build the geometry set from a config file");
  gen->add_option("--config", config, "JSON config")->required();
  gen->add_option("--out", out, "Data directory to create")->required();

  auto* truth = app.add_subcommand("truth", "Compute ground truth, triplets, queries and task splits");
  truth->add_option("--in", in, "Data directory")->required();

  auto* enc = app.add_subcommand("encode", "Embed geometries and query phrases into the cache");
  enc->add_option("--encoder", encoder, "reference or provider")->check(CLI::IsMember({"reference", "provider"}));
  enc->add_option("--endpoint", endpoint, "Provider base URL, e.g. http://127.0.0.1:8080");
  enc->add_option("--in", in, "Data directory")->required();
  enc->add_option("--cache", cache, "Embedding cache file (default <in>/embeddings.cache)");

  auto* run = app.add_subcommand("run", "Train and evaluate one task variant");
  run->add_option("--task", task, "t1..t6")->required()->check(CLI::IsMember({"t1", "t2", "t3", "t4", "t5", "t6"}));
  run->add_option("--variant", variant, "Task variant");
  run->add_option("--seed", seed, "Probe seed");
  run->add_option("--in", in, "Data directory")->required();
  run->add_option("--out", out, "Report directory")->required();
  run->add_option("--cache", cache, "Embedding cache file (default <in>/embeddings.cache)");

  auto* report = app.add_subcommand("report", "Collect task reports into results.json and a comparison table");
  report->add_option("--in", in, "Report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      const auto n = cmd_generate(config, out);
      std::cout << "generated " << n << " geometries in " << out << '\n';
    } else if (*truth) {
      const auto s = cmd_truth(in);
      std::cout << "records " << s.records << ", triplets " << s.triplets << ", queries " << s.queries << '\n';
      for (const auto& w : s.report.warnings) std::cerr << "warning: " << w << '\n';
    } else if (*enc) {
      if (encoder == "provider" && endpoint.empty()) throw ConfigError("--endpoint is required for the provider encoder");
      const auto s = cmd_encode(in, {encoder, endpoint, cache});
      std::cout << "encoder " << s.encoder_id << ": " << s.added << " new, " << s.total << " cached in "
                << s.cache.string() << '\n';
    } else if (*run) {
      const auto r = cmd_run(in, {task_from_string(task), variant, seed, out, cache});
      std::cout << to_string(r.task) << ' ' << r.variant << ' ' << r.metric << " validation "
                << (r.validation ? std::to_string(*r.validation) : std::string("N/A")) << " test " << r.test << '\n';
    } else if (*report) {
      std::cout << cmd_report(in).table;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ProviderError& e) {
    std::cerr << "provider error: " << e.what() << '\n';
    return kProvider;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
