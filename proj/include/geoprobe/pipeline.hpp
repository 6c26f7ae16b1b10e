#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <future>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "geoprobe/dataset.hpp"
#include "geoprobe/encoding.hpp"
#include "geoprobe/errors.hpp"
#include "geoprobe/harness.hpp"
#include "geoprobe/io.hpp"
#include "geoprobe/probe.hpp"

namespace geoprobe {

// ---------------------------------------------------------------------------
// Pipeline configuration

struct SourceFile {
  std::filesystem::path path;
  std::string format = "wkt";  // wkt | geojson
  std::string source;
};

struct EncoderSettings {
  std::string kind = "reference";  // reference | provider
  ReferenceEncoderConfig reference;
  ProviderConfig provider;
  std::size_t batch_size = 256;
  std::size_t threads = 0;  // 0 picks the hardware concurrency
};

struct PipelineConfig {
  BuilderConfig builder;
  EncoderSettings encoder;
  Hyperparams hp;
  std::size_t k = kDefaultTopK;
  std::vector<SourceFile> sources;  // empty means synthetic data
};

inline nlohmann::json to_json(const PipelineConfig& c) {
  const auto& e = c.encoder;
  nlohmann::json sources = nlohmann::json::array();
  for (const auto& s : c.sources) sources.push_back({{"path", s.path.string()}, {"format", s.format}, {"source", s.source}});
  return {{"builder", config_to_json(c.builder)},
          {"encoder",
           {{"kind", e.kind},
            {"dim", e.reference.dim},
            {"window", e.reference.window},
            {"overlap", e.reference.overlap},
            {"seed", e.reference.seed},
            {"position_weight", e.reference.position_weight},
            {"endpoint", e.provider.endpoint},
            {"model", e.provider.model},
            {"provider_batch_size", e.provider.batch_size},
            {"expected_dim", e.provider.expected_dim},
            {"timeout_seconds", e.provider.timeout_seconds},
            {"batch_size", e.batch_size},
            {"threads", e.threads}}},
          {"hyperparams",
           {{"hidden", c.hp.hidden},
            {"dropout", c.hp.dropout},
            {"learning_rate", c.hp.learning_rate},
            {"batch_size", c.hp.batch_size},
            {"max_epochs", c.hp.max_epochs},
            {"patience", c.hp.patience},
            {"seed", c.hp.seed}}},
          {"retrieval", {{"k", c.k}}},
          {"sources", sources}};
}

/// Missing sections and keys keep their defaults.
inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    c.builder = config_from_json(j.value("builder", nlohmann::json::object()));
    if (j.contains("encoder")) {
      const auto& e = j.at("encoder");
      auto& ref = c.encoder.reference;
      auto& prov = c.encoder.provider;
      c.encoder.kind = e.value("kind", c.encoder.kind);
      ref.dim = e.value("dim", ref.dim);
      ref.window = e.value("window", ref.window);
      ref.overlap = e.value("overlap", ref.overlap);
      ref.seed = e.value("seed", ref.seed);
      ref.position_weight = e.value("position_weight", ref.position_weight);
      prov.endpoint = e.value("endpoint", prov.endpoint);
      prov.model = e.value("model", prov.model);
      prov.window = ref.window;
      prov.overlap = ref.overlap;
      prov.batch_size = e.value("provider_batch_size", prov.batch_size);
      prov.expected_dim = e.value("expected_dim", prov.expected_dim);
      prov.timeout_seconds = e.value("timeout_seconds", prov.timeout_seconds);
      c.encoder.batch_size = e.value("batch_size", c.encoder.batch_size);
      c.encoder.threads = e.value("threads", c.encoder.threads);
    }
    if (j.contains("hyperparams")) {
      const auto& h = j.at("hyperparams");
      c.hp.hidden = h.value("hidden", c.hp.hidden);
      c.hp.dropout = h.value("dropout", c.hp.dropout);
      c.hp.learning_rate = h.value("learning_rate", c.hp.learning_rate);
      c.hp.batch_size = h.value("batch_size", c.hp.batch_size);
      c.hp.max_epochs = h.value("max_epochs", c.hp.max_epochs);
      c.hp.patience = h.value("patience", c.hp.patience);
      c.hp.seed = h.value("seed", c.hp.seed);
    }
    if (j.contains("retrieval")) c.k = j.at("retrieval").value("k", c.k);
    for (const auto& s : j.value("sources", nlohmann::json::array()))
      c.sources.push_back({s.at("path").get<std::string>(), s.value("format", "wkt"), s.value("source", "")});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.encoder.kind != "reference" && c.encoder.kind != "provider")
    throw ConfigError("encoder kind must be reference or provider");
  for (const auto& s : c.sources)
    if (s.format != "wkt" && s.format != "geojson") throw ConfigError("source format must be wkt or geojson");
  if (c.encoder.batch_size == 0) throw ConfigError("encoder batch size must be positive");
  if (c.k == 0) throw ConfigError("k must be positive");
  c.hp.validate();
  ReferenceEncoder check(c.encoder.reference);
  return c;
}

// ---------------------------------------------------------------------------
// Data directory layout

struct DataPaths {
  std::filesystem::path root;

  std::filesystem::path config() const { return root / "config.json"; }
  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path geometries() const { return root / "geometries.wkt"; }
  std::filesystem::path attributes() const { return root / "attributes.tsv"; }
  std::filesystem::path triplets() const { return root / "triplets.tsv"; }
  std::filesystem::path queries() const { return root / "queries.tsv"; }
  std::filesystem::path task(TaskId t) const { return root / "tasks" / (std::string(to_string(t)) + ".tsv"); }
  std::filesystem::path default_cache() const { return root / "embeddings.cache"; }
};

inline PipelineConfig load_pipeline_config(const DataPaths& d) {
  if (!std::filesystem::exists(d.config())) throw DataError(d.root.string() + " has no config.json; run generate first");
  return pipeline_config_from_json(read_json(d.config()));
}

// ---------------------------------------------------------------------------
// generate

inline std::vector<GeometryRecord> load_sources(const std::vector<SourceFile>& sources,
                                                const std::filesystem::path& base) {
  std::vector<GeometryRecord> out;
  for (const auto& s : sources) {
    const auto path = s.path.is_absolute() ? s.path : base / s.path;
    auto records = s.format == "geojson" ? read_geojson(path, s.source) : read_records(path);
    if (s.format == "wkt" && !s.source.empty())
      for (auto& r : records) r.source = s.source;
    for (auto& r : records) out.push_back(std::move(r));
  }
  return out;
}

/// Reads the config, builds (or samples) the geometry set and writes the
/// config echo, geometries and an initial manifest.
inline std::size_t cmd_generate(const std::filesystem::path& config_path, const std::filesystem::path& out_dir) {
  if (!std::filesystem::exists(config_path)) throw ConfigError("config file not found: " + config_path.string());
  nlohmann::json raw;
  try {
    auto in = io_detail::open_in(config_path);
    raw = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(config_path.string() + ": " + e.what());
  }
  PipelineConfig cfg = pipeline_config_from_json(raw);
  for (auto& s : cfg.sources)
    if (s.path.is_relative()) s.path = std::filesystem::absolute(config_path.parent_path() / s.path);
  const auto records = cfg.sources.empty() ? generate_synthetic(cfg.builder)
                                           : sample_records(load_sources(cfg.sources, {}), cfg.builder);
  const DataPaths d{out_dir};
  std::filesystem::create_directories(out_dir);
  write_json(d.config(), to_json(cfg));
  write_records(d.geometries(), records);

  std::array<std::size_t, kGeometryKindCount> counts{};
  for (const auto& r : records) ++counts[static_cast<int>(r.geometry.kind())];
  nlohmann::json manifest{{"config", config_to_json(cfg.builder)},
                          {"seed", cfg.builder.seed},
                          {"source", cfg.sources.empty() ? "synthetic" : "files"},
                          {"records", records.size()},
                          {"by_type", {{"Point", counts[0]}, {"LineString", counts[1]}, {"Polygon", counts[2]}}}};
  write_json(d.manifest(), manifest);
  return records.size();
}

// ---------------------------------------------------------------------------
// truth

struct TruthSummary {
  std::size_t records = 0;
  std::size_t triplets = 0;
  std::size_t queries = 0;
  BuildReport report;
};

/// Ground truth for every task: attributes, triplets, location queries and
/// the split task files. Extends the manifest with category counts.
inline TruthSummary cmd_truth(const std::filesystem::path& dir) {
  const DataPaths d{dir};
  const PipelineConfig cfg = load_pipeline_config(d);
  const auto records = read_records(d.geometries());

  TruthSummary s;
  s.records = records.size();
  const auto attrs = build_attribute_table(records);
  const auto neighbours = compute_neighbour_relations(records, cfg.builder.near_radius, cfg.builder.grid_cell);
  const auto triplets = build_relation_triplets(records, neighbours, cfg.builder, &s.report);
  const auto queries = build_location_queries(records, neighbours, cfg.builder, &s.report);
  s.triplets = triplets.size();
  s.queries = queries.size();

  write_attributes(d.attributes(), attrs);
  write_triplets(d.triplets(), triplets);
  write_queries(d.queries(), queries);

  std::unordered_map<std::string, GeometryKind> kinds;
  for (const auto& r : records) kinds.emplace(r.id, r.geometry.kind());
  const auto& ratios = cfg.builder.split_ratios;
  const auto seed = cfg.builder.seed;
  nlohmann::json task_sizes = nlohmann::json::object();
  auto emit = [&](TaskDataset ds) {
    ds = split(std::move(ds), ratios, seed);
    std::array<std::size_t, 3> n{};
    for (const auto& e : ds.examples) ++n[static_cast<std::size_t>(e.split)];
    task_sizes[std::string(to_string(ds.task))] = {{"train", n[0]}, {"validation", n[1]}, {"test", n[2]}};
    write_task(d.task(ds.task), ds);
  };
  for (TaskId t : {TaskId::T1, TaskId::T2, TaskId::T3}) emit(make_attribute_dataset(t, attrs));
  for (TaskId t : {TaskId::T4, TaskId::T5}) emit(make_relation_dataset(t, triplets, kinds));
  emit(make_location_dataset(queries));

  nlohmann::json manifest = std::filesystem::exists(d.manifest()) ? read_json(d.manifest()) : nlohmann::json::object();
  manifest["config"] = config_to_json(cfg.builder);
  manifest["seed"] = cfg.builder.seed;
  manifest["records"] = records.size();
  manifest["triplets"] = triplets.size();
  manifest["queries"] = queries.size();
  manifest["tasks"] = task_sizes;
  manifest["build"] = report_to_json(s.report);
  write_json(d.manifest(), manifest);
  return s;
}

// ---------------------------------------------------------------------------
// encode

struct EncodeOptions {
  std::string encoder = "reference";  // reference | provider
  std::string endpoint;               // provider only; overrides the config
  std::filesystem::path cache;        // empty means <dir>/embeddings.cache
};

inline std::unique_ptr<Encoder> make_encoder(const PipelineConfig& cfg, const EncodeOptions& opt) {
  if (opt.encoder == "reference") return std::make_unique<ReferenceEncoder>(cfg.encoder.reference);
  if (opt.encoder == "provider") {
    ProviderConfig p = cfg.encoder.provider;
    if (!opt.endpoint.empty()) p.endpoint = opt.endpoint;
    return std::make_unique<ProviderEncoder>(p);
  }
  throw ConfigError("encoder must be reference or provider");
}

/// Embeds texts in order, fanning batches out over worker threads.
inline std::vector<Embedding> embed_parallel(const Encoder& enc, const std::vector<std::string>& texts,
                                             std::size_t batch, std::size_t threads) {
  std::vector<Embedding> out(texts.size());
  if (texts.empty()) return out;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t batches = (texts.size() + batch - 1) / batch;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b; (b = next.fetch_add(1)) < batches;) {
      const std::size_t lo = b * batch, hi = std::min(texts.size(), lo + batch);
      auto vectors = enc.embed_batch(std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(lo),
                                                              texts.begin() + static_cast<std::ptrdiff_t>(hi)));
      if (vectors.size() != hi - lo) throw ProviderError("encoder returned the wrong number of vectors");
      for (std::size_t i = lo; i < hi; ++i) out[i] = std::move(vectors[i - lo]);
    }
  };
  std::vector<std::future<void>> jobs;
  for (std::size_t t = 0; t < std::min(threads, batches); ++t) jobs.push_back(std::async(std::launch::async, worker));
  std::exception_ptr failure;
  for (auto& j : jobs) {
    try {
      j.get();
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct EncodeSummary {
  std::string encoder_id;
  std::size_t added = 0;
  std::size_t total = 0;
  std::filesystem::path cache;
};

/// Embeds every geometry and every location-query phrase missing from the
/// cache. An existing cache must come from the same encoder.
inline EncodeSummary cmd_encode(const std::filesystem::path& dir, const EncodeOptions& opt) {
  const DataPaths d{dir};
  const PipelineConfig cfg = load_pipeline_config(d);
  const auto enc = make_encoder(cfg, opt);
  const auto cache_path = opt.cache.empty() ? d.default_cache() : opt.cache;

  EmbeddingCache cache(enc->id());
  if (std::filesystem::exists(cache_path)) {
    cache = EmbeddingCache::load(cache_path);
    if (cache.encoder_id() != enc->id())
      throw DataError("cache " + cache_path.string() + " belongs to encoder '" + cache.encoder_id() + "', not '" +
                      enc->id() + "'");
  }

  std::vector<std::string> keys, texts;
  const auto records = read_records(d.geometries());
  std::unordered_map<std::string, const GeometryRecord*> by_id;
  for (const auto& r : records) {
    by_id.emplace(r.id, &r);
    if (!cache.contains(r.id)) {
      keys.push_back(r.id);
      texts.push_back(format_wkt(r.geometry));
    }
  }
  std::set<std::string> pending;
  if (std::filesystem::exists(d.queries()))
    for (const auto& q : read_queries(d.queries())) {
      const std::string key = phrase_key(q.object_id, q.predicate);
      if (cache.contains(key) || !pending.insert(key).second) continue;
      const auto it = by_id.find(q.object_id);
      if (it == by_id.end()) throw DataError("query object '" + q.object_id + "' is not a known geometry");
      keys.push_back(key);
      texts.push_back(render({q.predicate, format_wkt(it->second->geometry)}));
    }

  const std::size_t threads = opt.encoder == "provider" ? 1 : cfg.encoder.threads;
  auto vectors = embed_parallel(*enc, texts, cfg.encoder.batch_size, threads);
  for (std::size_t i = 0; i < keys.size(); ++i) cache.put(keys[i], std::move(vectors[i]));
  cache.save(cache_path);
  return {enc->id(), keys.size(), cache.size(), cache_path};
}

// ---------------------------------------------------------------------------
// run / report

struct RunOptions {
  TaskId task = TaskId::T1;
  std::string variant = "default";
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::filesystem::path cache;  // empty means <dir>/embeddings.cache
};

inline std::string report_stem(const MetricsReport& r) {
  std::string enc = r.encoder();
  for (char& c : enc)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return std::string(to_string(r.task)) + "-" + r.variant + "-" + (enc.empty() ? "unknown" : enc);
}

/// Trains and evaluates one task variant, then writes
/// <out>/<task>-<variant>-<encoder>.report.json and, for trained probes,
/// the matching .model.json checkpoint.
inline MetricsReport cmd_run(const std::filesystem::path& dir, const RunOptions& opt) {
  const DataPaths d{dir};
  const PipelineConfig cfg = load_pipeline_config(d);
  const TaskSpec spec{opt.task, normalize_variant(opt.task, opt.variant), cfg.k, opt.seed};
  const auto cache_path = opt.cache.empty() ? d.default_cache() : opt.cache;
  if (!std::filesystem::exists(cache_path)) throw DataError("no embedding cache at " + cache_path.string());
  if (!std::filesystem::exists(d.task(opt.task)))
    throw DataError("no task file " + d.task(opt.task).string() + "; run truth first");
  const EmbeddingCache cache = EmbeddingCache::load(cache_path);
  const TaskDataset ds = read_task(d.task(opt.task), opt.task);

  RunResult result = run_task(ds, cache, cfg.hp, spec);
  const std::string stem = report_stem(result.report);
  write_json(opt.out / (stem + ".report.json"), to_json(result.report));
  if (result.model) save_checkpoint(opt.out / (stem + ".model.json"), *result.model);
  return result.report;
}

/// Collects every *.report.json in the directory into results.json and
/// results.md.
inline ReportDocument cmd_report(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("report directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 12 && name.ends_with(".report.json")) files.push_back(entry.path());
  }
  if (files.empty()) throw DataError("no *.report.json files in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<MetricsReport> reports;
  for (const auto& f : files) reports.push_back(metrics_report_from_json(read_json(f)));
  ReportDocument doc = build_report(reports);
  write_json(dir / "results.json", doc.results);
  auto out = io_detail::open_out(dir / "results.md");
  out << doc.table;
  return doc;
}

}  // namespace geoprobe
