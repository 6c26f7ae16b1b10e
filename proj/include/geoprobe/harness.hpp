#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "geoprobe/dataset.hpp"
#include "geoprobe/encoding.hpp"
#include "geoprobe/errors.hpp"
#include "geoprobe/metrics.hpp"
#include "geoprobe/probe.hpp"

namespace geoprobe {

// ---------------------------------------------------------------------------
// Task specs and reports

inline constexpr std::size_t kDefaultTopK = 5;

/// Variants accepted by each task; the first entry is the default.
inline std::vector<std::string> task_variants(TaskId t) {
  switch (t) {
    case TaskId::T2: return {"default", "polygon_only"};
    case TaskId::T4: return {"without_geometry_type", "with_geometry_type"};
    case TaskId::T5: return {"default", "disjoint_only"};
    default: return {"default"};
  }
}

/// Maps "default" to the task's default variant; throws on unknown variants.
inline std::string normalize_variant(TaskId t, const std::string& variant) {
  const auto valid = task_variants(t);
  if (variant == "default" || variant.empty()) return valid.front();
  if (std::find(valid.begin(), valid.end(), variant) == valid.end())
    throw ConfigError("variant '" + variant + "' is not valid for " + std::string(to_string(t)));
  return variant;
}

struct TaskSpec {
  TaskId task = TaskId::T1;
  std::string variant = "default";
  std::size_t k = kDefaultTopK;
  std::uint64_t seed = 0;

  void validate() const {
    normalize_variant(task, variant);
    if (k == 0) throw ConfigError("k must be positive");
  }
};

inline std::string task_metric(TaskId t) {
  switch (t) {
    case TaskId::T1:
    case TaskId::T4: return "accuracy_pct";
    case TaskId::T2: return "mape_pct";
    case TaskId::T3:
    case TaskId::T5: return "rmse";
    case TaskId::T6: return "precision_at_k";
  }
  return "?";
}

/// One task/variant result. Validation is absent for tasks without training.
struct MetricsReport {
  TaskId task = TaskId::T1;
  std::string variant = "default";
  std::string metric;
  std::optional<double> validation;
  double test = 0.0;
  nlohmann::json metadata = nlohmann::json::object();

  std::string encoder() const { return metadata.value("encoder", std::string()); }

  friend bool operator==(const MetricsReport& a, const MetricsReport& b) {
    return a.task == b.task && a.variant == b.variant && a.metric == b.metric && a.validation == b.validation &&
           a.test == b.test && a.metadata == b.metadata;
  }
};

inline nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j{{"task", to_string(r.task)}, {"variant", r.variant}, {"metric", r.metric},
                   {"validation", nullptr},     {"test", r.test},       {"metadata", r.metadata}};
  if (r.validation) j["validation"] = *r.validation;
  return j;
}

inline MetricsReport metrics_report_from_json(const nlohmann::json& j) {
  try {
    MetricsReport r;
    r.task = task_from_string(j.at("task").get<std::string>());
    r.variant = j.at("variant").get<std::string>();
    r.metric = j.at("metric").get<std::string>();
    if (!j.at("validation").is_null()) r.validation = j.at("validation").get<double>();
    r.test = j.at("test").get<double>();
    r.metadata = j.value("metadata", nlohmann::json::object());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed metrics report: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed metrics report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Vector index for retrieval

enum class Similarity { Cosine, Euclidean };

/// Exact nearest-neighbour search over unit-normalized rows (cosine) or raw
/// rows (negative Euclidean distance). Ties break by ascending id.
class VectorIndex {
public:
  explicit VectorIndex(Similarity sim = Similarity::Cosine) : sim_(sim) {}

  void add(const std::string& id, const Embedding& v) {
    if (!ids_.empty() && v.size() != dim_) throw DimensionMismatch(dim_, v.size());
    if (v.empty()) throw DataError("cannot index an empty vector for '" + id + "'");
    Eigen::VectorXd row(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) row(static_cast<Eigen::Index>(i)) = static_cast<double>(v[i]);
    const double norm = row.norm();
    if (!(norm > 0.0)) throw DataError("zero vector rejected for '" + id + "'");
    if (sim_ == Similarity::Cosine) row /= norm;
    dim_ = v.size();
    ids_.push_back(id);
    rows_.push_back(std::move(row));
  }

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  /// Top-k ids for the query, best first.
  std::vector<std::string> search(const Embedding& query, std::size_t k) const {
    if (ids_.empty()) throw EmptyPool("retrieval pool is empty");
    if (k == 0) throw ConfigError("k must be positive");
    if (query.size() != dim_) throw DimensionMismatch(dim_, query.size());
    Eigen::VectorXd q(static_cast<Eigen::Index>(query.size()));
    for (std::size_t i = 0; i < query.size(); ++i) q(static_cast<Eigen::Index>(i)) = static_cast<double>(query[i]);
    const double norm = q.norm();
    if (!(norm > 0.0)) throw DataError("zero query vector");
    if (sim_ == Similarity::Cosine) q /= norm;
    // One dot product per row keeps scores of identical rows bitwise equal.
    std::vector<double> score(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i)
      score[i] = sim_ == Similarity::Cosine ? rows_[i].dot(q) : -(rows_[i] - q).norm();
    std::vector<std::size_t> order(ids_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double sa = score[a], sb = score[b];
                        if (sa != sb) return sa > sb;
                        return ids_[a] < ids_[b];
                      });
    std::vector<std::string> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(ids_[order[i]]);
    return out;
  }

private:
  Similarity sim_;
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<Eigen::VectorXd> rows_;
};

// ---------------------------------------------------------------------------
// Task runs

struct RunResult {
  MetricsReport report;
  std::optional<ProbeModel> model;
};

namespace harness_detail {

/// Throws if an example id is assigned to more than one split.
inline void check_split_isolation(const TaskDataset& ds) {
  std::unordered_map<std::string, Split> seen;
  for (const auto& e : ds.examples) {
    auto [it, inserted] = seen.emplace(e.id, e.split);
    if (!inserted && it->second != e.split)
      throw DataError("example '" + e.id + "' appears in both " + std::string(to_string(it->second)) + " and " +
                      std::string(to_string(e.split)));
  }
}

struct Partition {
  std::array<std::vector<const Example*>, 3> rows;
  const std::vector<const Example*>& train() const { return rows[0]; }
  const std::vector<const Example*>& val() const { return rows[1]; }
  const std::vector<const Example*>& test() const { return rows[2]; }
};

template <typename Keep>
Partition partition(const TaskDataset& ds, Keep keep) {
  check_split_isolation(ds);
  Partition p;
  for (const auto& e : ds.examples)
    if (keep(e)) p.rows[static_cast<std::size_t>(e.split)].push_back(&e);
  return p;
}

inline std::array<std::string, 2> split_pair(const std::string& group) {
  const auto bar = group.find('|');
  if (bar == std::string::npos) throw DataError("expected 'Subject|Object' types, got '" + group + "'");
  return {group.substr(0, bar), group.substr(bar + 1)};
}

/// One column per example: the embedding of each input, concatenated, plus
/// optional one-hot subject and object types.
inline MatrixXd features(const std::vector<const Example*>& rows, const EmbeddingCache& cache, std::size_t inputs,
                         bool with_types = false) {
  const std::size_t d = cache.dim();
  if (d == 0) throw DataError("embedding cache is empty");
  const std::size_t extra = with_types ? 2 * kGeometryKindCount : 0;
  MatrixXd x = MatrixXd::Zero(static_cast<Eigen::Index>(inputs * d + extra), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c) {
    const Example& e = *rows[c];
    if (e.inputs.size() != inputs)
      throw DataError("example '" + e.id + "' has " + std::to_string(e.inputs.size()) + " inputs, expected " +
                      std::to_string(inputs));
    for (std::size_t k = 0; k < inputs; ++k) {
      const Embedding& v = cache.at(e.inputs[k]);
      if (v.size() != d) throw DimensionMismatch(d, v.size());
      for (std::size_t i = 0; i < d; ++i)
        x(static_cast<Eigen::Index>(k * d + i), static_cast<Eigen::Index>(c)) = static_cast<double>(v[i]);
    }
    if (with_types) {
      const auto [s, o] = split_pair(e.group);
      const auto base = static_cast<Eigen::Index>(inputs * d);
      x(base + static_cast<int>(geometry_kind_from_string(s)), static_cast<Eigen::Index>(c)) = 1.0;
      x(base + kGeometryKindCount + static_cast<int>(geometry_kind_from_string(o)), static_cast<Eigen::Index>(c)) = 1.0;
    }
  }
  return x;
}

inline MatrixXd targets(const std::vector<const Example*>& rows, std::size_t dim) {
  MatrixXd y(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c) {
    if (rows[c]->values.size() != dim) throw DataError("example '" + rows[c]->id + "' has the wrong target size");
    for (std::size_t r = 0; r < dim; ++r)
      y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[c]->values[r];
  }
  return y;
}

inline std::vector<int> label_indices(const std::vector<const Example*>& rows, const std::vector<std::string>& classes) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto* e : rows) {
    const auto it = std::find(classes.begin(), classes.end(), e->label);
    if (it == classes.end()) throw DataError("unknown label '" + e->label + "' in example '" + e->id + "'");
    out.push_back(static_cast<int>(it - classes.begin()));
  }
  return out;
}

inline std::vector<double> flatten(const MatrixXd& m) { return {m.data(), m.data() + m.size()}; }

inline void require_nonempty(const Partition& p, TaskId t) {
  if (p.train().empty() || p.val().empty() || p.test().empty())
    throw EmptyInput(std::string(to_string(t)) + " needs non-empty train, validation and test splits");
}

inline nlohmann::json base_metadata(const Partition& p, const EmbeddingCache& cache, const Hyperparams& hp,
                                    std::size_t input_dim) {
  return {{"encoder", cache.encoder_id()},
          {"seed", hp.seed},
          {"train", p.train().size()},
          {"validation", p.val().size()},
          {"test", p.test().size()},
          {"input_dim", input_dim}};
}

inline void add_history(nlohmann::json& meta, const TrainHistory& h) {
  meta["epochs"] = h.val_loss.size();
  meta["best_epoch"] = h.best_epoch;
  meta["best_val_loss"] = h.val_loss.at(h.best_epoch);
}

inline RunResult run_classification(TaskId task, const std::string& variant, const Partition& p,
                                    const EmbeddingCache& cache, const Hyperparams& hp,
                                    const std::vector<std::string>& classes, std::size_t inputs, bool with_types) {
  require_nonempty(p, task);
  const MatrixXd xt = features(p.train(), cache, inputs, with_types);
  const MatrixXd xv = features(p.val(), cache, inputs, with_types);
  const MatrixXd xs = features(p.test(), cache, inputs, with_types);
  const auto yt = label_indices(p.train(), classes), yv = label_indices(p.val(), classes);
  label_indices(p.test(), classes);
  const auto trained = train(xt, Objective::classification(yt, classes.size()), xv,
                             Objective::classification(yv, classes.size()), hp);
  ProbeModel model{trained.params, TargetTransform::identity(), hp, classes};

  auto labels_of = [&](const std::vector<const Example*>& rows) {
    std::vector<std::string> out;
    for (const auto* e : rows) out.push_back(e->label);
    return out;
  };
  MetricsReport r{task, variant, task_metric(task), {}, 0.0, base_metadata(p, cache, hp, static_cast<std::size_t>(xt.rows()))};
  r.validation = metric_accuracy(model.predict_labels(xv), labels_of(p.val()));
  r.test = metric_accuracy(model.predict_labels(xs), labels_of(p.test()));
  r.metadata["classes"] = classes;
  add_history(r.metadata, trained.history);
  return {std::move(r), std::move(model)};
}

enum class RegressionMetric { Mape, Rmse };

inline RunResult run_regression(TaskId task, const std::string& variant, const Partition& p,
                                const EmbeddingCache& cache, const Hyperparams& hp, TransformKind kind,
                                std::size_t inputs, std::size_t out_dim, RegressionMetric metric) {
  require_nonempty(p, task);
  const MatrixXd xt = features(p.train(), cache, inputs), xv = features(p.val(), cache, inputs),
                 xs = features(p.test(), cache, inputs);
  const MatrixXd yt = targets(p.train(), out_dim), yv = targets(p.val(), out_dim), ys = targets(p.test(), out_dim);
  const TargetTransform transform = kind == TransformKind::Log      ? TargetTransform::log()
                                    : kind == TransformKind::MinMax ? TargetTransform::fit_minmax(yt)
                                                                    : TargetTransform::identity();
  const auto trained = train(xt, Objective::regression(yt, transform), xv, Objective::regression(yv, transform), hp);
  ProbeModel model{trained.params, transform, hp, {}};

  MetricsReport r{task, variant, task_metric(task), {}, 0.0, base_metadata(p, cache, hp, static_cast<std::size_t>(xt.rows()))};
  r.metadata["transform"] = to_string(kind);
  auto score = [&](const MatrixXd& x, const MatrixXd& y, const char* split) {
    const MatrixXd pred = model.predict(x);
    if (metric == RegressionMetric::Rmse) return metric_rmse(flatten(pred), flatten(y));
    const auto m = metric_mape(flatten(pred), flatten(y));
    r.metadata[std::string("mape_excluded_") + split] = m.excluded;
    return m.value;
  };
  r.validation = score(xv, yv, "validation");
  r.test = score(xs, ys, "test");
  add_history(r.metadata, trained.history);
  return {std::move(r), std::move(model)};
}

inline void check_task(const TaskDataset& ds, TaskId expected) {
  if (ds.task != expected)
    throw ConfigError("dataset holds " + std::string(to_string(ds.task)) + ", expected " +
                      std::string(to_string(expected)));
}

}  // namespace harness_detail

/// T1: geometry type from Enc(g), 3 classes, accuracy.
inline RunResult run_t1(const TaskDataset& ds, const EmbeddingCache& cache, const Hyperparams& hp) {
  harness_detail::check_task(ds, TaskId::T1);
  const std::vector<std::string> classes{"Point", "LineString", "Polygon"};
  return harness_detail::run_classification(TaskId::T1, "default", harness_detail::partition(ds, [](auto&) { return true; }),
                                            cache, hp, classes, 1, false);
}

/// T2: area from Enc(g), log transform, MAPE on the original scale.
inline RunResult run_t2(const TaskDataset& ds, const EmbeddingCache& cache, const Hyperparams& hp,
                        const std::string& variant = "default") {
  harness_detail::check_task(ds, TaskId::T2);
  const std::string v = normalize_variant(TaskId::T2, variant);
  const bool polygons = v == "polygon_only";
  const auto p = harness_detail::partition(ds, [&](const Example& e) { return !polygons || e.group == "Polygon"; });
  return harness_detail::run_regression(TaskId::T2, v, p, cache, hp, TransformKind::Log, 1, 1,
                                        harness_detail::RegressionMetric::Mape);
}

/// T3: centroid from Enc(g), min-max transform, RMSE in degrees over both coordinates.
inline RunResult run_t3(const TaskDataset& ds, const EmbeddingCache& cache, const Hyperparams& hp) {
  harness_detail::check_task(ds, TaskId::T3);
  return harness_detail::run_regression(TaskId::T3, "default", harness_detail::partition(ds, [](auto&) { return true; }),
                                        cache, hp, TransformKind::MinMax, 1, 2, harness_detail::RegressionMetric::Rmse);
}

/// T4: predicate from [Enc(gi); Enc(gj)], 7 classes, optionally with one-hot types.
inline RunResult run_t4(const TaskDataset& ds, const EmbeddingCache& cache, const Hyperparams& hp,
                        const std::string& variant = "default") {
  harness_detail::check_task(ds, TaskId::T4);
  const std::string v = normalize_variant(TaskId::T4, variant);
  std::vector<std::string> classes;
  for (Predicate pr : kTripletPredicates) classes.emplace_back(to_string(pr));
  return harness_detail::run_classification(TaskId::T4, v, harness_detail::partition(ds, [](auto&) { return true; }),
                                            cache, hp, classes, 2, v == "with_geometry_type");
}

/// T5: distance from [Enc(gi); Enc(gj)], log transform, RMSE in degrees.
inline RunResult run_t5(const TaskDataset& ds, const EmbeddingCache& cache, const Hyperparams& hp,
                        const std::string& variant = "default") {
  harness_detail::check_task(ds, TaskId::T5);
  const std::string v = normalize_variant(TaskId::T5, variant);
  const bool disjoint = v == "disjoint_only";
  const auto p = harness_detail::partition(
      ds, [&](const Example& e) { return !disjoint || e.group == to_string(Predicate::Disjoint); });
  return harness_detail::run_regression(TaskId::T5, v, p, cache, hp, TransformKind::Log, 2, 1,
                                        harness_detail::RegressionMetric::Rmse);
}

/// T6: top-k retrieval of Enc(rel, g) over the pool of every distinct answer
/// subject; mean P@k over queries plus a per-predicate breakdown.
inline RunResult run_t6(const TaskDataset& ds, const EmbeddingCache& cache, std::size_t k = kDefaultTopK,
                        Similarity sim = Similarity::Cosine) {
  harness_detail::check_task(ds, TaskId::T6);
  if (k == 0) throw ConfigError("k must be positive");
  harness_detail::check_split_isolation(ds);
  std::set<std::string> subjects;
  for (const auto& e : ds.examples) subjects.insert(e.answers.begin(), e.answers.end());
  if (subjects.empty()) throw EmptyPool("no answer subjects to retrieve from");
  VectorIndex index(sim);
  for (const auto& id : subjects) index.add(id, cache.at(id));
  if (index.size() < k) throw EmptyPool("retrieval pool holds fewer than k items");

  std::vector<std::vector<std::string>> retrieved;
  std::vector<std::set<std::string>> relevant;
  std::map<std::string, std::pair<double, std::size_t>> by_predicate;
  for (const auto& e : ds.examples) {
    if (e.inputs.size() != 2) throw DataError("location query '" + e.id + "' needs {predicate, object}");
    const std::string key = phrase_key(e.inputs[1], predicate_from_string(e.inputs[0]));
    retrieved.push_back(index.search(cache.at(key), k));
    relevant.emplace_back(e.answers.begin(), e.answers.end());
    auto& slot = by_predicate[e.group];
    slot.first += precision_at_k(retrieved.back(), relevant.back(), k);
    ++slot.second;
  }
  if (retrieved.empty()) throw EmptyInput("no location queries");

  MetricsReport r{TaskId::T6, "default", task_metric(TaskId::T6), std::nullopt,
                  metric_precision_at_k(retrieved, relevant, k), nlohmann::json::object()};
  r.metadata["encoder"] = cache.encoder_id();
  r.metadata["k"] = k;
  r.metadata["queries"] = retrieved.size();
  r.metadata["pool"] = "all distinct answer subjects";
  r.metadata["pool_size"] = index.size();
  r.metadata["similarity"] = sim == Similarity::Cosine ? "cosine" : "euclidean";
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [pred, slot] : by_predicate) per[pred] = slot.first / static_cast<double>(slot.second);
  r.metadata["per_predicate"] = per;
  return {std::move(r), std::nullopt};
}

/// Dispatches on spec.task; hp.seed is replaced by spec.seed.
inline RunResult run_task(const TaskDataset& ds, const EmbeddingCache& cache, Hyperparams hp, const TaskSpec& spec) {
  spec.validate();
  hp.seed = spec.seed;
  switch (spec.task) {
    case TaskId::T1: return run_t1(ds, cache, hp);
    case TaskId::T2: return run_t2(ds, cache, hp, spec.variant);
    case TaskId::T3: return run_t3(ds, cache, hp);
    case TaskId::T4: return run_t4(ds, cache, hp, spec.variant);
    case TaskId::T5: return run_t5(ds, cache, hp, spec.variant);
    case TaskId::T6: {
      auto r = run_t6(ds, cache, spec.k);
      r.report.metadata["seed"] = spec.seed;
      return r;
    }
  }
  throw ConfigError("unknown task");
}

// ---------------------------------------------------------------------------
// Comparison report

struct ReportRow {
  TaskId task;
  std::string variant;
  std::string label;
};

/// The comparison table's fixed rows, in order.
inline std::vector<ReportRow> canonical_rows() {
  return {{TaskId::T1, "default", "T1: Geometry type"},
          {TaskId::T2, "default", "T2: Area computation / All geometries"},
          {TaskId::T2, "polygon_only", "T2: Area computation / Polygon only"},
          {TaskId::T3, "default", "T3: Centroid derivation"},
          {TaskId::T4, "without_geometry_type", "T4: Spatial predicate / Without geometry type"},
          {TaskId::T4, "with_geometry_type", "T4: Spatial predicate / With geometry type"},
          {TaskId::T5, "disjoint_only", "T5: Distance measure / Disjoint only"},
          {TaskId::T6, "default", "T6: Location prediction"}};
}

struct ReportDocument {
  nlohmann::json results;  // array of reports, sorted by (task, variant, encoder)
  std::string table;       // markdown
};

inline std::vector<MetricsReport> sort_reports(std::vector<MetricsReport> reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const MetricsReport& a, const MetricsReport& b) {
    return std::tuple(static_cast<int>(a.task), a.variant, a.encoder()) <
           std::tuple(static_cast<int>(b.task), b.variant, b.encoder());
  });
  return reports;
}

inline std::vector<MetricsReport> reports_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DataError("results file must hold an array of reports");
  std::vector<MetricsReport> out;
  for (const auto& item : j) out.push_back(metrics_report_from_json(item));
  return out;
}

namespace harness_detail {

inline std::string format_metric(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace harness_detail

/// Results file plus a table with one row per task/variant and a
/// validation/test column pair per encoder. Missing cells read "N/A";
/// variants outside the fixed rows are appended.
inline ReportDocument build_report(const std::vector<MetricsReport>& reports) {
  const auto sorted = sort_reports(reports);
  ReportDocument doc{nlohmann::json::array(), {}};
  for (const auto& r : sorted) doc.results.push_back(to_json(r));

  std::vector<std::string> encoders;
  for (const auto& r : sorted)
    if (std::find(encoders.begin(), encoders.end(), r.encoder()) == encoders.end()) encoders.push_back(r.encoder());
  std::sort(encoders.begin(), encoders.end());

  auto rows = canonical_rows();
  for (const auto& r : sorted) {
    const bool known = std::any_of(rows.begin(), rows.end(),
                                   [&](const ReportRow& row) { return row.task == r.task && row.variant == r.variant; });
    if (!known) {
      std::string label = "T" + std::to_string(static_cast<int>(r.task)) + " / " + r.variant;
      rows.push_back({r.task, r.variant, label});
    }
  }

  std::ostringstream t;
  t << "| Task | Metric |";
  for (const auto& e : encoders) t << ' ' << (e.empty() ? "unknown" : e) << " validation | " << (e.empty() ? "unknown" : e) << " test |";
  t << "\n|---|---|";
  for (std::size_t i = 0; i < encoders.size(); ++i) t << "---|---|";
  t << '\n';
  for (const auto& row : rows) {
    t << "| " << row.label << " | " << task_metric(row.task) << " |";
    for (const auto& e : encoders) {
      const auto it = std::find_if(sorted.begin(), sorted.end(), [&](const MetricsReport& r) {
        return r.task == row.task && r.variant == row.variant && r.encoder() == e;
      });
      if (it == sorted.end()) {
        t << " N/A | N/A |";
        continue;
      }
      t << ' ' << (it->validation ? harness_detail::format_metric(*it->validation) : "N/A") << " | "
        << harness_detail::format_metric(it->test) << " |";
    }
    t << '\n';
  }
  doc.table = t.str();
  return doc;
}

}  // namespace geoprobe
