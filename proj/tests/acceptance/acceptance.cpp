// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "geoprobe/pipeline.hpp"
#include "oracle_corpus.hpp"
#include "random_geometry.hpp"
#include "wkt_mutations.hpp"

using namespace geoprobe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first few failure messages and the overall verdict.
class Check {
public:
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    if (failures_++ < 5) msgs_ += (msgs_.empty() ? "" : "; ") + what;
  }
  Outcome done(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failures: " + msgs_};
  }

private:
  std::size_t failures_ = 0;
  std::string msgs_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome oracle_parity() {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = test_support::load_oracle_pairs();
  Check c;
  c.expect(rows.size() >= 500, "corpus has only " + std::to_string(rows.size()) + " pairs");
  double worst_area = 0, worst_centroid = 0, worst_distance = 0;
  for (const auto& r : rows) {
    const std::string where = format_wkt(r.a) + " | " + format_wkt(r.b);
    c.expect(to_string(classify_relation(r.a, r.b)) == r.label, "relation " + where);
    worst_area = std::max({worst_area, std::abs(area(r.a) - r.area_a), std::abs(area(r.b) - r.area_b)});
    const Coordinate ca = centroid(r.a), cb = centroid(r.b);
    worst_centroid = std::max({worst_centroid, std::abs(ca.x - r.centroid_a.x), std::abs(ca.y - r.centroid_a.y),
                               std::abs(cb.x - r.centroid_b.x), std::abs(cb.y - r.centroid_b.y)});
    worst_distance = std::max(worst_distance, std::abs(min_distance(r.a, r.b) - r.distance));
  }
  c.expect(worst_area <= 1e-12, "area error " + fmt("%.3g", worst_area));
  c.expect(worst_centroid <= 1e-9, "centroid error " + fmt("%.3g", worst_centroid));
  c.expect(worst_distance <= 1e-9, "distance error " + fmt("%.3g", worst_distance));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 60.0, "took " + fmt("%.0f", secs) + " s");
  return c.done(std::to_string(rows.size()) + " pairs, max err area " + fmt("%.2g", worst_area) + " centroid " +
                fmt("%.2g", worst_centroid) + " distance " + fmt("%.2g", worst_distance));
}

Outcome de9im_algebra() {
  const auto rows = test_support::load_oracle_pairs();
  Check c;
  for (const auto& r : rows) {
    const std::string where = format_wkt(r.a) + " | " + format_wkt(r.b);
    const auto ab = de9im(r.a, r.b);
    const auto ba = de9im(r.b, r.a);
    c.expect(ab == ba.transposed(), "transpose " + where);
    const auto pab = named_predicates(ab, r.a.kind(), r.b.kind());
    const auto pba = named_predicates(ba, r.b.kind(), r.a.kind());
    c.expect(pab.contains(Predicate::Within) == pba.contains(Predicate::Contains), "within/contains " + where);
    c.expect(pab.contains(Predicate::Intersects) != pab.contains(Predicate::Disjoint), "intersects/disjoint " + where);
    c.expect((min_distance(r.a, r.b) > 0.0) == pab.contains(Predicate::Disjoint), "disjoint/distance " + where);
  }
  return c.done(std::to_string(rows.size()) + " pairs, 4 identities each");
}

Outcome parser_suite() {
  Check c;
  test_support::RandomGeometry gen(2024);
  for (int i = 0; i < 10000; ++i) {
    const Geometry g = gen.any();
    const std::string text = format_wkt(g);
    c.expect(parse_wkt(text) == g, "round trip " + text);
  }
  std::mt19937_64 rng(2025);
  std::size_t mutated = 0;
  for (int i = 0; i < 100; ++i) {
    const std::string text = format_wkt(gen.any());
    for (auto m : test_support::kAllMutations) {
      const std::string bad = test_support::mutate(text, m, rng);
      if (bad.empty()) continue;
      ++mutated;
      bool rejected = false;
      try {
        parse_wkt(bad);
      } catch (const Error&) {
        rejected = true;
      }
      c.expect(rejected, std::string("accepted ") + test_support::to_string(m) + ": " + bad);
    }
  }
  c.expect(mutated >= 100, "too few mutations");
  return c.done("10000 round trips, " + std::to_string(mutated) + " mutations rejected");
}

Outcome join_suite() {
  Check c;
  const auto subjects = test_support::city_records(200, 21, "s");
  const auto objects = test_support::city_records(200, 22, "o");
  std::string sizes;
  for (double radius : {0.0, 0.003}) {
    std::set<std::pair<std::string, std::string>> brute;
    for (const auto& s : subjects)
      for (const auto& o : objects)
        if (radius == 0.0 ? intersects(s.geometry, o.geometry) : min_distance(s.geometry, o.geometry) <= radius)
          brute.insert({s.id, o.id});
    const auto pairs = join_pairs(subjects, objects, radius);
    const std::set<std::pair<std::string, std::string>> got(pairs.begin(), pairs.end());
    c.expect(got == brute, "radius " + fmt("%g", radius));
    c.expect(pairs.size() == got.size(), "duplicate pairs at radius " + fmt("%g", radius));
    sizes += (sizes.empty() ? "" : ", ") + std::string("r=") + fmt("%g", radius) + ": " + std::to_string(got.size());
  }
  return c.done("200x200, pairs " + sizes);
}

MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Outcome probe_math() {
  Check c;
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = MLPParams::random(4, 8, 3, 0.0, rng);
    const MatrixXd x = random_matrix(4, 5, rng, -1, 1);
    std::vector<int> y(5);
    for (auto& v : y) v = std::uniform_int_distribution<int>(0, 2)(rng);
    worst = std::max(worst, grad_check(p, x, Objective::classification(y, 3)));
  }
  for (auto kind : {TransformKind::Identity, TransformKind::Log, TransformKind::MinMax}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = MLPParams::random(4, 8, 2, 0.0, rng);
      const MatrixXd x = random_matrix(4, 6, rng, -1, 1);
      const MatrixXd y = random_matrix(2, 6, rng, 0.1, 3.0);
      const TargetTransform t = kind == TransformKind::Log      ? TargetTransform::log()
                                : kind == TransformKind::MinMax ? TargetTransform::fit_minmax(y)
                                                                : TargetTransform::identity();
      worst = std::max(worst, grad_check(p, x, Objective::regression(y, t)));
    }
  }
  c.expect(worst < 1e-4, "gradient error " + fmt("%.3g", worst));

  const MatrixXd areas = random_matrix(1, 500, rng, 0.0, 2.5e-5);
  const auto log = TargetTransform::log();
  const double log_err = (log.inverse(log.forward(areas)) - areas).cwiseAbs().maxCoeff();
  MatrixXd centroids(2, 400);
  centroids.row(0) = random_matrix(1, 400, rng, -89.5, -89.3);
  centroids.row(1) = random_matrix(1, 400, rng, 43.03, 43.13);
  const auto mm = TargetTransform::fit_minmax(centroids);
  const double mm_err = (mm.inverse(mm.forward(centroids)) - centroids).cwiseAbs().maxCoeff();
  c.expect(log_err < 1e-9, "log round trip " + fmt("%.3g", log_err));
  c.expect(mm_err < 1e-9, "minmax round trip " + fmt("%.3g", mm_err));

  const MatrixXd xt = random_matrix(6, 120, rng, -1, 1), xv = random_matrix(6, 30, rng, -1, 1);
  std::vector<int> yt(120), yv(30);
  for (std::size_t i = 0; i < yt.size(); ++i) yt[i] = xt(0, static_cast<Eigen::Index>(i)) > 0;
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = xv(0, static_cast<Eigen::Index>(i)) > 0;
  Hyperparams hp;
  hp.hidden = 16;
  hp.max_epochs = 20;
  hp.patience = 5;
  hp.seed = 42;
  const auto a = train(xt, Objective::classification(yt, 2), xv, Objective::classification(yv, 2), hp);
  const auto b = train(xt, Objective::classification(yt, 2), xv, Objective::classification(yv, 2), hp);
  c.expect(a.params == b.params && a.history.val_loss == b.history.val_loss, "training not bitwise reproducible");
  return c.done("200 gradient checks, max rel err " + fmt("%.2g", worst) + "; round trip err log " +
                fmt("%.2g", log_err) + " minmax " + fmt("%.2g", mm_err) + "; training bitwise equal");
}

Outcome metric_fixtures() {
  Check c;
  const std::vector<std::string> t{"Point", "LineString", "Polygon", "Point"};
  c.expect(metric_accuracy(t, t) == 100.0, "accuracy identity");
  c.expect(metric_accuracy(std::vector<std::string>{"Point", "Point", "Point", "Point"}, t) == 50.0, "accuracy half");
  c.expect(metric_accuracy(std::vector<int>{0, 1, 2}, std::vector<int>{2, 1, 0}) == 100.0 / 3.0, "accuracy third");
  c.expect(metric_mape({110.0}, {100.0}).value == 10.0, "mape single");
  const auto m = metric_mape({90.0, 3.0, 5.0}, {100.0, 2.0, 0.0});
  c.expect(m.value == 30.0 && m.used == 2 && m.excluded == 1, "mape with zero target");
  c.expect(metric_rmse({3, 4}, {0, 0}) == std::sqrt(12.5), "rmse pair");
  c.expect(metric_rmse({1.5, 5.0, 2.5, 6.0}, {1.0, 5.0, 2.0, 6.0}) == std::sqrt(0.125), "rmse centroids");
  c.expect(metric_rmse({0.75, 0.5, 1.0, 2.0, 2.0}, {0.5, 1.0, 1.0, 1.25, 2.0}) == std::sqrt(0.875 / 5.0),
           "rmse distances");
  c.expect(precision_at_k({"a", "b", "c", "d", "e"}, {"a", "c"}, 5) == 0.4, "p@5 single");
  const std::vector<std::vector<std::string>> retrieved{
      {"a", "b", "c", "d", "e"}, {"p", "q", "r", "s", "t"}, {"a", "b", "c", "d", "e"}};
  const std::vector<std::set<std::string>> relevant{{"a", "e", "z"}, {"p", "q", "r", "s", "t", "u"}, {"z"}};
  c.expect(metric_precision_at_k(retrieved, relevant, 5) == (0.4 + 1.0 + 0.0) / 3.0, "p@5 mean");
  return c.done("11 fixtures exact");
}

Outcome t1_desk() {
  const auto start = std::chrono::steady_clock::now();
  Check c;
  BuilderConfig cfg;
  cfg.samples_per_type = 400;
  std::vector<GeometryRecord> records;
  for (auto& r : generate_synthetic(cfg))
    if (r.source != "duplicate") records.push_back(std::move(r));
  c.expect(records.size() == 1200, "expected 1200 geometries, got " + std::to_string(records.size()));
  ReferenceEncoder enc{ReferenceEncoderConfig{}};
  EmbeddingCache cache(enc.id());
  encode_geometries(enc, records, cache);
  const auto ds = split(make_attribute_dataset(TaskId::T1, build_attribute_table(records)), cfg.split_ratios, cfg.seed);
  const auto r = run_t1(ds, cache, Hyperparams{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(*r.report.validation >= 99.0, "validation " + fmt("%.2f", *r.report.validation));
  c.expect(r.report.test >= 99.0, "test " + fmt("%.2f", r.report.test));
  c.expect(secs < 300.0, "took " + fmt("%.0f", secs) + " s");
  return c.done(std::to_string(records.size()) + " geometries, dim " + std::to_string(enc.dim()) + ", validation " +
                fmt("%.2f", *r.report.validation) + "%, test " + fmt("%.2f", r.report.test) + "%, " +
                fmt("%.1f", secs) + " s");
}

Embedding gaussian(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<float> n(0.0f, 1.0f);
  Embedding v(dim);
  for (auto& x : v) x = n(rng);
  return v;
}

Example t6_query(const std::string& object, Predicate p, std::vector<std::string> answers) {
  Example e;
  e.id = object + "|" + std::string(to_string(p));
  e.inputs = {std::string(to_string(p)), object};
  e.answers = std::move(answers);
  e.group = std::string(to_string(p));
  e.split = Split::Test;
  return e;
}

Outcome t6_sanity() {
  Check c;
  std::mt19937_64 rng(606);
  const std::size_t dim = 256;

  // Answers duplicate their query vector; distractors are random.
  EmbeddingCache dup("fixture");
  TaskDataset ds{TaskId::T6, {}};
  double expected = 0.0;
  std::size_t next = 0, queries = 0;
  for (std::size_t q = 0; q < 60; ++q) {
    const std::size_t n = 1 + q % 9;
    const std::string object = "o" + std::to_string(q);
    const Predicate p = kTripletPredicates[q % kTripletPredicates.size()];
    const auto qv = gaussian(dim, rng);
    dup.put(phrase_key(object, p), qv);
    std::vector<std::string> answers;
    for (std::size_t i = 0; i < n; ++i) {
      answers.push_back("s" + std::to_string(next++));
      dup.put(answers.back(), qv);
    }
    expected += static_cast<double>(std::min<std::size_t>(n, 5)) / 5.0;
    ++queries;
    ds.examples.push_back(t6_query(object, p, answers));
  }
  const double dup_p5 = run_t6(ds, dup, 5).report.test;
  expected /= static_cast<double>(queries);
  c.expect(dup_p5 == expected, "duplicate pool " + fmt("%.17g", dup_p5) + " want " + fmt("%.17g", expected));

  // Independent random vectors, near-orthogonal in high dimension.
  EmbeddingCache rnd("fixture");
  TaskDataset rds{TaskId::T6, {}};
  for (int q = 0; q < 166; ++q) {
    std::vector<std::string> answers;
    for (int i = 0; i < 6; ++i) {
      answers.push_back("s" + std::to_string(q * 6 + i));
      rnd.put(answers.back(), gaussian(dim, rng));
    }
    const std::string object = "o" + std::to_string(q);
    rnd.put(phrase_key(object, Predicate::Contains), gaussian(dim, rng));
    rds.examples.push_back(t6_query(object, Predicate::Contains, answers));
  }
  const double rnd_p5 = run_t6(rds, rnd, 5).report.test;
  c.expect(rnd_p5 < 0.05, "random pool " + fmt("%.4f", rnd_p5));
  return c.done("duplicate pool P@5 " + fmt("%.4f", dup_p5) + " (exact), random pool P@5 " + fmt("%.4f", rnd_p5));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path pipeline_once(const fs::path& root) {
  fs::remove_all(root);
  fs::create_directories(root);
  const nlohmann::json cfg = {
      {"builder", {{"samples_per_type", 200}, {"triplet_quota", 20}, {"location_objects", 10}}},
      {"encoder", {{"dim", 64}}},
      {"hyperparams", {{"hidden", 32}, {"max_epochs", 8}, {"patience", 4}}}};
  write_json(root / "config.json", cfg);
  const fs::path data = root / "data", reports = root / "reports";
  cmd_generate(root / "config.json", data);
  cmd_truth(data);
  cmd_encode(data, {"reference", "", {}});
  for (int t = 1; t <= 6; ++t) {
    const auto task = static_cast<TaskId>(t);
    for (const auto& v : task_variants(task)) cmd_run(data, {task, v, 3, reports, {}});
  }
  cmd_report(reports);
  return reports;
}

Outcome pipeline_determinism(const fs::path& work) {
  Check c;
  const auto a = pipeline_once(work / "run_a");
  const auto b = pipeline_once(work / "run_b");
  const std::string ja = slurp(a / "results.json"), jb = slurp(b / "results.json");
  c.expect(!ja.empty() && ja == jb, "results.json differs");
  c.expect(slurp(a / "results.md") == slurp(b / "results.md"), "results.md differs");
  const auto rows = reports_from_json(read_json(a / "results.json")).size();
  return c.done("two runs, " + std::to_string(rows) + " reports, results.json and results.md identical");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "geoprobe_acceptance";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"geometry oracle parity", oracle_parity},
      {"de9im algebra", de9im_algebra},
      {"wkt parser", parser_suite},
      {"spatial join vs brute force", join_suite},
      {"probe math", probe_math},
      {"metric fixtures", metric_fixtures},
      {"t1 desk scale", t1_desk},
      {"t6 sanity", t6_sanity},
      {"pipeline determinism", [&] { return pipeline_determinism(work); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %-28s  %s  [%.1f s]\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
