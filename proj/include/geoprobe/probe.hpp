#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "geoprobe/encoding.hpp"
#include "geoprobe/errors.hpp"

namespace geoprobe {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Hyperparams {
  std::size_t hidden = 256;
  double dropout = 0.1;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 0;

  void validate() const {
    if (hidden == 0 || batch_size == 0 || max_epochs == 0 || patience == 0)
      throw ConfigError("hyperparameters must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
    if (patience > max_epochs) throw ConfigError("patience must not exceed max epochs");
  }
};

/// out = W2 relu(W1 dropout(x) + b1) + b2, one example per column.
struct MLPParams {
  MatrixXd w1;  // hidden x input
  VectorXd b1;
  MatrixXd w2;  // output x hidden
  VectorXd b2;
  double dropout = 0.0;

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden_dim() const noexcept { return static_cast<std::size_t>(w1.rows()); }
  std::size_t output_dim() const noexcept { return static_cast<std::size_t>(w2.rows()); }

  static MLPParams zeros(std::size_t in, std::size_t hidden, std::size_t out, double dropout = 0.0) {
    const auto i = static_cast<Eigen::Index>(in), h = static_cast<Eigen::Index>(hidden),
               o = static_cast<Eigen::Index>(out);
    return {MatrixXd::Zero(h, i), VectorXd::Zero(h), MatrixXd::Zero(o, h), VectorXd::Zero(o), dropout};
  }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  static MLPParams random(std::size_t in, std::size_t hidden, std::size_t out, double dropout, std::mt19937_64& rng) {
    auto p = zeros(in, hidden, out, dropout);
    auto fill = [&](auto& m, std::size_t fan_in) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = u(rng);
    };
    fill(p.w1, in);
    fill(p.b1, in);
    fill(p.w2, hidden);
    fill(p.b2, hidden);
    return p;
  }

  /// Rounds every parameter to the nearest float32 (the checkpoint precision).
  void round_to_float() {
    auto round = [](auto& m) { m = m.unaryExpr([](double v) { return static_cast<double>(static_cast<float>(v)); }); };
    round(w1);
    round(b1);
    round(w2);
    round(b2);
  }

  friend bool operator==(const MLPParams& a, const MLPParams& b) {
    return a.dropout == b.dropout && a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
  }
};

struct ForwardCache {
  MatrixXd input;   // after dropout
  MatrixXd pre;     // W1 x + b1
  MatrixXd hidden;  // relu(pre)
  MatrixXd output;
};

namespace probe_detail {

inline void check_input(const MLPParams& p, const MatrixXd& x) {
  if (static_cast<std::size_t>(x.rows()) != p.input_dim())
    throw DimensionMismatch(p.input_dim(), static_cast<std::size_t>(x.rows()));
}

/// Inverted dropout mask: keep with probability 1-rate, scale kept by 1/(1-rate).
inline MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, std::mt19937_64& rng) {
  MatrixXd mask(rows, cols);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) mask(r, c) = u(rng) < rate ? 0.0 : scale;
  return mask;
}

}  // namespace probe_detail

/// Batched forward pass. Dropout applies only when `rng` is given.
inline ForwardCache forward(const MLPParams& p, const MatrixXd& x, std::mt19937_64* rng = nullptr) {
  probe_detail::check_input(p, x);
  ForwardCache c;
  if (rng && p.dropout > 0.0) c.input = x.cwiseProduct(probe_detail::dropout_mask(x.rows(), x.cols(), p.dropout, *rng));
  else c.input = x;
  c.pre = (p.w1 * c.input).colwise() + p.b1;
  c.hidden = c.pre.cwiseMax(0.0);
  c.output = (p.w2 * c.hidden).colwise() + p.b2;
  return c;
}

inline VectorXd mlp_forward(const MLPParams& p, const VectorXd& x, bool train_mode, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return forward(p, x, train_mode ? &rng : nullptr).output.col(0);
}

struct Gradients {
  MatrixXd w1;
  VectorXd b1;
  MatrixXd w2;
  VectorXd b2;
};

inline Gradients backward(const MLPParams& p, const ForwardCache& c, const MatrixXd& d_output) {
  Gradients g;
  g.w2 = d_output * c.hidden.transpose();
  g.b2 = d_output.rowwise().sum();
  const MatrixXd d_pre = (p.w2.transpose() * d_output).cwiseProduct((c.pre.array() > 0.0).cast<double>().matrix());
  g.w1 = d_pre * c.input.transpose();
  g.b1 = d_pre.rowwise().sum();
  return g;
}

// ---------------------------------------------------------------------------
// Target transforms

enum class TransformKind { Identity, Log, MinMax };

inline std::string_view to_string(TransformKind k) noexcept {
  switch (k) {
    case TransformKind::Identity: return "identity";
    case TransformKind::Log: return "log";
    case TransformKind::MinMax: return "minmax";
  }
  return "?";
}

inline TransformKind transform_kind_from_string(std::string_view s) {
  if (s == "identity") return TransformKind::Identity;
  if (s == "log") return TransformKind::Log;
  if (s == "minmax") return TransformKind::MinMax;
  throw DataError("unknown transform: " + std::string(s));
}

/// Targets are stored one example per column.
struct TargetTransform {
  TransformKind kind = TransformKind::Identity;
  double epsilon = 1e-12;
  VectorXd min;  // minmax only
  VectorXd max;

  static TargetTransform identity() { return {}; }
  static TargetTransform log(double eps = 1e-12) { return {TransformKind::Log, eps, {}, {}}; }

  /// Per-row min/max over the given (training) targets.
  static TargetTransform fit_minmax(const MatrixXd& train_targets) {
    if (train_targets.cols() == 0) throw EmptyInput("cannot fit min-max on no targets");
    TargetTransform t{TransformKind::MinMax, 0.0, train_targets.rowwise().minCoeff(),
                      train_targets.rowwise().maxCoeff()};
    for (Eigen::Index r = 0; r < t.min.size(); ++r)
      if (!(t.max(r) > t.min(r))) throw DataError("min-max transform needs max > min in every dimension");
    return t;
  }

  /// Largest transformed value whose inverse stays within float range.
  static double log_clamp() noexcept { return std::log(static_cast<double>(FLT_MAX)); }

  MatrixXd forward(const MatrixXd& y) const {
    switch (kind) {
      case TransformKind::Identity: return y;
      case TransformKind::Log: {
        if ((y.array() + epsilon <= 0.0).any()) throw DataError("log transform needs y > -epsilon");
        return (y.array() + epsilon).log().matrix();
      }
      case TransformKind::MinMax:
        check_rows(y);
        return ((y.colwise() - min).array().colwise() / (max - min).array()).matrix();
    }
    return y;
  }

  /// Inverse; for the log transform inputs above log(FLT_MAX) are clamped
  /// and counted in `overflow`.
  MatrixXd inverse(const MatrixXd& z, std::size_t* overflow = nullptr) const {
    switch (kind) {
      case TransformKind::Identity: return z;
      case TransformKind::Log: {
        const double cap = log_clamp();
        if (overflow) *overflow += static_cast<std::size_t>((z.array() > cap).count());
        return (z.array().min(cap).exp() - epsilon).matrix();
      }
      case TransformKind::MinMax:
        check_rows(z);
        return ((z.array().colwise() * (max - min).array()).colwise() + min.array()).matrix();
    }
    return z;
  }

  /// Elementwise derivative of the inverse (zero where clamped).
  MatrixXd inverse_derivative(const MatrixXd& z) const {
    switch (kind) {
      case TransformKind::Identity: return MatrixXd::Ones(z.rows(), z.cols());
      case TransformKind::Log: {
        const double cap = log_clamp();
        return z.unaryExpr([cap](double v) { return v > cap ? 0.0 : std::exp(v); });
      }
      case TransformKind::MinMax:
        check_rows(z);
        return (max - min).replicate(1, z.cols());
    }
    return z;
  }

  friend bool operator==(const TargetTransform& a, const TargetTransform& b) {
    return a.kind == b.kind && a.epsilon == b.epsilon && a.min == b.min && a.max == b.max;
  }

private:
  void check_rows(const MatrixXd& m) const {
    if (m.rows() != min.size()) throw DimensionMismatch(static_cast<std::size_t>(min.size()), static_cast<std::size_t>(m.rows()));
  }
};

// ---------------------------------------------------------------------------
// Losses

/// Mean softmax cross-entropy over columns; fills d(loss)/d(logits).
inline double loss_classification(const MatrixXd& logits, const std::vector<int>& labels, MatrixXd* grad = nullptr) {
  if (static_cast<std::size_t>(logits.cols()) != labels.size())
    throw DimensionMismatch(static_cast<std::size_t>(logits.cols()), labels.size());
  if (labels.empty()) throw EmptyInput("no examples for the loss");
  const auto n = static_cast<double>(labels.size());
  if (grad) grad->resize(logits.rows(), logits.cols());
  double total = 0.0;
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const int y = labels[static_cast<std::size_t>(c)];
    if (y < 0 || y >= logits.rows()) throw DataError("class index out of range");
    const double m = logits.col(c).maxCoeff();
    const VectorXd e = (logits.col(c).array() - m).exp();
    const double z = e.sum();
    total += std::log(z) + m - logits(y, c);
    if (grad) {
      grad->col(c) = e / (z * n);
      (*grad)(y, c) -= 1.0 / n;
    }
  }
  return total / n;
}

/// MSE(pred_t, forward(target)) + MSE(inverse(pred_t), target), each a mean
/// over all components; fills d(loss)/d(pred_t).
inline double loss_regression_combined(const MatrixXd& pred_t, const MatrixXd& target, const TargetTransform& transform,
                                       MatrixXd* grad = nullptr, std::size_t* overflow = nullptr) {
  if (pred_t.rows() != target.rows() || pred_t.cols() != target.cols())
    throw DimensionMismatch(static_cast<std::size_t>(target.size()), static_cast<std::size_t>(pred_t.size()));
  if (pred_t.size() == 0) throw EmptyInput("no examples for the loss");
  const auto n = static_cast<double>(pred_t.size());
  const MatrixXd diff_t = pred_t - transform.forward(target);
  const MatrixXd diff_o = transform.inverse(pred_t, overflow) - target;
  if (grad) *grad = (2.0 / n) * (diff_t + diff_o.cwiseProduct(transform.inverse_derivative(pred_t)));
  return diff_t.squaredNorm() / n + diff_o.squaredNorm() / n;
}

/// Training target: class indices or original-scale regression targets.
struct Objective {
  enum class Kind { Classification, Regression } kind = Kind::Classification;
  std::vector<int> labels;
  std::size_t classes = 0;
  MatrixXd targets;  // output_dim x n, original scale
  TargetTransform transform;

  static Objective classification(std::vector<int> labels, std::size_t classes) {
    Objective o;
    o.kind = Kind::Classification;
    o.labels = std::move(labels);
    o.classes = classes;
    return o;
  }
  static Objective regression(MatrixXd targets, TargetTransform transform) {
    Objective o;
    o.kind = Kind::Regression;
    o.targets = std::move(targets);
    o.transform = std::move(transform);
    return o;
  }

  std::size_t size() const noexcept {
    return kind == Kind::Classification ? labels.size() : static_cast<std::size_t>(targets.cols());
  }
  std::size_t output_dim() const noexcept {
    return kind == Kind::Classification ? classes : static_cast<std::size_t>(targets.rows());
  }

  /// Loss over the selected columns of the targets.
  double evaluate(const MatrixXd& output, const std::vector<Eigen::Index>& cols, MatrixXd* grad = nullptr) const {
    if (kind == Kind::Classification) {
      std::vector<int> y;
      y.reserve(cols.size());
      for (auto c : cols) y.push_back(labels[static_cast<std::size_t>(c)]);
      return loss_classification(output, y, grad);
    }
    return loss_regression_combined(output, targets(Eigen::all, cols), transform, grad);
  }

  std::vector<Eigen::Index> all() const {
    std::vector<Eigen::Index> cols(size());
    std::iota(cols.begin(), cols.end(), Eigen::Index{0});
    return cols;
  }
};

// ---------------------------------------------------------------------------
// Training

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::size_t best_epoch = 0;  // index into val_loss
};

struct TrainResult {
  MLPParams params;
  TrainHistory history;
};

namespace probe_detail {

struct AdamState {
  Gradients m, v;
  std::size_t t = 0;
};

inline void adam_step(MLPParams& p, const Gradients& g, AdamState& s, double lr) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ++s.t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(s.t));
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  update(p.w1, g.w1, s.m.w1, s.v.w1);
  update(p.b1, g.b1, s.m.b1, s.v.b1);
  update(p.w2, g.w2, s.m.w2, s.v.w2);
  update(p.b2, g.b2, s.m.b2, s.v.b2);
}

inline Gradients zero_like(const MLPParams& p) {
  return {MatrixXd::Zero(p.w1.rows(), p.w1.cols()), VectorXd::Zero(p.b1.size()), MatrixXd::Zero(p.w2.rows(), p.w2.cols()),
          VectorXd::Zero(p.b2.size())};
}

}  // namespace probe_detail

/// Mini-batch Adam with seeded shuffling and early stopping on validation
/// loss. Returns the best-validation parameters rounded to float32.
inline TrainResult train(const MatrixXd& x_train, const Objective& y_train, const MatrixXd& x_val, const Objective& y_val,
                         const Hyperparams& hp) {
  hp.validate();
  if (x_train.cols() == 0 || x_val.cols() == 0) throw EmptyInput("training needs non-empty train and validation splits");
  if (static_cast<std::size_t>(x_train.cols()) != y_train.size() || static_cast<std::size_t>(x_val.cols()) != y_val.size())
    throw DimensionMismatch(static_cast<std::size_t>(x_train.cols()), y_train.size());
  if (x_val.rows() != x_train.rows())
    throw DimensionMismatch(static_cast<std::size_t>(x_train.rows()), static_cast<std::size_t>(x_val.rows()));

  std::mt19937_64 rng(hp.seed);
  MLPParams params = MLPParams::random(static_cast<std::size_t>(x_train.rows()), hp.hidden, y_train.output_dim(),
                                       hp.dropout, rng);
  probe_detail::AdamState adam{probe_detail::zero_like(params), probe_detail::zero_like(params), 0};
  TrainResult result{params, {}};
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<Eigen::Index> order = y_train.all();
  const auto val_cols = y_val.all();

  for (std::size_t epoch = 0; epoch < hp.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      const std::vector<Eigen::Index> cols(
          order.begin() + static_cast<std::ptrdiff_t>(start),
          order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + hp.batch_size)));
      const ForwardCache c = forward(params, x_train(Eigen::all, cols), &rng);
      MatrixXd d_out;
      const double loss = y_train.evaluate(c.output, cols, &d_out);
      if (!std::isfinite(loss) || !d_out.allFinite())
        throw NonFiniteLoss("non-finite training loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                            std::to_string(start));
      epoch_loss += loss * static_cast<double>(cols.size());
      probe_detail::adam_step(params, backward(params, c, d_out), adam, hp.learning_rate);
    }
    MLPParams snapshot = params;
    snapshot.round_to_float();
    const double val = y_val.evaluate(forward(snapshot, x_val).output, val_cols);
    if (!std::isfinite(val)) throw NonFiniteLoss("non-finite validation loss at epoch " + std::to_string(epoch));
    result.history.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));
    result.history.val_loss.push_back(val);
    if (val < best) {
      best = val;
      result.params = std::move(snapshot);
      result.history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= hp.patience) {
      break;
    }
  }
  return result;
}

/// Largest relative error between analytic and central-difference
/// (h = 1e-5) gradients over every parameter. Dropout is not applied.
inline double grad_check(const MLPParams& p, const MatrixXd& x, const Objective& objective) {
  const auto cols = objective.all();
  const ForwardCache c = forward(p, x);
  MatrixXd d_out;
  objective.evaluate(c.output, cols, &d_out);
  const Gradients g = backward(p, c, d_out);

  constexpr double h = 1e-5;
  double worst = 0.0;
  MLPParams q = p;
  auto check = [&](auto& param, const auto& grad) {
    for (Eigen::Index i = 0; i < param.size(); ++i) {
      const double saved = param.data()[i];
      param.data()[i] = saved + h;
      const double up = objective.evaluate(forward(q, x).output, cols);
      param.data()[i] = saved - h;
      const double down = objective.evaluate(forward(q, x).output, cols);
      param.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = grad.data()[i];
      const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
      worst = std::max(worst, std::abs(numeric - analytic) / scale);
    }
  };
  check(q.w1, g.w1);
  check(q.b1, g.b1);
  check(q.w2, g.w2);
  check(q.b2, g.b2);
  return worst;
}

// ---------------------------------------------------------------------------
// Checkpoints

struct ProbeModel {
  MLPParams params;
  TargetTransform transform;
  Hyperparams hp;
  std::vector<std::string> classes;  // classification label names, by index

  bool is_classifier() const noexcept { return !classes.empty(); }

  /// Eval-mode predictions on the original target scale (regression) or
  /// raw logits (classification), one example per column.
  MatrixXd predict(const MatrixXd& x) const {
    const MatrixXd out = forward(params, x).output;
    return is_classifier() ? out : transform.inverse(out);
  }

  std::vector<std::string> predict_labels(const MatrixXd& x) const {
    const MatrixXd out = forward(params, x).output;
    std::vector<std::string> labels;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      Eigen::Index best = 0;
      out.col(c).maxCoeff(&best);
      labels.push_back(classes.at(static_cast<std::size_t>(best)));
    }
    return labels;
  }
};

namespace probe_detail {

inline std::string pack(const MatrixXd& m) {
  Embedding v(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) v[static_cast<std::size_t>(i)] = static_cast<float>(m.data()[i]);
  return encode_floats_le(v);
}

inline MatrixXd unpack(const std::string& text, Eigen::Index rows, Eigen::Index cols) {
  const Embedding v = decode_floats_le(text);
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) throw DataError("checkpoint tensor has the wrong size");
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(v[static_cast<std::size_t>(i)]);
  return m;
}

}  // namespace probe_detail

/// JSON document; tensors are base64 little-endian float32 in column-major order.
inline nlohmann::json checkpoint_to_json(const ProbeModel& m) {
  const auto& p = m.params;
  auto vec = [](const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"format", "geoprobe-mlp-1"},
          {"shape", {p.input_dim(), p.hidden_dim(), p.output_dim()}},
          {"dropout", p.dropout},
          {"w1", probe_detail::pack(p.w1)},
          {"b1", probe_detail::pack(p.b1)},
          {"w2", probe_detail::pack(p.w2)},
          {"b2", probe_detail::pack(p.b2)},
          {"transform",
           {{"kind", to_string(m.transform.kind)},
            {"epsilon", m.transform.epsilon},
            {"min", vec(m.transform.min)},
            {"max", vec(m.transform.max)}}},
          {"hyperparams",
           {{"hidden", m.hp.hidden},
            {"dropout", m.hp.dropout},
            {"learning_rate", m.hp.learning_rate},
            {"batch_size", m.hp.batch_size},
            {"max_epochs", m.hp.max_epochs},
            {"patience", m.hp.patience},
            {"seed", m.hp.seed}}},
          {"classes", m.classes}};
}

inline ProbeModel checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "geoprobe-mlp-1") throw DataError("unknown checkpoint format");
    const auto shape = j.at("shape").get<std::vector<Eigen::Index>>();
    if (shape.size() != 3) throw DataError("checkpoint shape needs 3 entries");
    const auto [in, hidden, out] = std::tuple{shape[0], shape[1], shape[2]};
    ProbeModel m;
    m.params.w1 = probe_detail::unpack(j.at("w1"), hidden, in);
    m.params.b1 = probe_detail::unpack(j.at("b1"), hidden, 1);
    m.params.w2 = probe_detail::unpack(j.at("w2"), out, hidden);
    m.params.b2 = probe_detail::unpack(j.at("b2"), out, 1);
    m.params.dropout = j.at("dropout");
    const auto& t = j.at("transform");
    m.transform.kind = transform_kind_from_string(t.at("kind").get<std::string>());
    m.transform.epsilon = t.at("epsilon");
    const auto lo = t.at("min").get<std::vector<double>>(), hi = t.at("max").get<std::vector<double>>();
    m.transform.min = Eigen::Map<const VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    m.transform.max = Eigen::Map<const VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
    const auto& h = j.at("hyperparams");
    m.hp = {h.at("hidden"), h.at("dropout"), h.at("learning_rate"), h.at("batch_size"),
            h.at("max_epochs"), h.at("patience"), h.at("seed")};
    m.classes = j.at("classes").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const std::filesystem::path& path, const ProbeModel& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << checkpoint_to_json(m).dump() << '\n';
}

inline ProbeModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return checkpoint_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace geoprobe
