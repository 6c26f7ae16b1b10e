#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <openssl/evp.h>
#include <openssl/sha.h>

// Eigen must precede httplib: <resolv.h> defines a _res macro that breaks Eigen.
#include <Eigen/Core>

#include "httplib.h"
#include "json.hpp"

#include "geoprobe/de9im.hpp"
#include "geoprobe/errors.hpp"
#include "geoprobe/geometry.hpp"
#include "geoprobe/wkt.hpp"

namespace geoprobe {

using Embedding = std::vector<float>;

// ---------------------------------------------------------------------------
// Tokenization and windowing

/// Maximal runs of letters, runs of {digits, '.', '-'}, or single
/// punctuation characters. Whitespace separates tokens and is dropped.
/// Bytes >= 0x80 count as letters so UTF-8 words stay whole.
inline std::vector<std::string> tokenize_reference(std::string_view text) {
  enum class Class { Space, Letter, Number, Punct };
  auto classify_byte = [](unsigned char c) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') return Class::Space;
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c >= 0x80) return Class::Letter;
    if ((c >= '0' && c <= '9') || c == '.' || c == '-') return Class::Number;
    return Class::Punct;
  };
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const Class c = classify_byte(static_cast<unsigned char>(text[i]));
    if (c == Class::Space) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (c != Class::Punct)
      while (j < text.size() && classify_byte(static_cast<unsigned char>(text[j])) == c) ++j;
    out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

struct Segment {
  std::size_t begin;
  std::size_t end;  // exclusive

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Segments start at 0, W-O, 2(W-O), ... and stop at the first one that
/// reaches the end of the sequence.
inline std::vector<Segment> window_segments(std::size_t n_tokens, std::size_t window, std::size_t overlap) {
  if (!(overlap < window) || overlap == 0) throw ConfigError("window requires 0 < overlap < window");
  std::vector<Segment> out;
  if (n_tokens == 0) return out;
  const std::size_t stride = window - overlap;
  for (std::size_t start = 0;; start += stride) {
    out.push_back({start, std::min(start + window, n_tokens)});
    if (start + window >= n_tokens) break;
  }
  return out;
}

template <typename T>
std::vector<std::vector<T>> window_segments(const std::vector<T>& tokens, std::size_t window, std::size_t overlap) {
  std::vector<std::vector<T>> out;
  for (const auto& s : window_segments(tokens.size(), window, overlap))
    out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(s.begin),
                     tokens.begin() + static_cast<std::ptrdiff_t>(s.end));
  return out;
}

// ---------------------------------------------------------------------------
// Byte helpers

inline std::string base64_encode(std::span<const unsigned char> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

inline std::vector<unsigned char> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw DataError("base64 length is not a multiple of 4");
  std::vector<unsigned char> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw DataError("invalid base64");
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

inline std::string encode_floats_le(const Embedding& v) {
  std::vector<unsigned char> bytes(v.size() * 4);
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto word = std::bit_cast<std::uint32_t>(v[i]);
    for (int b = 0; b < 4; ++b) bytes[4 * i + static_cast<std::size_t>(b)] = static_cast<unsigned char>(word >> (8 * b));
  }
  return base64_encode(bytes);
}

inline Embedding decode_floats_le(std::string_view text) {
  const auto bytes = base64_decode(text);
  if (bytes.size() % 4 != 0) throw DataError("float payload is not a multiple of 4 bytes");
  Embedding v(bytes.size() / 4);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint32_t word = 0;
    for (int b = 0; b < 4; ++b) word |= static_cast<std::uint32_t>(bytes[4 * i + static_cast<std::size_t>(b)]) << (8 * b);
    v[i] = std::bit_cast<float>(word);
  }
  return v;
}

/// Stable 64-bit key from SHA-256(text || seed).
inline std::uint64_t stable_hash(std::string_view text, std::uint64_t seed) {
  std::string buf(text);
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>(seed >> (8 * b)));
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(reinterpret_cast<const unsigned char*>(buf.data()), buf.size(), digest.data());
  std::uint64_t out = 0;
  for (int b = 0; b < 8; ++b) out |= static_cast<std::uint64_t>(digest[static_cast<std::size_t>(b)]) << (8 * b);
  return out;
}

// ---------------------------------------------------------------------------
// Encoders

inline void check_finite(const Embedding& v, const char* what) {
  for (float x : v)
    if (!std::isfinite(x)) throw ProviderError(std::string(what) + " produced a non-finite value");
}

inline Embedding concat(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  Embedding out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

class Encoder {
public:
  virtual ~Encoder() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  /// One vector per text, in order.
  virtual std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const = 0;

  Embedding embed_text(const std::string& text) const { return embed_batch({text}).front(); }
};

struct ReferenceEncoderConfig {
  std::size_t dim = 768;
  std::size_t window = 512;
  std::size_t overlap = 256;
  std::uint64_t seed = 0;
  double position_weight = 0.1;
};

/// Deterministic LLM-free encoder. A token at position i of its segment maps
/// to t + w * normalize(t ⊙ s_i): t is a unit-norm pseudo-random vector keyed
/// by hash(token, seed) and s_i a sinusoidal position code. The mixing term
/// is multiplicative because an additive one cancels out of the mean. The
/// sequence vector is the mean over every token of every window.
class ReferenceEncoder final : public Encoder {
public:
  explicit ReferenceEncoder(ReferenceEncoderConfig cfg = {}) : cfg_(cfg) {
    if (cfg_.dim == 0) throw ConfigError("encoder dimension must be positive");
    window_segments(0, cfg_.window, cfg_.overlap);  // validates W and O
    if (!(cfg_.position_weight >= 0.0)) throw ConfigError("position weight must be non-negative");
  }

  const ReferenceEncoderConfig& config() const noexcept { return cfg_; }

  std::string id() const override {
    return "reference-d" + std::to_string(cfg_.dim) + "-s" + std::to_string(cfg_.seed) + "-w" +
           std::to_string(cfg_.window) + "-o" + std::to_string(cfg_.overlap);
  }
  std::size_t dim() const override { return cfg_.dim; }

  /// Unit-norm token vector without the position term.
  std::vector<double> token_vector(const std::string& token) const {
    const bool memo = !is_numeric(token);
    if (memo) {
      std::shared_lock lock(mutex_);
      if (auto it = token_memo_.find(token); it != token_memo_.end()) return it->second;
    }
    std::mt19937_64 rng(stable_hash(token, cfg_.seed));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(cfg_.dim);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& x : v) {
        x = normal(rng);
        norm += x * x;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    if (memo) {
      std::unique_lock lock(mutex_);
      token_memo_.emplace(token, v);
    }
    return v;
  }

  /// Sinusoidal code of a position within a segment, entries in [-1, 1].
  std::vector<double> position_vector(std::size_t pos) const {
    {
      std::shared_lock lock(mutex_);
      if (pos < position_memo_.size()) return position_memo_[pos];
    }
    std::unique_lock lock(mutex_);
    while (position_memo_.size() <= pos) {
      const auto p = static_cast<double>(position_memo_.size());
      std::vector<double> v(cfg_.dim);
      for (std::size_t j = 0; j < cfg_.dim; ++j) {
        const double freq = std::pow(10000.0, -static_cast<double>(2 * (j / 2)) / static_cast<double>(cfg_.dim));
        v[j] = (j % 2 == 0) ? std::sin(p * freq) : std::cos(p * freq);
      }
      position_memo_.push_back(std::move(v));
    }
    return position_memo_[pos];
  }

  /// Vectors for a token list, each at its index (the position within one segment).
  std::vector<std::vector<double>> token_vectors(const std::vector<std::string>& tokens) const {
    std::vector<std::vector<double>> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto v = token_vector(tokens[i]);
      if (cfg_.position_weight > 0.0) {
        const auto p = position_vector(i);
        std::vector<double> mix(v.size());
        double norm = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
          mix[j] = v[j] * p[j];
          norm += mix[j] * mix[j];
        }
        if (norm > 0.0) {
          const double scale = cfg_.position_weight / std::sqrt(norm);
          for (std::size_t j = 0; j < v.size(); ++j) v[j] += scale * mix[j];
        }
      }
      out.push_back(std::move(v));
    }
    return out;
  }

  std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const override {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& text : texts) out.push_back(embed_one(text));
    return out;
  }

private:
  static bool is_numeric(const std::string& token) {
    return !token.empty() && ((token[0] >= '0' && token[0] <= '9') || token[0] == '-' || token[0] == '.');
  }

  Embedding embed_one(const std::string& text) const {
    const auto tokens = tokenize_reference(text);
    if (tokens.empty()) throw EmptyInput("cannot embed text without tokens");
    std::vector<double> sum(cfg_.dim, 0.0);
    std::size_t count = 0;
    for (const auto& segment : window_segments(tokens, cfg_.window, cfg_.overlap)) {
      for (const auto& v : token_vectors(segment))
        for (std::size_t j = 0; j < cfg_.dim; ++j) sum[j] += v[j];
      count += segment.size();
    }
    Embedding out(cfg_.dim);
    for (std::size_t j = 0; j < cfg_.dim; ++j) out[j] = static_cast<float>(sum[j] / static_cast<double>(count));
    return out;
  }

  ReferenceEncoderConfig cfg_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::string, std::vector<double>> token_memo_;
  mutable std::vector<std::vector<double>> position_memo_;
};

struct ProviderConfig {
  std::string endpoint = "http://127.0.0.1:8080";
  std::string model = "gpt2";
  std::size_t window = 512;
  std::size_t overlap = 256;
  std::size_t batch_size = 32;
  std::size_t expected_dim = 0;  // 0 accepts the provider's dimension
  int timeout_seconds = 300;
};

/// Client for POST /embed. The provider tokenizes and windows; W and O are
/// sent with every request.
class ProviderEncoder final : public Encoder {
public:
  explicit ProviderEncoder(ProviderConfig cfg) : cfg_(std::move(cfg)), dim_(cfg_.expected_dim) {
    window_segments(0, cfg_.window, cfg_.overlap);
    if (cfg_.batch_size == 0) throw ConfigError("provider batch size must be positive");
    if (cfg_.endpoint.empty()) throw ConfigError("provider endpoint is empty");
  }

  std::string id() const override { return "provider-" + cfg_.model; }

  /// Known after the first reply unless fixed in the config.
  std::size_t dim() const override {
    std::lock_guard lock(mutex_);
    return dim_;
  }

  std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const override {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += cfg_.batch_size) {
      const std::vector<std::string> chunk(
          texts.begin() + static_cast<std::ptrdiff_t>(start),
          texts.begin() + static_cast<std::ptrdiff_t>(std::min(texts.size(), start + cfg_.batch_size)));
      for (auto& v : request(chunk)) out.push_back(std::move(v));
    }
    return out;
  }

private:
  std::vector<Embedding> request(const std::vector<std::string>& texts) const {
    for (const auto& t : texts)
      if (tokenize_reference(t).empty()) throw EmptyInput("cannot embed text without tokens");
    const nlohmann::json body = {
        {"model", cfg_.model}, {"window", cfg_.window}, {"overlap", cfg_.overlap}, {"texts", texts}};
    httplib::Client client(cfg_.endpoint);
    client.set_connection_timeout(10);
    client.set_read_timeout(cfg_.timeout_seconds);
    const auto res = client.Post("/embed", body.dump(), "application/json");
    if (!res) throw ProviderError("provider unreachable at " + cfg_.endpoint + ": " + httplib::to_string(res.error()));
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
      throw ProviderError("provider returned status " + std::to_string(res->status) + " with a non-JSON body");
    }
    if (res->status < 200 || res->status >= 300) {
      const std::string msg = reply.is_object() && reply.contains("error") && reply["error"].is_string()
                                  ? reply["error"].get<std::string>()
                                  : res->body;
      throw ProviderError("provider error " + std::to_string(res->status) + ": " + msg);
    }
    try {
      const auto dim = reply.at("dim").get<std::size_t>();
      const auto& rows = reply.at("embeddings");
      if (dim == 0) throw ProviderError("provider reported dim 0");
      if (!rows.is_array() || rows.size() != texts.size())
        throw ProviderError("provider returned " + std::to_string(rows.size()) + " embeddings for " +
                            std::to_string(texts.size()) + " texts");
      {
        std::lock_guard lock(mutex_);
        if (dim_ == 0) dim_ = dim;
        if (dim != dim_) throw ProviderError("provider dimension " + std::to_string(dim) + ", expected " +
                                             std::to_string(dim_));
      }
      std::vector<Embedding> out;
      for (const auto& row : rows) {
        if (!row.is_array() || row.size() != dim) throw ProviderError("embedding length does not match dim");
        Embedding v;
        v.reserve(dim);
        for (const auto& x : row) {
          if (!x.is_number()) throw ProviderError("embedding entry is not a number");
          v.push_back(x.get<float>());
        }
        check_finite(v, "provider");
        out.push_back(std::move(v));
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("malformed provider reply: ") + e.what());
    }
  }

  ProviderConfig cfg_;
  mutable std::mutex mutex_;
  mutable std::size_t dim_;
};

// ---------------------------------------------------------------------------
// Relation phrases

struct RelationPhrase {
  Predicate predicate;
  std::string wkt;

  friend bool operator==(const RelationPhrase&, const RelationPhrase&) = default;
};

inline std::string phrase_predicate_text(Predicate p) {
  if (p == Predicate::DisjointButNear) return "disjoint but near";
  return std::string(to_string(p));
}

inline std::string render(const RelationPhrase& p) { return phrase_predicate_text(p.predicate) + " " + p.wkt; }

inline RelationPhrase parse_relation_phrase(std::string_view text) {
  // Longest names first so "disjoint but near" wins over "disjoint".
  std::vector<Predicate> order{Predicate::DisjointButNear};
  for (Predicate p : kNamedPredicates) order.push_back(p);
  for (Predicate p : order) {
    const std::string prefix = phrase_predicate_text(p) + " ";
    if (text.substr(0, prefix.size()) == prefix) return {p, std::string(text.substr(prefix.size()))};
  }
  throw DataError("relation phrase does not start with a predicate: " + std::string(text));
}

// ---------------------------------------------------------------------------
// Embedding cache

/// Vectors keyed by item id for one encoder. File format: one
/// "<id>\t<base64 little-endian float32>" record per line, preceded by a
/// "# encoder <id>" comment.
class EmbeddingCache {
public:
  EmbeddingCache() = default;
  explicit EmbeddingCache(std::string encoder_id) : encoder_id_(std::move(encoder_id)) {}
  EmbeddingCache(EmbeddingCache&& other) noexcept
      : encoder_id_(std::move(other.encoder_id_)), items_(std::move(other.items_)) {}
  EmbeddingCache& operator=(EmbeddingCache&& other) noexcept {
    std::unique_lock lock(mutex_);
    encoder_id_ = std::move(other.encoder_id_);
    items_ = std::move(other.items_);
    return *this;
  }

  const std::string& encoder_id() const noexcept { return encoder_id_; }

  std::optional<Embedding> get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = items_.find(id);
    if (it == items_.end()) return std::nullopt;
    return it->second;
  }

  const Embedding& at(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = items_.find(id);
    if (it == items_.end()) throw DataError("no embedding for '" + id + "'");
    return it->second;
  }

  void put(const std::string& id, Embedding v) {
    std::unique_lock lock(mutex_);
    if (!items_.empty() && items_.begin()->second.size() != v.size())
      throw DimensionMismatch(items_.begin()->second.size(), v.size());
    items_[id] = std::move(v);
  }

  bool contains(const std::string& id) const {
    std::shared_lock lock(mutex_);
    return items_.count(id) != 0;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return items_.size();
  }

  std::size_t dim() const {
    std::shared_lock lock(mutex_);
    return items_.empty() ? 0 : items_.begin()->second.size();
  }

  void save(const std::filesystem::path& path) const {
    std::shared_lock lock(mutex_);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    if (!encoder_id_.empty()) out << "# encoder " << encoder_id_ << '\n';
    for (const auto& [id, v] : items_) out << id << '\t' << encode_floats_le(v) << '\n';
  }

  static EmbeddingCache load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    EmbeddingCache cache;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line[0] == '#') {
        constexpr std::string_view tag = "# encoder ";
        if (line.compare(0, tag.size(), tag) == 0) cache.encoder_id_ = line.substr(tag.size());
        continue;
      }
      const auto tab = line.find('\t');
      const std::string where = path.filename().string() + ":" + std::to_string(n);
      if (tab == std::string::npos) throw DataError(where + ": expected <id>\\t<base64>");
      try {
        cache.put(line.substr(0, tab), decode_floats_le(std::string_view(line).substr(tab + 1)));
      } catch (const Error& e) {
        throw DataError(where + ": " + e.what());
      }
    }
    return cache;
  }

private:
  std::string encoder_id_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Embedding> items_;
};

inline std::string phrase_key(const std::string& object_id, Predicate p) {
  return "phrase:" + object_id + "|" + std::string(to_string(p));
}

/// Embeds and caches every record not yet in the cache; returns the count
/// of new embeddings.
inline std::size_t encode_geometries(const Encoder& enc, const std::vector<GeometryRecord>& records,
                                     EmbeddingCache& cache, std::size_t batch = 256) {
  std::vector<const GeometryRecord*> todo;
  for (const auto& r : records)
    if (!cache.contains(r.id)) todo.push_back(&r);
  for (std::size_t start = 0; start < todo.size(); start += batch) {
    std::vector<std::string> texts;
    const std::size_t stop = std::min(todo.size(), start + batch);
    for (std::size_t i = start; i < stop; ++i) texts.push_back(format_wkt(todo[i]->geometry));
    auto vectors = enc.embed_batch(texts);
    for (std::size_t i = start; i < stop; ++i) cache.put(todo[i]->id, std::move(vectors[i - start]));
  }
  return todo.size();
}

inline Embedding encode_geometry(const Encoder& enc, const GeometryRecord& record, EmbeddingCache& cache) {
  if (auto hit = cache.get(record.id)) return *hit;
  Embedding v = enc.embed_text(format_wkt(record.geometry));
  cache.put(record.id, v);
  return v;
}

inline Embedding encode_relation_phrase(const Encoder& enc, const RelationPhrase& phrase) {
  return enc.embed_text(render(phrase));
}

}  // namespace geoprobe
