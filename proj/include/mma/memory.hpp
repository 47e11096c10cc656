#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace mma {

using Embedding = Eigen::VectorXd;

enum class Modality { kText, kVisionCaption };

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view s);

// Cosine similarity of two equally sized vectors. Throws on a dimension
// mismatch or a zero-norm operand instead of returning NaN.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine_similarity: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (!(na > Scalar(0)) || !(nb > Scalar(0))) {
    throw std::invalid_argument("cosine_similarity: zero-norm vector");
  }
  const Scalar s = a.dot(b) / (na * nb);
  // Rounding can push |s| a few ulps past 1.
  return std::clamp(s, Scalar(-1), Scalar(1));
}

struct MemoryItem {
  std::string id;
  std::string content;
  Embedding embedding;
  std::string source;
  double timestamp = 0.0;  // seconds since epoch
  Modality modality = Modality::kText;
};

// Source id -> trust prior in [0,1].
class SourceRegistry {
 public:
  explicit SourceRegistry(double default_prior = 0.5);

  void set(const std::string& source, double prior);
  void set_default(double prior);

  double prior(const std::string& source) const;
  bool contains(const std::string& source) const;
  double default_prior() const { return default_prior_; }
  const std::map<std::string, double>& entries() const { return entries_; }

  // Key-value text format: "source = prior" per line, "default = p" sets the
  // fallback, '#' starts a comment.
  static SourceRegistry parse(std::string_view text);
  static SourceRegistry load(const std::string& path);
  std::string serialize() const;

 private:
  std::map<std::string, double> entries_;
  double default_prior_;
};

// Text -> fixed-dimension vector. Implementations must be deterministic per
// input and return a vector with nonzero norm.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual Embedding embed(std::string_view text) const = 0;
};

// Lowercased alphanumeric tokens.
std::vector<std::string> tokenize(std::string_view text);

// 64-bit FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view bytes);

// Hashed bag-of-tokens embedding, L2-normalized. Each token adds one count to
// bucket fnv1a64(token) mod dimension.
Embedding embed_text(std::string_view content, std::size_t dimension);

class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dimension);
  std::size_t dimension() const override { return dimension_; }
  Embedding embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
};

struct RetrievalHit {
  const MemoryItem* item = nullptr;
  double similarity = 0.0;
};

// Flat store. Ingest first, then read; reads are const and may run
// concurrently.
class MemoryStore {
 public:
  explicit MemoryStore(std::size_t dimension, SourceRegistry registry = SourceRegistry{});

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  const std::vector<MemoryItem>& items() const { return items_; }
  const MemoryItem* find(const std::string& id) const;

  const SourceRegistry& registry() const { return registry_; }
  SourceRegistry& registry() { return registry_; }

  // Validates dimension, norm, timestamp and id uniqueness.
  void add(MemoryItem item);

 private:
  std::size_t dimension_;
  std::vector<MemoryItem> items_;
  std::unordered_map<std::string, std::size_t> index_;
  SourceRegistry registry_;
};

// Top-k by cosine similarity, descending; ties by ascending id.
std::vector<RetrievalHit> retrieve_topk(const MemoryStore& store, const Embedding& query,
                                        std::size_t k);

// JSONL dump: one item per line.
void write_memory_jsonl(const MemoryStore& store, std::ostream& out);
// dimension == 0 takes the dimension of the first item.
MemoryStore read_memory_jsonl(std::istream& in, std::size_t dimension,
                              SourceRegistry registry = SourceRegistry{});

}  // namespace mma
