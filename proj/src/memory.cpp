#include "mma/memory.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace mma {

using json = nlohmann::json;

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::kText:
      return "TEXT";
    case Modality::kVisionCaption:
      return "VISION_CAPTION";
  }
  return "TEXT";
}

Modality parse_modality(std::string_view s) {
  if (s == "TEXT") return Modality::kText;
  if (s == "VISION_CAPTION") return Modality::kVisionCaption;
  throw std::invalid_argument("unknown modality: " + std::string(s));
}

namespace {

void check_prior(double p, std::string_view what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": prior must lie in [0,1], got " +
                                std::to_string(p));
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

SourceRegistry::SourceRegistry(double default_prior) : default_prior_(default_prior) {
  check_prior(default_prior, "SourceRegistry default");
}

void SourceRegistry::set(const std::string& source, double prior) {
  check_prior(prior, source);
  entries_[source] = prior;
}

void SourceRegistry::set_default(double prior) {
  check_prior(prior, "SourceRegistry default");
  default_prior_ = prior;
}

double SourceRegistry::prior(const std::string& source) const {
  auto it = entries_.find(source);
  return it == entries_.end() ? default_prior_ : it->second;
}

bool SourceRegistry::contains(const std::string& source) const {
  return entries_.count(source) > 0;
}

SourceRegistry SourceRegistry::parse(std::string_view text) {
  SourceRegistry reg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("source registry line " + std::to_string(lineno) +
                                  ": expected 'source = prior'");
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    double p = 0.0;
    try {
      std::size_t used = 0;
      p = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("source registry line " + std::to_string(lineno) +
                                  ": bad prior '" + value + "'");
    }
    if (key == "default") {
      reg.set_default(p);
    } else {
      reg.set(key, p);
    }
  }
  return reg;
}

SourceRegistry SourceRegistry::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open source registry: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string SourceRegistry::serialize() const {
  std::ostringstream out;
  out.precision(17);
  out << "default = " << default_prior_ << "\n";
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
  return out.str();
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

Embedding embed_text(std::string_view content, std::size_t dimension) {
  if (dimension < 8) throw std::invalid_argument("embed_text: dimension must be >= 8");
  if (content.empty()) throw std::invalid_argument("embed_text: empty text");
  const auto tokens = tokenize(content);
  if (tokens.empty()) throw std::invalid_argument("embed_text: text has no tokens");
  Embedding v = Embedding::Zero(static_cast<Eigen::Index>(dimension));
  for (const auto& t : tokens) {
    v[static_cast<Eigen::Index>(fnv1a64(t) % dimension)] += 1.0;
  }
  v /= v.norm();
  return v;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension < 8) throw std::invalid_argument("HashingEmbedder: dimension must be >= 8");
}

Embedding HashingEmbedder::embed(std::string_view text) const {
  return embed_text(text, dimension_);
}

MemoryStore::MemoryStore(std::size_t dimension, SourceRegistry registry)
    : dimension_(dimension), registry_(std::move(registry)) {
  if (dimension == 0) throw std::invalid_argument("MemoryStore: dimension must be positive");
}

const MemoryItem* MemoryStore::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &items_[it->second];
}

void MemoryStore::add(MemoryItem item) {
  if (static_cast<std::size_t>(item.embedding.size()) != dimension_) {
    throw std::invalid_argument("MemoryStore::add: item '" + item.id + "' has dimension " +
                                std::to_string(item.embedding.size()) + ", store expects " +
                                std::to_string(dimension_));
  }
  if (!(item.embedding.norm() > 0.0)) {
    throw std::invalid_argument("MemoryStore::add: item '" + item.id + "' has zero-norm embedding");
  }
  if (!(item.timestamp >= 0.0)) {
    throw std::invalid_argument("MemoryStore::add: item '" + item.id + "' has negative timestamp");
  }
  if (index_.count(item.id)) {
    throw std::invalid_argument("MemoryStore::add: duplicate id '" + item.id + "'");
  }
  index_.emplace(item.id, items_.size());
  items_.push_back(std::move(item));
}

std::vector<RetrievalHit> retrieve_topk(const MemoryStore& store, const Embedding& query,
                                        std::size_t k) {
  if (k == 0) throw std::invalid_argument("retrieve_topk: k must be >= 1");
  if (static_cast<std::size_t>(query.size()) != store.dimension()) {
    throw std::invalid_argument("retrieve_topk: query dimension mismatch");
  }
  std::vector<RetrievalHit> hits;
  hits.reserve(store.size());
  for (const auto& item : store.items()) {
    hits.push_back({&item, cosine_similarity(item.embedding, query)});
  }
  const auto n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(),
                    [](const RetrievalHit& a, const RetrievalHit& b) {
                      if (a.similarity != b.similarity) return a.similarity > b.similarity;
                      return a.item->id < b.item->id;
                    });
  hits.resize(n);
  return hits;
}

void write_memory_jsonl(const MemoryStore& store, std::ostream& out) {
  for (const auto& item : store.items()) {
    json j;
    j["id"] = item.id;
    j["content"] = item.content;
    j["source"] = item.source;
    j["timestamp"] = item.timestamp;
    j["modality"] = to_string(item.modality);
    j["embedding"] = std::vector<double>(item.embedding.data(),
                                         item.embedding.data() + item.embedding.size());
    out << j.dump() << "\n";
  }
}

MemoryStore read_memory_jsonl(std::istream& in, std::size_t dimension, SourceRegistry registry) {
  std::vector<MemoryItem> items;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      MemoryItem item;
      item.id = j.at("id").get<std::string>();
      item.content = j.at("content").get<std::string>();
      item.source = j.at("source").get<std::string>();
      item.timestamp = j.at("timestamp").get<double>();
      item.modality = parse_modality(j.value("modality", std::string("TEXT")));
      const auto v = j.at("embedding").get<std::vector<double>>();
      item.embedding = Eigen::Map<const Embedding>(v.data(), static_cast<Eigen::Index>(v.size()));
      items.push_back(std::move(item));
    } catch (const std::exception& e) {
      throw std::invalid_argument("memory dump line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (dimension == 0) {
    if (items.empty()) throw std::invalid_argument("memory dump is empty; dimension unknown");
    dimension = static_cast<std::size_t>(items.front().embedding.size());
  }
  MemoryStore store(dimension, std::move(registry));
  for (auto& item : items) store.add(std::move(item));
  return store;
}

}  // namespace mma
