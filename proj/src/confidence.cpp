#include "mma/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace mma {

ComponentMask ComponentMask::parse(std::string_view name) {
  if (name == "full") return {true, true, true};
  if (name == "st") return {true, true, false};
  if (name == "tc") return {false, true, true};
  if (name == "cs") return {true, false, true};
  ComponentMask m{false, false, false};
  std::size_t pos = 0;
  while (pos <= name.size()) {
    auto end = name.find('+', pos);
    if (end == std::string_view::npos) end = name.size();
    const auto part = name.substr(pos, end - pos);
    if (part == "source" || part == "s") {
      m.source = true;
    } else if (part == "time" || part == "t") {
      m.time = true;
    } else if (part == "consensus" || part == "c") {
      m.consensus = true;
    } else {
      throw std::invalid_argument("unknown component mask: " + std::string(name));
    }
    pos = end + 1;
  }
  return m;
}

std::string ComponentMask::name() const {
  if (source && time && consensus) return "full";
  if (source && time && !consensus) return "st";
  if (!source && time && consensus) return "tc";
  if (source && !time && consensus) return "cs";
  std::string out;
  auto add = [&out](const char* s) {
    if (!out.empty()) out += '+';
    out += s;
  };
  if (source) add("source");
  if (time) add("time");
  if (consensus) add("consensus");
  return out.empty() ? "none" : out;
}

void ConfidenceWeights::validate() const {
  if (!(source >= 0.0) || !(time >= 0.0) || !(consensus >= 0.0)) {
    throw std::invalid_argument("confidence weights must be nonnegative");
  }
  const double total = (mask.source ? source : 0.0) + (mask.time ? time : 0.0) +
                       (mask.consensus ? consensus : 0.0);
  if (!(total > 0.0)) {
    throw std::invalid_argument("confidence weights: every component is masked or zero-weighted");
  }
}

Eigen::Vector3d ConfidenceWeights::normalized() const {
  validate();
  Eigen::Vector3d w(mask.source ? source : 0.0, mask.time ? time : 0.0,
                    mask.consensus ? consensus : 0.0);
  return w / w.sum();
}

std::string_view to_string(EdgeWeighting w) {
  return w == EdgeWeighting::kUniform ? "uniform" : "abs_similarity";
}

EdgeWeighting parse_edge_weighting(std::string_view s) {
  if (s == "uniform") return EdgeWeighting::kUniform;
  if (s == "abs_similarity" || s == "abs-similarity") return EdgeWeighting::kAbsSimilarity;
  throw std::invalid_argument("unknown edge weighting: " + std::string(s));
}

double source_score(const MemoryItem& item, const SourceRegistry& registry) {
  return registry.prior(item.source);
}

double temporal_decay(double dt_seconds, double half_life_seconds) {
  if (!(half_life_seconds > 0.0)) throw std::invalid_argument("half-life must be positive");
  return std::exp(-std::numbers::ln2 / half_life_seconds * dt_seconds);
}

TemporalScore temporal_score(const MemoryItem& item, const TemporalConfig& cfg) {
  const double dt = cfg.now - item.timestamp;
  if (dt < 0.0) return {1.0, true};
  return {temporal_decay(dt, cfg.half_life_seconds), false};
}

double support_factor(const MemoryItem& i, const MemoryItem& j) {
  return cosine_similarity(i.embedding, j.embedding);
}

ConsensusResult consensus_from_support(std::span<const double> confidences,
                                       std::span<const double> supports,
                                       EdgeWeighting weighting) {
  if (confidences.size() != supports.size()) {
    throw std::invalid_argument("consensus: confidence/support length mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < confidences.size(); ++j) {
    const double c = confidences[j];
    if (!(c >= 0.0 && c <= 1.0)) {
      throw std::invalid_argument("consensus: neighbor confidence outside [0,1]");
    }
    const double w = weighting == EdgeWeighting::kUniform ? 1.0 : std::abs(supports[j]);
    num += w * c * supports[j];
    den += w;
  }
  if (!(den > 0.0)) return {0.0, true};
  return {num / den, false};
}

ConsensusResult network_consensus(const MemoryItem& item,
                                  std::span<const ConsensusNeighbor> neighbors,
                                  EdgeWeighting weighting) {
  std::vector<double> conf;
  std::vector<double> sigma;
  conf.reserve(neighbors.size());
  sigma.reserve(neighbors.size());
  for (const auto& n : neighbors) {
    conf.push_back(n.confidence);
    sigma.push_back(support_factor(item, *n.item));
  }
  return consensus_from_support(conf, sigma, weighting);
}

double combined_confidence(double source, double time, double consensus,
                           const ConfidenceWeights& w) {
  const Eigen::Vector3d wn = w.normalized();
  const double raw = wn.dot(Eigen::Vector3d(source, time, consensus));
  return std::clamp(raw, 0.0, 1.0);
}

double base_confidence(double source, double time, const ConfidenceWeights& w) {
  ConfidenceWeights st = w;
  st.mask.consensus = false;
  return combined_confidence(source, time, 0.0, st);
}

std::vector<ConfidenceReport> score_hits(std::span<const RetrievalHit> hits,
                                         const SourceRegistry& registry,
                                         const ConfidenceConfig& cfg) {
  cfg.weights.validate();
  if (cfg.consensus.rounds < 1) throw std::invalid_argument("consensus rounds must be >= 1");
  const auto n = hits.size();
  std::vector<ConfidenceReport> reports(n);
  if (n == 0) return reports;

  const auto& w = cfg.weights;
  ConfidenceWeights no_consensus = w;
  no_consensus.mask.consensus = false;
  no_consensus.validate();  // the first pass needs SOURCE or TIME

  Eigen::VectorXd conf(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& item = *hits[i].item;
    auto& r = reports[i];
    r.id = item.id;
    r.similarity = hits[i].similarity;
    r.source = source_score(item, registry);
    const auto t = temporal_score(item, cfg.temporal);
    r.time = t.value;
    r.future_timestamp = t.future_timestamp;
    r.base = base_confidence(r.source, r.time, w);
    r.combined = r.base;
    conf[static_cast<Eigen::Index>(i)] = r.base;
  }

  if (!w.mask.consensus) {
    for (auto& r : reports) r.consensus_masked = true;
    return reports;
  }

  // Support factors for every co-retrieved pair: Gram matrix of unit columns.
  const auto dim = hits.front().item->embedding.size();
  Eigen::MatrixXd unit(dim, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = hits[i].item->embedding;
    if (v.size() != dim) throw std::invalid_argument("score_hits: mixed embedding dimensions");
    const double norm = v.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("score_hits: zero-norm embedding");
    unit.col(static_cast<Eigen::Index>(i)) = v / norm;
  }
  const Eigen::MatrixXd support = (unit.transpose() * unit).cwiseMax(-1.0).cwiseMin(1.0);

  // Neighborhood: the K_n other items with the largest |sigma|, ties by id.
  std::vector<std::vector<std::size_t>> neighborhood(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> cand;
    cand.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) cand.push_back(j);
    }
    const auto si = static_cast<Eigen::Index>(i);
    std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
      const double sa = std::abs(support(si, static_cast<Eigen::Index>(a)));
      const double sb = std::abs(support(si, static_cast<Eigen::Index>(b)));
      if (sa != sb) return sa > sb;
      return reports[a].id < reports[b].id;
    });
    if (cand.size() > cfg.consensus.neighbors) cand.resize(cfg.consensus.neighbors);
    neighborhood[i] = std::move(cand);
    for (auto j : neighborhood[i]) reports[i].neighbor_ids.push_back(reports[j].id);
  }

  std::vector<double> nconf;
  std::vector<double> nsup;
  for (int round = 0; round < cfg.consensus.rounds; ++round) {
    Eigen::VectorXd next(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      nconf.clear();
      nsup.clear();
      for (auto j : neighborhood[i]) {
        nconf.push_back(conf[static_cast<Eigen::Index>(j)]);
        nsup.push_back(support(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
      auto& r = reports[i];
      const auto c = consensus_from_support(nconf, nsup, cfg.consensus.weighting);
      r.consensus = c.value;
      r.no_consensus_evidence = c.no_evidence;
      // No neighborhood: renormalize over source and time only.
      r.combined = c.no_evidence ? r.base : combined_confidence(r.source, r.time, c.value, w);
      next[static_cast<Eigen::Index>(i)] = r.combined;
    }
    conf = std::move(next);
  }
  return reports;
}

std::vector<ConfidenceReport> score_all(const MemoryStore& store, const Embedding& query,
                                        std::size_t k, const ConfidenceConfig& cfg) {
  const auto hits = retrieve_topk(store, query, k);
  return score_hits(hits, store.registry(), cfg);
}

std::vector<ConfidenceReport> rerank(std::vector<ConfidenceReport> reports) {
  std::sort(reports.begin(), reports.end(),
            [](const ConfidenceReport& a, const ConfidenceReport& b) {
              if (a.combined != b.combined) return a.combined > b.combined;
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              return a.id < b.id;
            });
  return reports;
}

std::string Decision::reason_string() const {
  if (reasons == kNoAbstain) return "answer";
  std::string out;
  auto add = [&out](const char* s) {
    if (!out.empty()) out += '+';
    out += s;
  };
  if (reasons & kNoEvidence) add("no-evidence");
  if (reasons & kLowConfidence) add("low-confidence");
  if (reasons & kConflict) add("conflict");
  return out;
}

Decision abstain_decision(std::span<const ConfidenceReport> reports, const AbstainPolicy& policy) {
  Decision d;
  if (reports.empty()) {
    d.reasons = kNoEvidence;
    return d;
  }
  const auto* top = &reports.front();
  for (const auto& r : reports) {
    if (r.combined > top->combined ||
        (r.combined == top->combined &&
         (r.similarity > top->similarity ||
          (r.similarity == top->similarity && r.id < top->id)))) {
      top = &r;
    }
  }
  d.top = *top;
  if (top->combined < policy.tau) d.reasons |= kLowConfidence;
  if (policy.conflict_veto && !top->consensus_masked && top->consensus < 0.0) {
    d.reasons |= kConflict;
  }
  d.answer = d.reasons == kNoAbstain;
  return d;
}

}  // namespace mma
