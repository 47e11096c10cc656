#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mma/memory.hpp"

namespace mma {

inline constexpr double kSecondsPerDay = 86400.0;

// Which confidence components take part in the weighted sum. The named
// ablation variants keep two components each: `st` drops consensus, `tc` drops
// source, `cs` drops time.
struct ComponentMask {
  bool source = true;
  bool time = true;
  bool consensus = true;

  static ComponentMask full() { return {}; }
  // Accepts "full", "st", "tc", "cs", or a '+'-joined list such as
  // "source+consensus".
  static ComponentMask parse(std::string_view name);
  std::string name() const;
  bool any() const { return source || time || consensus; }

  friend bool operator==(const ComponentMask&, const ComponentMask&) = default;
};

struct ConfidenceWeights {
  double source = 1.0;
  double time = 1.0;
  double consensus = 1.0;
  ComponentMask mask;

  // Throws unless the weights are nonnegative and some unmasked weight is > 0.
  void validate() const;
  // w'_k = w_k / sum of unmasked weights; masked entries are 0. Order is
  // (source, time, consensus).
  Eigen::Vector3d normalized() const;
};

struct TemporalConfig {
  double half_life_seconds = 30.0 * kSecondsPerDay;
  double now = 0.0;

  static TemporalConfig from_days(double half_life_days, double now) {
    return {half_life_days * kSecondsPerDay, now};
  }
};

enum class EdgeWeighting { kUniform, kAbsSimilarity };

std::string_view to_string(EdgeWeighting w);
EdgeWeighting parse_edge_weighting(std::string_view s);

struct ConsensusConfig {
  std::size_t neighbors = 5;  // K_n
  int rounds = 1;             // R
  EdgeWeighting weighting = EdgeWeighting::kUniform;
};

struct AbstainPolicy {
  double tau = 0.5;
  bool conflict_veto = true;
};

struct ConfidenceConfig {
  ConfidenceWeights weights;
  TemporalConfig temporal;
  ConsensusConfig consensus;
  AbstainPolicy abstain;
};

double source_score(const MemoryItem& item, const SourceRegistry& registry);

// exp(-ln2 * dt / half_life).
double temporal_decay(double dt_seconds, double half_life_seconds);

struct TemporalScore {
  double value = 1.0;
  bool future_timestamp = false;  // dt was negative and clamped to 0
};

TemporalScore temporal_score(const MemoryItem& item, const TemporalConfig& cfg);

double support_factor(const MemoryItem& i, const MemoryItem& j);

struct ConsensusNeighbor {
  const MemoryItem* item = nullptr;
  double confidence = 0.0;
};

struct ConsensusResult {
  double value = 0.0;
  bool no_evidence = false;
};

// Weighted mean of neighbor confidence times support factor. An empty
// neighborhood (or one whose edge weights sum to zero) yields 0 flagged as
// no evidence.
ConsensusResult network_consensus(const MemoryItem& item,
                                  std::span<const ConsensusNeighbor> neighbors,
                                  EdgeWeighting weighting = EdgeWeighting::kUniform);

// Same fold over precomputed (confidence, support) pairs.
ConsensusResult consensus_from_support(std::span<const double> confidences,
                                       std::span<const double> supports,
                                       EdgeWeighting weighting);

// Clamped, self-normalized weighted sum over the unmasked components.
double combined_confidence(double source, double time, double consensus,
                           const ConfidenceWeights& w);

// The (source, time)-only combination used as neighbor confidence on the
// first consensus pass. Throws if neither component is active.
double base_confidence(double source, double time, const ConfidenceWeights& w);

struct ConfidenceReport {
  std::string id;
  double similarity = 0.0;
  double source = 0.0;
  double time = 0.0;
  double consensus = 0.0;
  double base = 0.0;
  double combined = 0.0;
  std::vector<std::string> neighbor_ids;
  bool future_timestamp = false;
  bool no_consensus_evidence = false;
  bool consensus_masked = false;
};

// Scores already retrieved hits, in hit order.
std::vector<ConfidenceReport> score_hits(std::span<const RetrievalHit> hits,
                                         const SourceRegistry& registry,
                                         const ConfidenceConfig& cfg);

// Retrieves the top-k items for the query and scores them.
std::vector<ConfidenceReport> score_all(const MemoryStore& store, const Embedding& query,
                                        std::size_t k, const ConfidenceConfig& cfg);

// Combined confidence descending, then retrieval similarity descending, then id.
std::vector<ConfidenceReport> rerank(std::vector<ConfidenceReport> reports);

enum AbstainReason : unsigned {
  kNoAbstain = 0,
  kNoEvidence = 1u << 0,
  kLowConfidence = 1u << 1,
  kConflict = 1u << 2,
};

struct Decision {
  bool answer = false;
  std::optional<ConfidenceReport> top;  // highest-ranked report, if any
  unsigned reasons = kNoAbstain;

  // "no-evidence", "low-confidence", "conflict" joined by '+', or "answer".
  std::string reason_string() const;
};

Decision abstain_decision(std::span<const ConfidenceReport> reports, const AbstainPolicy& policy);

}  // namespace mma
