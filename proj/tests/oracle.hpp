#pragma once

// Straight-line reference for one consensus pass, written from the scoring
// definitions without touching the library's scoring code: plain loops, no
// Eigen reductions, pow(0.5, .) for the decay.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct Item {
  std::string id;
  std::vector<double> embedding;
  std::string source;
  double timestamp = 0.0;
};

struct Params {
  double ws = 1.0, wt = 1.0, wc = 1.0;
  bool use_s = true, use_t = true, use_c = true;
  double half_life = 30.0 * 86400.0;
  double now = 0.0;
  std::size_t neighbors = 5;
  bool abs_weights = false;
  std::map<std::string, double> priors;
  double default_prior = 0.5;
};

struct Score {
  std::string id;
  double similarity, s, t, c, combined;
};

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  double s = dot / std::sqrt(na * nb);
  if (s > 1.0) s = 1.0;
  if (s < -1.0) s = -1.0;
  return s;
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Scores the top-k items for the query with a single consensus pass.
inline std::vector<Score> score(const std::vector<Item>& items, const std::vector<double>& query,
                                std::size_t k, const Params& p) {
  // Retrieval: full sort by similarity, then id.
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < items.size(); ++i) order.emplace_back(cosine(items[i].embedding, query), i);
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return items[a.second].id < items[b.second].id;
  });
  if (order.size() > k) order.resize(k);

  const double ws = p.use_s ? p.ws : 0.0;
  const double wt = p.use_t ? p.wt : 0.0;
  const double wc = p.use_c ? p.wc : 0.0;

  std::vector<Score> out;
  std::vector<double> base;
  for (const auto& [sim, idx] : order) {
    const Item& it = items[idx];
    auto f = p.priors.find(it.source);
    const double s = f == p.priors.end() ? p.default_prior : f->second;
    double dt = p.now - it.timestamp;
    if (dt < 0.0) dt = 0.0;
    const double t = std::pow(0.5, dt / p.half_life);
    base.push_back(clamp01((ws * s + wt * t) / (ws + wt)));
    out.push_back({it.id, sim, s, t, 0.0, 0.0});
  }

  for (std::size_t i = 0; i < out.size(); ++i) {
    if (wc == 0.0) {
      out[i].combined = base[i];
      continue;
    }
    const Item& a = items[order[i].second];
    std::vector<std::pair<double, std::size_t>> cand;  // (sigma, j)
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (j == i) continue;
      cand.emplace_back(cosine(a.embedding, items[order[j].second].embedding), j);
    }
    std::sort(cand.begin(), cand.end(), [&](const auto& x, const auto& y) {
      if (std::abs(x.first) != std::abs(y.first)) return std::abs(x.first) > std::abs(y.first);
      return out[x.second].id < out[y.second].id;
    });
    if (cand.size() > p.neighbors) cand.resize(p.neighbors);
    double num = 0.0, den = 0.0;
    for (const auto& [sigma, j] : cand) {
      const double w = p.abs_weights ? std::abs(sigma) : 1.0;
      num += w * base[j] * sigma;
      den += w;
    }
    if (den > 0.0) {
      out[i].c = num / den;
      out[i].combined = clamp01((ws * out[i].s + wt * out[i].t + wc * out[i].c) / (ws + wt + wc));
    } else {
      out[i].combined = base[i];
    }
  }
  return out;
}

}  // namespace oracle
