/* Copyright 2026 The SGN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "sgn/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "sgn/types.h"
#include "sgn/vocabulary.h"

namespace sgn {
namespace {

constexpr int kMaxN = 4;

struct NgramHash {
  std::size_t operator()(const Tokens& t) const {
    std::size_t h = 0;
    for (const auto& s : t) h = h * 1000003u ^ std::hash<std::string>{}(s);
    return h;
  }
};
using NgramCounts = std::unordered_map<Tokens, double, NgramHash>;

// Counts of all n-grams with length exactly n.
NgramCounts ngrams(const Tokens& words, int n) {
  NgramCounts out;
  if (static_cast<int>(words.size()) < n) return out;
  for (std::size_t i = 0; i + n <= words.size(); ++i) {
    out[Tokens(words.begin() + i, words.begin() + i + n)] += 1.0;
  }
  return out;
}

void check_inputs(const std::vector<Tokens>& candidates,
                  const std::vector<std::vector<Tokens>>& references) {
  if (candidates.empty()) throw DataError("metrics: empty candidate set");
  if (candidates.size() != references.size()) {
    throw DataError("metrics: candidates and references differ in count");
  }
  for (const auto& r : references) {
    if (r.empty()) throw DataError("metrics: candidate without references");
  }
}

struct BleuStats {
  double match[kMaxN] = {0, 0, 0, 0};
  double total[kMaxN] = {0, 0, 0, 0};
  double cand_len = 0;
  double ref_len = 0;

  void add(const BleuStats& o) {
    for (int n = 0; n < kMaxN; ++n) {
      match[n] += o.match[n];
      total[n] += o.total[n];
    }
    cand_len += o.cand_len;
    ref_len += o.ref_len;
  }

  double score() const {
    if (cand_len == 0) return 0.0;
    double log_sum = 0.0;
    for (int n = 0; n < kMaxN; ++n) {
      if (match[n] == 0 || total[n] == 0) return 0.0;
      log_sum += std::log(match[n] / total[n]);
    }
    const double bp = cand_len < ref_len ? std::exp(1.0 - ref_len / cand_len) : 1.0;
    return bp * std::exp(log_sum / kMaxN);
  }
};

BleuStats bleu_stats(const Tokens& cand, const std::vector<Tokens>& refs) {
  BleuStats s;
  s.cand_len = static_cast<double>(cand.size());
  double best_diff = -1;
  for (const auto& r : refs) {
    const double diff = std::abs(static_cast<double>(r.size()) - s.cand_len);
    if (best_diff < 0 || diff < best_diff ||
        (diff == best_diff && static_cast<double>(r.size()) < s.ref_len)) {
      best_diff = diff;
      s.ref_len = static_cast<double>(r.size());
    }
  }
  for (int n = 1; n <= kMaxN; ++n) {
    const auto cand_counts = ngrams(cand, n);
    NgramCounts max_ref;
    for (const auto& r : refs) {
      for (const auto& [g, c] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
    }
    for (const auto& [g, c] : cand_counts) {
      s.total[n - 1] += c;
      auto it = max_ref.find(g);
      if (it != max_ref.end()) s.match[n - 1] += std::min(c, it->second);
    }
  }
  return s;
}

struct CiderVec {
  NgramCounts vec[kMaxN];
  double norm[kMaxN] = {0, 0, 0, 0};
  double length = 0;
};

}  // namespace

Tokens metric_tokens(const std::string& caption) { return tokenize(caption); }

double bleu4(const std::vector<Tokens>& candidates,
             const std::vector<std::vector<Tokens>>& references) {
  check_inputs(candidates, references);
  BleuStats total;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    total.add(bleu_stats(candidates[i], references[i]));
  }
  return total.score();
}

CiderResult cider_d(const std::vector<Tokens>& candidates,
                    const std::vector<std::vector<Tokens>>& references,
                    double sigma) {
  check_inputs(candidates, references);
  const std::size_t n_videos = candidates.size();
  CiderResult out;
  out.df_fallback = n_videos < 2;

  // Document frequency: number of videos whose references contain the n-gram.
  std::unordered_map<Tokens, double, NgramHash> df;
  for (const auto& refs : references) {
    std::unordered_map<Tokens, bool, NgramHash> seen;
    for (const auto& r : refs) {
      for (int n = 1; n <= kMaxN; ++n) {
        for (const auto& [g, c] : ngrams(r, n)) seen[g] = true;
      }
    }
    for (const auto& [g, b] : seen) df[g] += 1.0;
  }
  const double log_ref_len = std::log(static_cast<double>(n_videos));

  auto to_vec = [&](const Tokens& words) {
    CiderVec v;
    v.length = static_cast<double>(words.size());
    for (int n = 1; n <= kMaxN; ++n) {
      for (const auto& [g, tf] : ngrams(words, n)) {
        double weight = 1.0;
        if (!out.df_fallback) {
          auto it = df.find(g);
          const double d = it == df.end() ? 0.0 : it->second;
          weight = log_ref_len - std::log(std::max(1.0, d));
        }
        const double w = tf * weight;
        v.vec[n - 1][g] = w;
        v.norm[n - 1] += w * w;
      }
    }
    for (double& nrm : v.norm) nrm = std::sqrt(nrm);
    return v;
  };

  auto sim = [&](const CiderVec& hyp, const CiderVec& ref) {
    const double delta = hyp.length - ref.length;
    double total = 0.0;
    for (int n = 0; n < kMaxN; ++n) {
      double val = 0.0;
      for (const auto& [g, w] : hyp.vec[n]) {
        auto it = ref.vec[n].find(g);
        if (it != ref.vec[n].end()) val += std::min(w, it->second) * it->second;
      }
      if (hyp.norm[n] != 0.0 && ref.norm[n] != 0.0) {
        val /= hyp.norm[n] * ref.norm[n];
      }
      val *= std::exp(-(delta * delta) / (2.0 * sigma * sigma));
      total += val;
    }
    return total / kMaxN;
  };

  double sum = 0.0;
  for (std::size_t i = 0; i < n_videos; ++i) {
    const CiderVec hyp = to_vec(candidates[i]);
    double s = 0.0;
    for (const auto& r : references[i]) s += sim(hyp, to_vec(r));
    s = 10.0 * s / static_cast<double>(references[i].size());
    out.per_video.push_back(s);
    sum += s;
  }
  out.score = sum / static_cast<double>(n_videos);
  return out;
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_sentence(const Tokens& candidate, const std::vector<Tokens>& references,
                        double beta) {
  if (references.empty()) throw DataError("rouge_l: no references");
  double best_p = 0.0, best_r = 0.0;
  for (const auto& r : references) {
    const double lcs = static_cast<double>(lcs_length(candidate, r));
    if (!candidate.empty()) best_p = std::max(best_p, lcs / static_cast<double>(candidate.size()));
    if (!r.empty()) best_r = std::max(best_r, lcs / static_cast<double>(r.size()));
  }
  if (best_p == 0.0 || best_r == 0.0) return 0.0;
  const double b2 = beta * beta;
  return ((1.0 + b2) * best_p * best_r) / (best_r + b2 * best_p);
}

double rouge_l(const std::vector<Tokens>& candidates,
               const std::vector<std::vector<Tokens>>& references, double beta) {
  check_inputs(candidates, references);
  double sum = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    sum += rouge_l_sentence(candidates[i], references[i], beta);
  }
  return sum / static_cast<double>(candidates.size());
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["n_videos"] = n_videos();
  j["config_hash"] = config_hash;
  j["corpus"] = corpus;
  j["cider_df_fallback"] = cider_df_fallback;
  j["video_ids"] = video_ids;
  j["per_video"] = per_video;
  return j;
}

EvalReport evaluate(const std::vector<std::string>& video_ids,
                    const std::vector<Tokens>& candidates,
                    const std::vector<std::vector<Tokens>>& references,
                    const std::string& config_hash) {
  check_inputs(candidates, references);
  if (video_ids.size() != candidates.size()) {
    throw DataError("evaluate: id count differs from candidate count");
  }
  EvalReport r;
  r.video_ids = video_ids;
  r.config_hash = config_hash;
  r.corpus["BLEU@4"] = bleu4(candidates, references);
  const CiderResult cider = cider_d(candidates, references);
  r.corpus["CIDEr-D"] = cider.score;
  r.cider_df_fallback = cider.df_fallback;
  r.corpus["ROUGE_L"] = rouge_l(candidates, references);
  auto& bleu_v = r.per_video["BLEU@4"];
  auto& rouge_v = r.per_video["ROUGE_L"];
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bleu_v.push_back(bleu4({candidates[i]}, {references[i]}));
    rouge_v.push_back(rouge_l_sentence(candidates[i], references[i]));
  }
  r.per_video["CIDEr-D"] = cider.per_video;
  return r;
}

}  // namespace sgn
