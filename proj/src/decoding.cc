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

#include "sgn/decoding.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sgn/vocabulary.h"

namespace sgn {
namespace {

struct Hypothesis {
  DecoderState state;
  std::vector<TokenId> tokens;
  double log_prob = 0.0;
};

struct Candidate {
  std::size_t parent;
  TokenId token;
  double log_prob;
  DecoderState state;
};

// Indices of the k largest entries; ties go to the lower index.
std::vector<TokenId> top_k(const Vector& scores, int k) {
  std::vector<TokenId> idx(static_cast<std::size_t>(scores.size()));
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min<int>(k, static_cast<int>(idx.size()));
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](TokenId a, TokenId b) {
                      if (scores(a) != scores(b)) return scores(a) > scores(b);
                      return a < b;
                    });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

double ranking_score(const DecodeResult& r, bool length_normalization) {
  return length_normalization ? r.log_prob / std::max(1, r.n_scored) : r.log_prob;
}

}  // namespace

Vector next_log_probs(const StepTrace& trace) {
  Vector logits = trace.logits;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  logits(Vocabulary::kPad) = neg_inf;
  logits(Vocabulary::kSos) = neg_inf;
  const double mx = logits.maxCoeff();
  const double lse = mx + std::log((logits.array() - mx).exp().sum());
  return (logits.array() - lse).matrix();
}

DecodeResult decode_greedy(const Model& model, const Matrix& frames, int max_len,
                           const StepObserver& observer) {
  DecodeResult out;
  DecoderState state = DecoderState::initial(model.config().dim_hidden);
  for (int t = 0; t < max_len; ++t) {
    const StepTrace trace = model.step(frames, state);
    const Vector lp = next_log_probs(trace);
    Eigen::Index best = 0;
    lp.maxCoeff(&best);
    const auto token = static_cast<TokenId>(best);
    if (observer) observer(trace, token);
    out.log_prob += lp(best);
    ++out.n_scored;
    if (token == Vocabulary::kEos) return out;
    out.caption.tokens.push_back(token);
    state = trace.state;
    state.prefix.push_back(token);
  }
  out.truncated = true;
  return out;
}

DecodeResult decode_beam(const Model& model, const Matrix& frames, int beam_size,
                         int max_len, bool length_normalization) {
  if (beam_size < 1) throw UsageError("beam_size must be >= 1");
  std::vector<Hypothesis> active{{DecoderState::initial(model.config().dim_hidden), {}, 0.0}};
  std::vector<DecodeResult> finished;

  for (int t = 0; t < max_len && !active.empty(); ++t) {
    std::vector<Candidate> candidates;
    for (std::size_t h = 0; h < active.size(); ++h) {
      const StepTrace trace = model.step(frames, active[h].state);
      const Vector lp = next_log_probs(trace);
      for (TokenId tok : top_k(lp, beam_size)) {
        if (!std::isfinite(lp(tok))) continue;
        candidates.push_back({h, tok, active[h].log_prob + lp(tok), trace.state});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       return a.log_prob > b.log_prob;
                     });
    if (candidates.size() > static_cast<std::size_t>(beam_size)) {
      candidates.resize(static_cast<std::size_t>(beam_size));
    }

    std::vector<Hypothesis> next;
    for (auto& c : candidates) {
      const Hypothesis& parent = active[c.parent];
      if (c.token == Vocabulary::kEos) {
        DecodeResult r;
        r.caption.tokens = parent.tokens;
        r.log_prob = c.log_prob;
        r.n_scored = t + 1;
        finished.push_back(std::move(r));
        continue;
      }
      Hypothesis hyp{std::move(c.state), parent.tokens, c.log_prob};
      hyp.tokens.push_back(c.token);
      hyp.state.prefix.push_back(c.token);
      next.push_back(std::move(hyp));
    }
    active = std::move(next);
  }
  for (auto& h : active) {
    DecodeResult r;
    r.caption.tokens = std::move(h.tokens);
    r.log_prob = h.log_prob;
    r.n_scored = r.caption.length();
    r.truncated = true;
    finished.push_back(std::move(r));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < finished.size(); ++i) {
    if (ranking_score(finished[i], length_normalization) >
        ranking_score(finished[best], length_normalization)) {
      best = i;
    }
  }
  return finished.at(best);
}

double sequence_log_prob(const Model& model, const Matrix& frames,
                         const std::vector<TokenId>& tokens) {
  DecoderState state = DecoderState::initial(model.config().dim_hidden);
  double total = 0.0;
  for (TokenId tok : tokens) {
    const StepTrace trace = model.step(frames, state);
    total += next_log_probs(trace)(tok);
    state = trace.state;
    state.prefix.push_back(tok);
  }
  return total;
}

}  // namespace sgn
