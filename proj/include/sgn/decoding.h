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

#ifndef SGN_DECODING_H_
#define SGN_DECODING_H_

#include <functional>
#include <vector>

#include "sgn/model.h"

namespace sgn {

struct DecodeResult {
  Caption caption;
  double log_prob = 0.0;  // summed over generated tokens, EOS included
  int n_scored = 0;       // number of generated tokens, EOS included
  bool truncated = false;  // step budget spent without EOS
};

using StepObserver = std::function<void(const StepTrace&, TokenId chosen)>;

// Log-probabilities of the next word with PAD and SOS excluded.
Vector next_log_probs(const StepTrace& trace);

// Argmax decoding for at most max_len steps (EOS step included).
DecodeResult decode_greedy(const Model& model, const Matrix& frames,
                           int max_len, const StepObserver& observer = {});

// Beam search. Each hypothesis keeps its own prefix and decoder state, so
// phrases and groups are rebuilt per hypothesis. Finished hypotheses are
// ranked by log_prob / n_scored when length_normalization is set.
DecodeResult decode_beam(const Model& model, const Matrix& frames,
                         int beam_size, int max_len, bool length_normalization);

// Score of `tokens` (EOS included if present) under the model, fed step by
// step; used to check search results.
double sequence_log_prob(const Model& model, const Matrix& frames,
                         const std::vector<TokenId>& tokens);

}  // namespace sgn

#endif  // SGN_DECODING_H_
