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

#ifndef SGN_PHRASE_ENCODER_H_
#define SGN_PHRASE_ENCODER_H_

#include <vector>

#include "sgn/types.h"

namespace sgn {

// Projections of one self-attention layer, all [d_w x d_w], applied to row
// vectors: Q = X * query.
struct AttentionLayer {
  Matrix query;
  Matrix key;
  Matrix value;
};

struct PhraseEncoderParams {
  Matrix position;  // [max_positions x d_w], added to word row j
  std::vector<AttentionLayer> layers;
};

struct PhraseLayerCache {
  Matrix input, q, k, v, attention;
};

// Phrases built from the words of a partially decoded caption. Row j of
// `attention` holds the word weights that composed phrase j.
struct PhraseState {
  Matrix phrases;    // P: [(t-1) x d_w]
  Matrix attention;  // A: [(t-1) x (t-1)], taken from the final layer
  std::vector<PhraseLayerCache> cache;

  int size() const { return static_cast<int>(phrases.rows()); }
};

// Single-head scaled dot-product self-attention over `words` (one row per
// word). With several layers each consumes the previous layer's phrases.
// Throws DataError on empty input.
PhraseState encode_phrases(const Matrix& words, const PhraseEncoderParams& params,
                           bool use_position);

// Accumulates parameter gradients into `grads` and returns dL/dwords.
Matrix backward_phrases(const PhraseState& state, const Matrix& d_phrases,
                        const PhraseEncoderParams& params,
                        PhraseEncoderParams& grads, bool use_position);

}  // namespace sgn

#endif  // SGN_PHRASE_ENCODER_H_
