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

#ifndef SGN_SEMANTIC_GROUPING_H_
#define SGN_SEMANTIC_GROUPING_H_

#include <vector>

#include "sgn/types.h"

namespace sgn {

// Phrase suppression output. `kept` indexes rows of the input phrases.
struct SuppressionResult {
  std::vector<int> kept;
  Matrix phrases;    // rows of P at `kept`
  Matrix attention;  // rows of A at `kept`
  Matrix similarity;  // R = A * A^T over all input phrases

  int size() const { return static_cast<int>(kept.size()); }
};

// Drops redundant phrases. Pairs (i, j), i < j, are visited in row-major
// order; a pair whose members are both still alive and whose similarity
// r_ij exceeds tau discards p_i when its similarity row sum (diagonal
// included) is larger than p_j's, otherwise p_j. At least one phrase
// survives.
SuppressionResult suppress(const Matrix& phrases, const Matrix& attention,
                           double tau);

// Parameters of the phrase-frame relevance score
//   e_ij = score . tanh(phrase_proj * p_i + frame_proj * v_j + bias)
struct AlignerParams {
  Matrix phrase_proj;  // [d_s x d_w]
  Matrix frame_proj;   // [d_s x d_v]
  Vector bias;         // [d_s]
  Vector score;        // [d_s]
};

struct RelevanceCache {
  std::vector<Matrix> activations;  // per phrase: tanh(...) rows over frames
};

// Raw relevance scores [M x N]. Throws NumericError on non-finite params.
Matrix relevance(const Matrix& phrases, const Matrix& frames,
                 const AlignerParams& params, RelevanceCache* cache = nullptr);

// Accumulates parameter gradients; returns dL/dphrases. Frames are treated
// as constants.
Matrix backward_relevance(const RelevanceCache& cache, const Matrix& phrases,
                          const Matrix& frames, const Matrix& d_scores,
                          const AlignerParams& params, AlignerParams& grads);

struct SemanticGroupSet {
  Matrix groups;   // S: [M x (d_w + d_v)] = [phrases | aligned]
  Matrix alpha;    // [M x N], rows sum to one
  Matrix aligned;  // [M x d_v]
  RelevanceCache cache;

  int size() const { return static_cast<int>(groups.rows()); }
};

// Softmax-normalizes relevance over the frames and pairs each phrase with
// its attention-weighted frame aggregate.
SemanticGroupSet align(const Matrix& phrases, const Matrix& frames,
                       const AlignerParams& params);

// Returns dL/dphrases given dL/dgroups.
Matrix backward_align(const SemanticGroupSet& groups, const Matrix& phrases,
                      const Matrix& frames, const Matrix& d_groups,
                      const AlignerParams& params, AlignerParams& grads);

}  // namespace sgn

#endif  // SGN_SEMANTIC_GROUPING_H_
