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

#ifndef SGN_OBJECTIVES_H_
#define SGN_OBJECTIVES_H_

#include <vector>

#include "sgn/semantic_grouping.h"
#include "sgn/types.h"

namespace sgn {

inline constexpr double kProbabilityFloor = 1e-12;

struct LossBreakdown {
  double total = 0.0;
  double ce = 0.0;
  double ca = 0.0;
  double lambda = 0.0;
  std::vector<double> p_ca_values;
  int n_tokens = 0;
  int n_groups = 0;
  int clamped = 0;  // probabilities floored at kProbabilityFloor
};

// Sum over steps of -log p(target). `step_probs[t]` scores `targets[t]`.
// Probabilities below the floor are clamped and counted in `clamped`.
double cross_entropy(const std::vector<Vector>& step_probs,
                     const std::vector<TokenId>& targets,
                     int* clamped = nullptr);

struct ContrastiveResult {
  double loss = 0.0;
  std::vector<double> p_ca;
  Matrix d_pos_scores;  // dloss / d raw positive relevance
  Matrix d_neg_scores;  // dloss / d raw negative relevance
  int clamped = 0;
};

// Per phrase: softmax over the 2N raw scores [pos | neg];
// p_ca = mass on the positive half; loss = sum_i -log p_ca_i.
ContrastiveResult contrastive_from_scores(const Matrix& pos_scores,
                                          const Matrix& neg_scores);

// Same, scoring both videos with the aligner's relevance parameters.
ContrastiveResult contrastive_attention(const Matrix& phrases,
                                        const VideoFeatures& positive,
                                        const VideoFeatures& negative,
                                        const AlignerParams& params);

inline double combine(double ce, double ca, double lambda) {
  return ce + lambda * ca;
}

}  // namespace sgn

#endif  // SGN_OBJECTIVES_H_
