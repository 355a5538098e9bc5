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

#include "sgn/objectives.h"

#include <algorithm>
#include <cmath>

namespace sgn {
namespace {

double log_sum_exp(const RowVector& v, double shift) {
  return shift + std::log((v.array() - shift).exp().sum());
}

}  // namespace

double cross_entropy(const std::vector<Vector>& step_probs,
                     const std::vector<TokenId>& targets, int* clamped) {
  if (step_probs.size() != targets.size()) {
    throw DataError("cross_entropy: one distribution per target required");
  }
  double loss = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double p = step_probs[t](targets[t]);
    if (p < kProbabilityFloor) {
      if (clamped) ++*clamped;
      loss -= std::log(kProbabilityFloor);
    } else {
      loss -= std::log(p);
    }
  }
  return loss;
}

ContrastiveResult contrastive_from_scores(const Matrix& pos_scores,
                                          const Matrix& neg_scores) {
  if (pos_scores.rows() != neg_scores.rows()) {
    throw DataError("contrastive_attention: row mismatch");
  }
  const Eigen::Index m = pos_scores.rows();
  ContrastiveResult out;
  out.d_pos_scores.resize(m, pos_scores.cols());
  out.d_neg_scores.resize(m, neg_scores.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    const double shift =
        std::max(pos_scores.row(i).maxCoeff(), neg_scores.row(i).maxCoeff());
    const double lse_pos = log_sum_exp(pos_scores.row(i), shift);
    const double lse_neg = log_sum_exp(neg_scores.row(i), shift);
    const double hi = std::max(lse_pos, lse_neg);
    const double lse_all =
        hi + std::log(std::exp(lse_pos - hi) + std::exp(lse_neg - hi));
    // -log p_ca = lse_all - lse_pos, exact in log space.
    const double nll = lse_all - lse_pos;
    const double p = std::exp(-nll);
    out.p_ca.push_back(p);
    if (p < kProbabilityFloor) {
      ++out.clamped;
      out.loss -= std::log(kProbabilityFloor);
      out.d_pos_scores.row(i).setZero();
      out.d_neg_scores.row(i).setZero();
      continue;
    }
    out.loss += nll;
    const RowVector q_pos = (pos_scores.row(i).array() - lse_all).exp().matrix();
    const RowVector q_neg = (neg_scores.row(i).array() - lse_all).exp().matrix();
    const RowVector within_pos =
        (pos_scores.row(i).array() - lse_pos).exp().matrix();
    out.d_pos_scores.row(i) = q_pos - within_pos;
    out.d_neg_scores.row(i) = q_neg;
  }
  return out;
}

ContrastiveResult contrastive_attention(const Matrix& phrases,
                                        const VideoFeatures& positive,
                                        const VideoFeatures& negative,
                                        const AlignerParams& params) {
  if (positive.n_frames() != negative.n_frames()) {
    throw DataError("contrastive_attention: frame counts differ");
  }
  return contrastive_from_scores(relevance(phrases, positive.frames, params),
                                 relevance(phrases, negative.frames, params));
}

}  // namespace sgn
