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

#include "sgn/semantic_grouping.h"

namespace sgn {

SuppressionResult suppress(const Matrix& phrases, const Matrix& attention,
                           double tau) {
  const Eigen::Index n = attention.rows();
  if (phrases.rows() != n) {
    throw DataError("suppress: phrases and attention rows differ");
  }
  SuppressionResult out;
  out.similarity = attention * attention.transpose();
  const Vector row_sums = out.similarity.rowwise().sum();

  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!alive[i]) break;
      if (!alive[j] || !(out.similarity(i, j) > tau)) continue;
      if (row_sums(i) > row_sums(j)) {
        alive[i] = false;
      } else {
        alive[j] = false;
      }
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (alive[i]) out.kept.push_back(static_cast<int>(i));
  }
  out.phrases.resize(out.size(), phrases.cols());
  out.attention.resize(out.size(), attention.cols());
  for (int r = 0; r < out.size(); ++r) {
    out.phrases.row(r) = phrases.row(out.kept[r]);
    out.attention.row(r) = attention.row(out.kept[r]);
  }
  return out;
}

namespace {

void check_finite(const AlignerParams& p) {
  if (!p.phrase_proj.allFinite() || !p.frame_proj.allFinite() ||
      !p.bias.allFinite() || !p.score.allFinite()) {
    throw NumericError("relevance: non-finite aligner parameters");
  }
}

}  // namespace

Matrix relevance(const Matrix& phrases, const Matrix& frames,
                 const AlignerParams& params, RelevanceCache* cache) {
  check_finite(params);
  if (phrases.cols() != params.phrase_proj.cols() ||
      frames.cols() != params.frame_proj.cols()) {
    throw DataError("relevance: input widths do not match parameters");
  }
  const Matrix phrase_term =
      (phrases * params.phrase_proj.transpose()).rowwise() +
      params.bias.transpose();
  const Matrix frame_term = frames * params.frame_proj.transpose();

  Matrix scores(phrases.rows(), frames.rows());
  if (cache) cache->activations.assign(phrases.rows(), Matrix());
  for (Eigen::Index i = 0; i < phrases.rows(); ++i) {
    Matrix act = (frame_term.rowwise() + phrase_term.row(i)).array().tanh().matrix();
    scores.row(i) = (act * params.score).transpose();
    if (cache) cache->activations[i] = std::move(act);
  }
  return scores;
}

Matrix backward_relevance(const RelevanceCache& cache, const Matrix& phrases,
                          const Matrix& frames, const Matrix& d_scores,
                          const AlignerParams& params, AlignerParams& grads) {
  const Eigen::Index m = phrases.rows();
  Matrix d_phrase_term(m, params.bias.size());
  Matrix d_frame_term = Matrix::Zero(frames.rows(), params.bias.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const Matrix& act = cache.activations[i];
    const Vector d_row = d_scores.row(i).transpose();
    grads.score.noalias() += act.transpose() * d_row;
    const Matrix d_pre =
        (d_row * params.score.transpose()).cwiseProduct(
            (1.0 - act.array().square()).matrix());
    d_phrase_term.row(i) = d_pre.colwise().sum();
    d_frame_term += d_pre;
  }
  grads.bias += d_phrase_term.colwise().sum().transpose();
  grads.phrase_proj.noalias() += d_phrase_term.transpose() * phrases;
  grads.frame_proj.noalias() += d_frame_term.transpose() * frames;
  return d_phrase_term * params.phrase_proj;
}

SemanticGroupSet align(const Matrix& phrases, const Matrix& frames,
                       const AlignerParams& params) {
  SemanticGroupSet out;
  out.alpha = row_softmax(relevance(phrases, frames, params, &out.cache));
  out.aligned = out.alpha * frames;
  out.groups.resize(phrases.rows(), phrases.cols() + frames.cols());
  out.groups << phrases, out.aligned;
  return out;
}

Matrix backward_align(const SemanticGroupSet& groups, const Matrix& phrases,
                      const Matrix& frames, const Matrix& d_groups,
                      const AlignerParams& params, AlignerParams& grads) {
  const Eigen::Index dw = phrases.cols();
  Matrix d_phrases = d_groups.leftCols(dw);
  const Matrix d_alpha = d_groups.rightCols(frames.cols()) * frames.transpose();
  const Vector inner = d_alpha.cwiseProduct(groups.alpha).rowwise().sum();
  const Matrix d_scores = groups.alpha.cwiseProduct(d_alpha.colwise() - inner);
  d_phrases += backward_relevance(groups.cache, phrases, frames, d_scores,
                                  params, grads);
  return d_phrases;
}

}  // namespace sgn
