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

#include "sgn/phrase_encoder.h"

#include <cmath>

namespace sgn {

PhraseState encode_phrases(const Matrix& words, const PhraseEncoderParams& params,
                           bool use_position) {
  const Eigen::Index n = words.rows();
  if (n == 0) throw DataError("encode_phrases: no words");
  if (params.layers.empty()) throw DataError("encode_phrases: no layers");

  Matrix x = words;
  if (use_position) {
    if (n > params.position.rows()) {
      throw DataError("encode_phrases: prefix longer than positional table");
    }
    x += params.position.topRows(n);
  }

  PhraseState state;
  state.cache.reserve(params.layers.size());
  for (const auto& layer : params.layers) {
    PhraseLayerCache c;
    c.input = x;
    c.q = x * layer.query;
    c.k = x * layer.key;
    c.v = x * layer.value;
    const double scale = 1.0 / std::sqrt(static_cast<double>(layer.query.cols()));
    c.attention = row_softmax((c.q * c.k.transpose()) * scale);
    x = c.attention * c.v;
    state.cache.push_back(std::move(c));
  }
  state.phrases = std::move(x);
  state.attention = state.cache.back().attention;
  return state;
}

Matrix backward_phrases(const PhraseState& state, const Matrix& d_phrases,
                        const PhraseEncoderParams& params,
                        PhraseEncoderParams& grads, bool use_position) {
  Matrix d_out = d_phrases;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const auto& layer = params.layers[l];
    const auto& c = state.cache[l];
    auto& g = grads.layers[l];
    const double scale = 1.0 / std::sqrt(static_cast<double>(layer.query.cols()));

    const Matrix d_attention = d_out * c.v.transpose();
    const Matrix d_v = c.attention.transpose() * d_out;
    // Softmax backward, row by row.
    const Vector inner = (d_attention.cwiseProduct(c.attention)).rowwise().sum();
    const Matrix d_scores =
        c.attention.cwiseProduct(d_attention.colwise() - inner) * scale;
    const Matrix d_q = d_scores * c.k;
    const Matrix d_k = d_scores.transpose() * c.q;

    g.query.noalias() += c.input.transpose() * d_q;
    g.key.noalias() += c.input.transpose() * d_k;
    g.value.noalias() += c.input.transpose() * d_v;
    d_out = d_q * layer.query.transpose() + d_k * layer.key.transpose() +
            d_v * layer.value.transpose();
  }
  if (use_position) grads.position.topRows(d_out.rows()) += d_out;
  return d_out;
}

}  // namespace sgn
