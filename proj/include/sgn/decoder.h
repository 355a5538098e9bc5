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

#ifndef SGN_DECODER_H_
#define SGN_DECODER_H_

#include <vector>

#include "sgn/types.h"

namespace sgn {

// Additive attention over decoding targets (semantic groups, or frames in
// the TA baseline):  score_i = score . tanh(state_proj h + target_proj s_i + bias)
struct GroupAttentionParams {
  Matrix state_proj;   // [d_a x d_h]
  Matrix target_proj;  // [d_a x d_target]
  Vector bias;         // [d_a]
  Vector score;        // [d_a]
};

struct AttendResult {
  Vector beta;  // [M], sums to one
  Vector x;     // [d_target]
  Matrix activations;  // [M x d_a]
};

AttendResult attend_groups(const Vector& h_prev, const Matrix& targets,
                           const GroupAttentionParams& params);

// Accumulates parameter gradients; writes dL/dh_prev and dL/dtargets.
void backward_attend(const AttendResult& result, const Vector& h_prev,
                     const Matrix& targets, const Vector& d_x,
                     const GroupAttentionParams& params,
                     GroupAttentionParams& grads, Vector& d_h_prev,
                     Matrix& d_targets);

// Single-layer LSTM, gate blocks ordered input, forget, cell, output.
struct LstmParams {
  Matrix input_weights;   // [4 d_h x d_in]
  Matrix hidden_weights;  // [4 d_h x d_h]
  Vector bias;            // [4 d_h]
};

struct OutputParams {
  Matrix weights;  // [|V| x d_h]
  Vector bias;     // [|V|]
};

struct DecoderState {
  Vector h;
  Vector c;
  std::vector<TokenId> prefix;

  static DecoderState initial(int dim_hidden);
  int step() const { return static_cast<int>(prefix.size()) + 1; }
};

struct LstmCache {
  Vector input, h_prev, c_prev;
  Vector in_gate, forget_gate, cell_gate, out_gate;
  Vector c, tanh_c;
};

// Advances the cell on input [x; word_embedding].
DecoderState lstm_step(const DecoderState& state, const Vector& input,
                       const LstmParams& params, LstmCache* cache = nullptr);

// Returns dL/dinput; updates d_h / d_c in place from the step's outputs to
// its inputs (h_prev, c_prev).
Vector backward_lstm(const LstmCache& cache, const LstmParams& params,
                     LstmParams& grads, Vector& d_h, Vector& d_c);

Vector output_logits(const Vector& h, const OutputParams& params);

}  // namespace sgn

#endif  // SGN_DECODER_H_
