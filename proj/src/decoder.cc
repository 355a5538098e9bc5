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

#include "sgn/decoder.h"

namespace sgn {
namespace {

Vector sigmoid(const Vector& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

}  // namespace

AttendResult attend_groups(const Vector& h_prev, const Matrix& targets,
                           const GroupAttentionParams& params) {
  if (targets.rows() == 0) throw DataError("attend_groups: no targets");
  AttendResult out;
  const Vector state_term = params.state_proj * h_prev + params.bias;
  out.activations =
      ((targets * params.target_proj.transpose()).rowwise() + state_term.transpose())
          .array()
          .tanh()
          .matrix();
  out.beta = softmax(out.activations * params.score);
  out.x = targets.transpose() * out.beta;
  return out;
}

void backward_attend(const AttendResult& result, const Vector& h_prev,
                     const Matrix& targets, const Vector& d_x,
                     const GroupAttentionParams& params,
                     GroupAttentionParams& grads, Vector& d_h_prev,
                     Matrix& d_targets) {
  const Vector& beta = result.beta;
  const Vector d_beta = targets * d_x;
  d_targets = beta * d_x.transpose();
  const Vector d_scores = (beta.array() * (d_beta.array() - beta.dot(d_beta))).matrix();
  grads.score.noalias() += result.activations.transpose() * d_scores;
  const Matrix d_pre = (d_scores * params.score.transpose())
                           .cwiseProduct((1.0 - result.activations.array().square()).matrix());
  const Vector d_state = d_pre.colwise().sum().transpose();
  grads.bias += d_state;
  grads.state_proj.noalias() += d_state * h_prev.transpose();
  grads.target_proj.noalias() += d_pre.transpose() * targets;
  d_h_prev = params.state_proj.transpose() * d_state;
  d_targets.noalias() += d_pre * params.target_proj;
}

DecoderState DecoderState::initial(int dim_hidden) {
  return {Vector::Zero(dim_hidden), Vector::Zero(dim_hidden), {}};
}

DecoderState lstm_step(const DecoderState& state, const Vector& input,
                       const LstmParams& params, LstmCache* cache) {
  const Eigen::Index d = state.h.size();
  const Vector z = params.input_weights * input +
                   params.hidden_weights * state.h + params.bias;
  const Vector in_gate = sigmoid(z.segment(0, d));
  const Vector forget_gate = sigmoid(z.segment(d, d));
  const Vector cell_gate = z.segment(2 * d, d).array().tanh().matrix();
  const Vector out_gate = sigmoid(z.segment(3 * d, d));

  DecoderState next;
  next.prefix = state.prefix;
  next.c = forget_gate.cwiseProduct(state.c) + in_gate.cwiseProduct(cell_gate);
  const Vector tanh_c = next.c.array().tanh().matrix();
  next.h = out_gate.cwiseProduct(tanh_c);
  if (cache) {
    *cache = {input,     state.h,     state.c,  in_gate, forget_gate,
              cell_gate, out_gate, next.c, tanh_c};
  }
  return next;
}

Vector backward_lstm(const LstmCache& cache, const LstmParams& params,
                     LstmParams& grads, Vector& d_h, Vector& d_c) {
  const Eigen::Index d = d_h.size();
  const Vector d_out = d_h.cwiseProduct(cache.tanh_c);
  const Vector d_cell =
      d_c + d_h.cwiseProduct(cache.out_gate)
                .cwiseProduct((1.0 - cache.tanh_c.array().square()).matrix());

  Vector dz(4 * d);
  dz.segment(0, d) = d_cell.cwiseProduct(cache.cell_gate).cwiseProduct(
      cache.in_gate.cwiseProduct((1.0 - cache.in_gate.array()).matrix()));
  dz.segment(d, d) = d_cell.cwiseProduct(cache.c_prev).cwiseProduct(
      cache.forget_gate.cwiseProduct((1.0 - cache.forget_gate.array()).matrix()));
  dz.segment(2 * d, d) = d_cell.cwiseProduct(cache.in_gate).cwiseProduct(
      (1.0 - cache.cell_gate.array().square()).matrix());
  dz.segment(3 * d, d) = d_out.cwiseProduct(
      cache.out_gate.cwiseProduct((1.0 - cache.out_gate.array()).matrix()));

  grads.input_weights.noalias() += dz * cache.input.transpose();
  grads.hidden_weights.noalias() += dz * cache.h_prev.transpose();
  grads.bias += dz;
  d_c = d_cell.cwiseProduct(cache.forget_gate);
  d_h = params.hidden_weights.transpose() * dz;
  return params.input_weights.transpose() * dz;
}

Vector output_logits(const Vector& h, const OutputParams& params) {
  return params.weights * h + params.bias;
}

}  // namespace sgn
