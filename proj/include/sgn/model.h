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

#ifndef SGN_MODEL_H_
#define SGN_MODEL_H_

#include <cstddef>
#include <string>
#include <vector>

#include "sgn/config.h"
#include "sgn/decoder.h"
#include "sgn/objectives.h"
#include "sgn/phrase_encoder.h"
#include "sgn/rng.h"
#include "sgn/semantic_grouping.h"
#include "sgn/types.h"

namespace sgn {

// All trainable tensors of the network.
struct ModelParams {
  Matrix embedding;  // [|V| x d_w]
  PhraseEncoderParams phrase;
  AlignerParams aligner;
  GroupAttentionParams attention;
  LstmParams lstm;
  OutputParams output;

  // Calls f(name, tensor) for every tensor in a fixed canonical order;
  // tensor is Matrix& or Vector&.
  template <typename F>
  void for_each(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each(F&& f) const {
    visit(*this, f);
  }

  ModelParams zeros_like() const;
  std::size_t parameter_count() const;
  double squared_norm() const;

 private:
  template <typename Self, typename F>
  static void visit(Self& self, F& f) {
    f(std::string("embedding"), self.embedding);
    f(std::string("phrase.position"), self.phrase.position);
    for (std::size_t l = 0; l < self.phrase.layers.size(); ++l) {
      const std::string p = "phrase.layer" + std::to_string(l) + ".";
      f(p + "query", self.phrase.layers[l].query);
      f(p + "key", self.phrase.layers[l].key);
      f(p + "value", self.phrase.layers[l].value);
    }
    f(std::string("aligner.phrase_proj"), self.aligner.phrase_proj);
    f(std::string("aligner.frame_proj"), self.aligner.frame_proj);
    f(std::string("aligner.bias"), self.aligner.bias);
    f(std::string("aligner.score"), self.aligner.score);
    f(std::string("attention.state_proj"), self.attention.state_proj);
    f(std::string("attention.target_proj"), self.attention.target_proj);
    f(std::string("attention.bias"), self.attention.bias);
    f(std::string("attention.score"), self.attention.score);
    f(std::string("lstm.input_weights"), self.lstm.input_weights);
    f(std::string("lstm.hidden_weights"), self.lstm.hidden_weights);
    f(std::string("lstm.bias"), self.lstm.bias);
    f(std::string("output.weights"), self.output.weights);
    f(std::string("output.bias"), self.output.bias);
  }
};

// Everything one decoding step computed; kept for backprop and inspection.
struct StepTrace {
  int step = 0;
  std::vector<TokenId> phrase_words;  // words the phrases were built from
  Matrix words;                       // their embeddings
  PhraseState phrase;
  SuppressionResult suppression;
  SemanticGroupSet groups;
  Matrix targets;  // what the decoder attended over
  AttendResult attend;
  TokenId previous_word = 0;
  LstmCache lstm;
  DecoderState state;  // after the step (prefix not yet extended)
  Vector logits;
  Vector probs;
};

class Model {
 public:
  Model(Config config, AblationFlags flags, int vocab_size, ModelParams params);

  // Xavier-uniform weights, zero biases (LSTM forget bias 1), embeddings and
  // positions uniform in (-init_scale, init_scale).
  static Model initialize(const Config& config, const AblationFlags& flags,
                          int vocab_size, Rng& rng);

  const Config& config() const { return config_; }
  const AblationFlags& flags() const { return flags_; }
  int vocab_size() const { return vocab_size_; }
  const ModelParams& params() const { return params_; }
  ModelParams& mutable_params() { return params_; }

  // Width of a decoder attention target: d_w + d_v with semantic groups,
  // d_v when attending frames directly.
  int target_dim() const;

  // One decoding step from `state`: phrases from state.prefix (SOS alone at
  // the first step), grouping, attention, LSTM, word distribution.
  StepTrace step(const Matrix& frames, const DecoderState& state) const;

  // Teacher-forced loss of `gold` (EOS appended). The CA term is included
  // when enabled and `negative` is non-null. Gradients are accumulated into
  // `grads` when non-null.
  LossBreakdown loss(const Matrix& frames, const Caption& gold,
                     const Matrix* negative, ModelParams* grads) const;

 private:
  Config config_;
  AblationFlags flags_;
  int vocab_size_;
  ModelParams params_;
};

}  // namespace sgn

#endif  // SGN_MODEL_H_
