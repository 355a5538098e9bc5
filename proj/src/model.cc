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

#include "sgn/model.h"

#include <cmath>

#include "sgn/vocabulary.h"

namespace sgn {
namespace {

Matrix xavier(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(-limit, limit);
  }
  return m;
}

Matrix uniform(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(-scale, scale);
  }
  return m;
}

SuppressionResult keep_all(const Matrix& phrases, const Matrix& attention) {
  SuppressionResult out;
  out.kept.resize(phrases.rows());
  for (int i = 0; i < static_cast<int>(phrases.rows()); ++i) out.kept[i] = i;
  out.phrases = phrases;
  out.attention = attention;
  out.similarity = attention * attention.transpose();
  return out;
}

struct ContrastiveCache {
  ContrastiveResult result;
  RelevanceCache pos, neg;
};

}  // namespace

ModelParams ModelParams::zeros_like() const {
  ModelParams out = *this;
  out.for_each([](const std::string&, auto& t) { t.setZero(); });
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const auto& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

double ModelParams::squared_norm() const {
  double s = 0.0;
  for_each([&](const std::string&, const auto& t) { s += t.squaredNorm(); });
  return s;
}

Model::Model(Config config, AblationFlags flags, int vocab_size, ModelParams params)
    : config_(std::move(config)),
      flags_(flags),
      vocab_size_(vocab_size),
      params_(std::move(params)) {
  config_.validate();
  flags_.validate();
}

int Model::target_dim() const {
  return flags_.use_semantic_aligner ? config_.dim_word + config_.dim_video()
                                     : config_.dim_video();
}

Model Model::initialize(const Config& config, const AblationFlags& flags,
                        int vocab_size, Rng& rng) {
  config.validate();
  flags.validate();
  const int dw = config.dim_word;
  const int dh = config.dim_hidden;
  const int dv = config.dim_video();
  const int da = config.attention_width();
  const int target = flags.use_semantic_aligner ? dw + dv : dv;

  ModelParams p;
  p.embedding = uniform(vocab_size, dw, config.init_scale, rng);
  p.phrase.position = uniform(config.max_len + 1, dw, config.init_scale, rng);
  for (int l = 0; l < config.phrase_layers; ++l) {
    p.phrase.layers.push_back({xavier(dw, dw, rng), xavier(dw, dw, rng), xavier(dw, dw, rng)});
  }
  p.aligner.phrase_proj = xavier(da, dw, rng);
  p.aligner.frame_proj = xavier(da, dv, rng);
  p.aligner.bias = Vector::Zero(da);
  p.aligner.score = xavier(da, 1, rng);
  p.attention.state_proj = xavier(da, dh, rng);
  p.attention.target_proj = xavier(da, target, rng);
  p.attention.bias = Vector::Zero(da);
  p.attention.score = xavier(da, 1, rng);
  p.lstm.input_weights = xavier(4 * dh, target + dw, rng);
  p.lstm.hidden_weights = xavier(4 * dh, dh, rng);
  p.lstm.bias = Vector::Zero(4 * dh);
  p.lstm.bias.segment(dh, dh).setOnes();
  p.output.weights = xavier(vocab_size, dh, rng);
  p.output.bias = Vector::Zero(vocab_size);
  return Model(config, flags, vocab_size, std::move(p));
}

StepTrace Model::step(const Matrix& frames, const DecoderState& state) const {
  StepTrace trace;
  trace.step = state.step();
  if (state.prefix.empty()) {
    trace.phrase_words = {Vocabulary::kSos};
    trace.previous_word = Vocabulary::kSos;
  } else {
    trace.phrase_words = state.prefix;
    trace.previous_word = state.prefix.back();
  }

  if (flags_.use_semantic_aligner) {
    const auto n = static_cast<Eigen::Index>(trace.phrase_words.size());
    trace.words.resize(n, config_.dim_word);
    for (Eigen::Index j = 0; j < n; ++j) {
      trace.words.row(j) = params_.embedding.row(trace.phrase_words[j]);
    }
    if (flags_.group_by_word) {
      trace.phrase.phrases = trace.words;
      trace.phrase.attention = Matrix::Identity(n, n);
    } else {
      trace.phrase = encode_phrases(trace.words, params_.phrase, config_.use_position);
    }
    trace.suppression =
        flags_.use_phrase_suppressor
            ? suppress(trace.phrase.phrases, trace.phrase.attention, config_.tau)
            : keep_all(trace.phrase.phrases, trace.phrase.attention);
    trace.groups = align(trace.suppression.phrases, frames, params_.aligner);
    trace.targets = trace.groups.groups;
  } else {
    trace.targets = frames;
  }

  trace.attend = attend_groups(state.h, trace.targets, params_.attention);
  Vector input(trace.attend.x.size() + config_.dim_word);
  input << trace.attend.x, params_.embedding.row(trace.previous_word).transpose();
  trace.state = lstm_step(state, input, params_.lstm, &trace.lstm);
  trace.logits = output_logits(trace.state.h, params_.output);
  trace.probs = softmax(trace.logits);
  return trace;
}

LossBreakdown Model::loss(const Matrix& frames, const Caption& gold,
                          const Matrix* negative, ModelParams* grads) const {
  std::vector<TokenId> targets = gold.tokens;
  targets.push_back(Vocabulary::kEos);
  const bool use_ca =
      flags_.use_ca_loss && flags_.use_semantic_aligner && negative != nullptr;

  std::vector<StepTrace> traces;
  traces.reserve(targets.size());
  std::vector<ContrastiveCache> contrast;
  LossBreakdown out;
  out.lambda = config_.lambda;

  DecoderState state = DecoderState::initial(config_.dim_hidden);
  std::vector<Vector> step_probs;
  for (TokenId target : targets) {
    traces.push_back(step(frames, state));
    const StepTrace& tr = traces.back();
    step_probs.push_back(tr.probs);
    if (use_ca) {
      ContrastiveCache cc;
      const Matrix& phrases = tr.suppression.phrases;
      cc.result = contrastive_from_scores(
          relevance(phrases, frames, params_.aligner, &cc.pos),
          relevance(phrases, *negative, params_.aligner, &cc.neg));
      out.ca += cc.result.loss;
      out.clamped += cc.result.clamped;
      out.n_groups += static_cast<int>(cc.result.p_ca.size());
      out.p_ca_values.insert(out.p_ca_values.end(), cc.result.p_ca.begin(),
                             cc.result.p_ca.end());
      contrast.push_back(std::move(cc));
    }
    state = tr.state;
    state.prefix.push_back(target);
  }
  out.ce = cross_entropy(step_probs, targets, &out.clamped);
  out.n_tokens = static_cast<int>(targets.size());
  out.total = combine(out.ce, out.ca, out.lambda);
  if (!std::isfinite(out.total)) throw NumericError("loss is not finite");
  if (grads == nullptr) return out;

  ModelParams& g = *grads;
  Vector d_h = Vector::Zero(config_.dim_hidden);
  Vector d_c = Vector::Zero(config_.dim_hidden);
  for (std::size_t t = traces.size(); t-- > 0;) {
    const StepTrace& tr = traces[t];
    Vector d_logits = tr.probs;
    d_logits(targets[t]) -= 1.0;
    g.output.weights.noalias() += d_logits * tr.state.h.transpose();
    g.output.bias += d_logits;
    d_h.noalias() += params_.output.weights.transpose() * d_logits;

    const Vector d_input = backward_lstm(tr.lstm, params_.lstm, g.lstm, d_h, d_c);
    const Eigen::Index tdim = tr.attend.x.size();
    g.embedding.row(tr.previous_word) +=
        d_input.tail(config_.dim_word).transpose();

    Vector d_h_att;
    Matrix d_targets;
    backward_attend(tr.attend, tr.lstm.h_prev, tr.targets, d_input.head(tdim),
                    params_.attention, g.attention, d_h_att, d_targets);
    d_h += d_h_att;

    if (!flags_.use_semantic_aligner) continue;
    const Matrix& phrases_hat = tr.suppression.phrases;
    Matrix d_phrases_hat = backward_align(tr.groups, phrases_hat, frames,
                                          d_targets, params_.aligner, g.aligner);
    if (use_ca) {
      const ContrastiveCache& cc = contrast[t];
      d_phrases_hat += backward_relevance(cc.pos, phrases_hat, frames,
                                          out.lambda * cc.result.d_pos_scores,
                                          params_.aligner, g.aligner);
      d_phrases_hat += backward_relevance(cc.neg, phrases_hat, *negative,
                                          out.lambda * cc.result.d_neg_scores,
                                          params_.aligner, g.aligner);
    }
    Matrix d_phrases = Matrix::Zero(tr.phrase.phrases.rows(), config_.dim_word);
    for (int r = 0; r < tr.suppression.size(); ++r) {
      d_phrases.row(tr.suppression.kept[r]) = d_phrases_hat.row(r);
    }
    const Matrix d_words =
        flags_.group_by_word
            ? d_phrases
            : backward_phrases(tr.phrase, d_phrases, params_.phrase, g.phrase,
                               config_.use_position);
    for (std::size_t j = 0; j < tr.phrase_words.size(); ++j) {
      g.embedding.row(tr.phrase_words[j]) += d_words.row(static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

}  // namespace sgn
