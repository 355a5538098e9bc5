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

#include "sgn/inspect.h"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sgn {
namespace {

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw DataError("inspect record: ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace

nlohmann::json InspectRecord::to_json() const {
  nlohmann::json words = nlohmann::json::array();
  for (const auto& phrase : phrase_words) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& w : phrase) entries.push_back({{"word", w.word}, {"weight", w.weight}});
    words.push_back(std::move(entries));
  }
  return {{"video_id", video_id},
          {"step", step},
          {"prefix", prefix},
          {"kept", kept},
          {"phrase_words", std::move(words)},
          {"word_attention", matrix_json(word_attention)},
          {"alpha", matrix_json(alpha)},
          {"beta", std::vector<double>(beta.data(), beta.data() + beta.size())},
          {"predicted", predicted}};
}

InspectRecord InspectRecord::from_json(const nlohmann::json& j) {
  InspectRecord r;
  r.video_id = j.at("video_id").get<std::string>();
  r.step = j.at("step").get<int>();
  r.prefix = j.at("prefix").get<std::vector<std::string>>();
  r.kept = j.at("kept").get<std::vector<int>>();
  for (const auto& phrase : j.at("phrase_words")) {
    std::vector<WordWeight> ws;
    for (const auto& w : phrase) {
      ws.push_back({w.at("word").get<std::string>(), w.at("weight").get<double>()});
    }
    r.phrase_words.push_back(std::move(ws));
  }
  r.word_attention = matrix_from_json(j.at("word_attention"));
  r.alpha = matrix_from_json(j.at("alpha"));
  const auto beta = j.at("beta").get<std::vector<double>>();
  r.beta = Eigen::Map<const Vector>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  r.predicted = j.at("predicted").get<std::string>();
  return r;
}

InspectRecord make_record(const std::string& video_id, const StepTrace& trace,
                          TokenId chosen, const Vocabulary& vocab, int top_k) {
  InspectRecord r;
  r.video_id = video_id;
  r.step = trace.step;
  for (TokenId t : trace.state.prefix) r.prefix.push_back(vocab.token(t));
  r.kept = trace.suppression.kept;
  const Matrix& a_hat = trace.suppression.attention;
  for (Eigen::Index row = 0; row < a_hat.rows(); ++row) {
    std::vector<int> order(static_cast<std::size_t>(a_hat.cols()));
    std::iota(order.begin(), order.end(), 0);
    const int k = std::min<int>(top_k, static_cast<int>(order.size()));
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](int x, int y) { return a_hat(row, x) > a_hat(row, y); });
    std::vector<WordWeight> ws;
    for (int i = 0; i < k; ++i) {
      ws.push_back({vocab.token(trace.phrase_words[order[i]]), a_hat(row, order[i])});
    }
    r.phrase_words.push_back(std::move(ws));
  }
  r.word_attention = a_hat;
  r.alpha = trace.groups.alpha;
  r.beta = trace.attend.beta;
  r.predicted = vocab.token(chosen);
  return r;
}

std::vector<InspectRecord> inspect_video(const Model& model,
                                         const VideoFeatures& video,
                                         const Vocabulary& vocab, int max_len,
                                         int top_k) {
  std::vector<InspectRecord> records;
  decode_greedy(model, video.frames, max_len,
                [&](const StepTrace& trace, TokenId chosen) {
                  records.push_back(
                      make_record(video.video_id, trace, chosen, vocab, top_k));
                });
  return records;
}

AlignmentStats alignment_precision(const Model& model,
                                   const std::vector<Example>& examples) {
  AlignmentStats stats;
  if (!model.flags().use_semantic_aligner) {
    stats.mean_mass = std::numeric_limits<double>::quiet_NaN();
    return stats;
  }
  double total = 0.0;
  for (const auto& ex : examples) {
    if (ex.segments.empty()) continue;
    for (const auto& caption : ex.captions) {
      DecoderState state = DecoderState::initial(model.config().dim_hidden);
      std::vector<TokenId> targets = caption.tokens;
      targets.push_back(Vocabulary::kEos);
      for (TokenId target : targets) {
        const StepTrace trace = model.step(ex.video.frames, state);
        const Matrix& a_hat = trace.suppression.attention;
        for (Eigen::Index r = 0; r < a_hat.rows(); ++r) {
          Eigen::Index j = 0;
          a_hat.row(r).maxCoeff(&j);
          const TokenId word = trace.phrase_words[static_cast<std::size_t>(j)];
          auto seg = std::find_if(ex.segments.begin(), ex.segments.end(),
                                  [&](const ConceptSegment& s) { return s.token == word; });
          if (seg == ex.segments.end()) continue;
          total += trace.groups.alpha.row(r).segment(seg->begin, seg->end - seg->begin).sum();
          ++stats.n_phrases;
        }
        state = trace.state;
        state.prefix.push_back(target);
      }
    }
  }
  stats.mean_mass = stats.n_phrases ? total / static_cast<double>(stats.n_phrases) : 0.0;
  return stats;
}

}  // namespace sgn
