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

#include <doctest.h>

#include <cmath>

#include "sgn/corpus.h"
#include "sgn/inspect.h"
#include "test_util.h"

namespace sgn {
namespace {

VideoFeatures video_for(Rng& rng) {
  VideoFeatures v;
  v.video_id = "clip";
  v.dim_appearance = 2;
  v.dim_motion = 2;
  v.frames = test::random_matrix(rng, 4, 4);
  return v;
}

TEST_CASE("inspect records have documented shapes and normalized rows") {
  Rng rng(1);
  const Model m = test::tiny_model(AblationFlags::full(), 8, 3);
  const Vocabulary vocab = build_vocabulary({{"w4", "w5", "w6", "w7"}}, 1);
  const auto records = inspect_video(m, video_for(rng), vocab, 5, 2);
  REQUIRE_FALSE(records.empty());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const InspectRecord& r = records[i];
    CHECK(r.step == static_cast<int>(i) + 1);
    CHECK(r.prefix.size() == i);
    CHECK(r.kept.size() == r.phrase_words.size());
    CHECK(r.word_attention.rows() == static_cast<long>(r.kept.size()));
    CHECK(r.word_attention.cols() == std::max<long>(1, static_cast<long>(i)));
    CHECK(r.alpha.rows() == static_cast<long>(r.kept.size()));
    CHECK(r.alpha.cols() == 4);
    CHECK(r.beta.size() == static_cast<long>(r.kept.size()));
    CHECK((r.alpha.rowwise().sum().array() - 1).abs().maxCoeff() < 1e-5);
    CHECK((r.word_attention.rowwise().sum().array() - 1).abs().maxCoeff() < 1e-5);
    CHECK(std::abs(r.beta.sum() - 1) < 1e-5);
    for (const auto& words : r.phrase_words) {
      CHECK(words.size() <= 2);
      for (std::size_t k = 1; k < words.size(); ++k) CHECK(words[k - 1].weight >= words[k].weight);
    }
  }
  CHECK(records[0].phrase_words[0][0].word == "<sos>");
}

TEST_CASE("inspect records round trip through JSON lines") {
  Rng rng(2);
  const Model m = test::tiny_model(AblationFlags::full(), 8, 4);
  const Vocabulary vocab = build_vocabulary({{"w4", "w5", "w6", "w7"}}, 1);
  for (const auto& r : inspect_video(m, video_for(rng), vocab, 4)) {
    const std::string line = r.to_json().dump();
    CHECK(line.find('\n') == std::string::npos);
    const InspectRecord back = InspectRecord::from_json(nlohmann::json::parse(line));
    CHECK(back.video_id == r.video_id);
    CHECK(back.step == r.step);
    CHECK(back.prefix == r.prefix);
    CHECK(back.kept == r.kept);
    CHECK(back.predicted == r.predicted);
    CHECK(back.alpha == r.alpha);
    CHECK(back.word_attention == r.word_attention);
    CHECK(back.beta == r.beta);
    REQUIRE(back.phrase_words.size() == r.phrase_words.size());
    for (std::size_t i = 0; i < r.phrase_words.size(); ++i) {
      for (std::size_t k = 0; k < r.phrase_words[i].size(); ++k) {
        CHECK(back.phrase_words[i][k].word == r.phrase_words[i][k].word);
        CHECK(back.phrase_words[i][k].weight == r.phrase_words[i][k].weight);
      }
    }
  }
  CHECK_THROWS_AS(InspectRecord::from_json(nlohmann::json::parse(
                      R"({"video_id":"x","step":1,"prefix":[],"kept":[],"phrase_words":[],
                          "word_attention":[[1],[1,2]],"alpha":[],"beta":[],"predicted":"a"})")),
                  DataError);
}

TEST_CASE("TA mode records attention over frames only") {
  Rng rng(3);
  const Model m = test::tiny_model(AblationFlags::ta_baseline(), 8, 5);
  const Vocabulary vocab = build_vocabulary({{"w4", "w5", "w6", "w7"}}, 1);
  const auto records = inspect_video(m, video_for(rng), vocab, 3);
  REQUIRE_FALSE(records.empty());
  CHECK(records[0].alpha.size() == 0);
  CHECK(records[0].beta.size() == 4);
}

TEST_CASE("alignment precision on planted data") {
  SyntheticSpec spec;
  spec.n_videos = 3;
  spec.n_concepts = 6;
  spec.segments_per_video = 2;
  spec.frames_per_segment = 2;
  spec.dim_appearance = 2;
  spec.dim_motion = 2;
  const SyntheticCorpus corpus = generate_corpus(spec, 1);
  Config c;
  c.n_frames = 4;
  c.dim_appearance = 2;
  c.dim_motion = 2;
  c.dim_word = 4;
  c.dim_hidden = 4;
  Rng rng(2);
  Model m = Model::initialize(c, AblationFlags::full(), corpus.vocab.size(), rng);
  // Zero relevance gives uniform alpha: each 2-frame segment holds half.
  m.mutable_params().aligner.score.setZero();
  const AlignmentStats s = alignment_precision(m, corpus.examples);
  CHECK(s.n_phrases > 0);
  CHECK(s.mean_mass == doctest::Approx(0.5).epsilon(1e-12));

  const Model ta = Model::initialize(c, AblationFlags::ta_baseline(), corpus.vocab.size(), rng);
  CHECK(std::isnan(alignment_precision(ta, corpus.examples).mean_mass));
}

}  // namespace
}  // namespace sgn
