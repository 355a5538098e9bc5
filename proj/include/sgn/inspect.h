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

#ifndef SGN_INSPECT_H_
#define SGN_INSPECT_H_

#include <string>
#include <vector>

#include <json.hpp>

#include "sgn/corpus.h"
#include "sgn/decoding.h"
#include "sgn/model.h"
#include "sgn/vocabulary.h"

namespace sgn {

struct WordWeight {
  std::string word;
  double weight = 0.0;
};

// One decoding step as seen by the grouping machinery: which phrases
// survived, what words composed them, where they looked in the video and
// how the decoder weighted them.
struct InspectRecord {
  std::string video_id;
  int step = 0;
  std::vector<std::string> prefix;
  std::vector<int> kept;
  std::vector<std::vector<WordWeight>> phrase_words;  // top-k per kept phrase
  Matrix word_attention;  // kept rows of A over the prefix words
  Matrix alpha;  // [kept x N]; empty in TA mode
  Vector beta;   // over groups, or frames in TA mode
  std::string predicted;

  nlohmann::json to_json() const;
  static InspectRecord from_json(const nlohmann::json& j);
};

InspectRecord make_record(const std::string& video_id, const StepTrace& trace,
                          TokenId chosen, const Vocabulary& vocab, int top_k = 3);

// Greedy decode of one video with a record per step.
std::vector<InspectRecord> inspect_video(const Model& model,
                                         const VideoFeatures& video,
                                         const Vocabulary& vocab, int max_len,
                                         int top_k = 3);

struct AlignmentStats {
  double mean_mass = 0.0;  // alpha mass inside the ground-truth segment
  long n_phrases = 0;
};

// Teacher-forced over gold captions: for every surviving phrase whose
// dominant word (largest word-attention weight) names a concept with a
// ground-truth segment, the alpha mass that falls inside that segment.
AlignmentStats alignment_precision(const Model& model,
                                   const std::vector<Example>& examples);

}  // namespace sgn

#endif  // SGN_INSPECT_H_
