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

#ifndef SGN_METRICS_H_
#define SGN_METRICS_H_

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace sgn {

using Tokens = std::vector<std::string>;

// Metric tokenization: lowercase, punctuation stripped, whitespace split.
Tokens metric_tokens(const std::string& caption);

// Corpus BLEU-4: clipped 1-4-gram precisions pooled over the corpus,
// geometric mean, brevity penalty against the closest reference length
// (shorter on ties). No smoothing: any zero precision gives 0.
// `references[i]` are the references of `candidates[i]`.
double bleu4(const std::vector<Tokens>& candidates,
             const std::vector<std::vector<Tokens>>& references);

struct CiderResult {
  double score = 0.0;
  std::vector<double> per_video;
  // Set when the corpus had fewer than two videos and idf weights were
  // replaced by 1.
  bool df_fallback = false;
};

// CIDEr-D: tf-idf weighted n-gram (1-4) vectors, clipped cosine similarity
// with a Gaussian length penalty, averaged over references, times 10.
CiderResult cider_d(const std::vector<Tokens>& candidates,
                    const std::vector<std::vector<Tokens>>& references,
                    double sigma = 6.0);

std::size_t lcs_length(const Tokens& a, const Tokens& b);

// ROUGE-L of one candidate: F-measure from the best precision and best
// recall over its references.
double rouge_l_sentence(const Tokens& candidate, const std::vector<Tokens>& references,
                        double beta = 1.2);
double rouge_l(const std::vector<Tokens>& candidates,
               const std::vector<std::vector<Tokens>>& references,
               double beta = 1.2);

struct EvalReport {
  std::vector<std::string> video_ids;
  std::map<std::string, double> corpus;  // "BLEU@4", "CIDEr-D", "ROUGE_L"
  std::map<std::string, std::vector<double>> per_video;
  bool cider_df_fallback = false;
  std::string config_hash;

  int n_videos() const { return static_cast<int>(video_ids.size()); }
  nlohmann::json to_json() const;
};

EvalReport evaluate(const std::vector<std::string>& video_ids,
                    const std::vector<Tokens>& candidates,
                    const std::vector<std::vector<Tokens>>& references,
                    const std::string& config_hash = "");

}  // namespace sgn

#endif  // SGN_METRICS_H_
