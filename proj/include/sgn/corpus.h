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

#ifndef SGN_CORPUS_H_
#define SGN_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sgn/config.h"
#include "sgn/rng.h"
#include "sgn/types.h"
#include "sgn/vocabulary.h"

namespace sgn {

// Ground-truth frame range [begin, end) showing one concept.
struct ConceptSegment {
  int concept_id = 0;
  TokenId token = Vocabulary::kUnk;
  int begin = 0;
  int end = 0;

  bool contains(int frame) const { return frame >= begin && frame < end; }
  bool operator==(const ConceptSegment&) const = default;
};

struct Example {
  VideoFeatures video;
  std::vector<Caption> captions;
  // Empty for real data; filled by the synthetic generator.
  std::vector<ConceptSegment> segments;
};

struct SyntheticSpec {
  int n_concepts = 12;
  int segments_per_video = 4;
  int frames_per_segment = 3;
  double noise_sigma = 0.05;
  int n_videos = 100;
  int dim_appearance = 8;
  int dim_motion = 8;
  // Lay a video's concepts out in ascending id order instead of at random.
  bool sorted_segments = false;

  int n_frames() const { return segments_per_video * frames_per_segment; }
  void validate() const;
};

struct SyntheticCorpus {
  Vocabulary vocab;
  std::vector<Example> examples;
  // One prototype row per concept, width dim_appearance + dim_motion.
  Matrix prototypes;
};

// Token naming concept `id` in synthetic captions, e.g. "concept3".
std::string concept_token(int id);

// Each video is segments_per_video distinct concepts, each shown for
// frames_per_segment frames equal to the concept prototype plus N(0, sigma^2)
// noise. The caption names the concepts in segment order joined by "then".
SyntheticCorpus generate_corpus(const SyntheticSpec& spec, std::uint64_t seed);

// Source frame index for each of n output frames: floor(i * m / n).
std::vector<int> resample_indices(int m, int n);
Matrix resample_frames(const Matrix& frames, int n);

// Feature files: binary ("SGNF" magic, little-endian) or text (first line
// "video_id M d_a d_m", then M rows of decimals). Format is detected on load.
// Frames are resampled to config.n_frames.
VideoFeatures load_features(const std::filesystem::path& path,
                            const Config& config);
void save_features(const std::filesystem::path& path,
                   const VideoFeatures& video, bool binary = true);

// True if some non-stopword token appears in a caption of both examples.
bool captions_overlap(const Example& a, const Example& b,
                      const Vocabulary& vocab);
// Indices of pool entries whose captions share no non-stopword with `anchor`.
std::vector<std::size_t> eligible_negatives(const std::vector<Example>& pool,
                                            const Example& anchor,
                                            const Vocabulary& vocab);
// Uniform draw from eligible_negatives. Throws DataError if none.
std::size_t sample_negative(const std::vector<Example>& pool,
                            const Example& anchor, const Vocabulary& vocab,
                            Rng& rng);

// `video_id<TAB>caption` lines; ids may repeat for multiple captions.
struct ManifestEntry {
  std::string video_id;
  std::string caption;
};
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

// Corpus directory layout:
//   manifest.tsv            video_id<TAB>caption
//   features/<id>.feat      feature file (binary or text)
//   segments.tsv            optional: video_id<TAB>concept<TAB>token<TAB>begin<TAB>end
struct TextExample {
  VideoFeatures video;
  std::vector<std::vector<std::string>> captions;
  std::vector<ConceptSegment> segments;  // token field unresolved (-1)
  std::vector<std::string> segment_tokens;
};
std::vector<TextExample> load_corpus_dir(const std::filesystem::path& dir,
                                         const Config& config);
void write_corpus_dir(const std::filesystem::path& dir,
                      const SyntheticCorpus& corpus, bool binary = true);
std::vector<Example> encode_corpus(const std::vector<TextExample>& raw,
                                   const Vocabulary& vocab, int max_len);
Vocabulary vocabulary_for(const std::vector<TextExample>& raw, int min_count);

}  // namespace sgn

#endif  // SGN_CORPUS_H_
