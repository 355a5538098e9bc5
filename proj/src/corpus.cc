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

#include "sgn/corpus.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace sgn {
namespace {

constexpr std::array<char, 4> kMagic = {'S', 'G', 'N', 'F'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw DataError("feature file: truncated " + what);
  }
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  put_u32(out, bits);
}

float get_f32(std::istream& in) {
  const std::uint32_t bits = get_u32(in, "frame data");
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

VideoFeatures read_binary(std::istream& in) {
  VideoFeatures v;
  const std::uint32_t id_len = get_u32(in, "header");
  if (id_len > 4096) throw DataError("feature file: malformed header");
  v.video_id.resize(id_len);
  if (!in.read(v.video_id.data(), id_len)) {
    throw DataError("feature file: truncated header");
  }
  const std::uint32_t m = get_u32(in, "header");
  v.dim_appearance = static_cast<int>(get_u32(in, "header"));
  v.dim_motion = static_cast<int>(get_u32(in, "header"));
  if (m == 0 || m > (1u << 20) || v.dim() <= 0 || v.dim() > (1 << 16)) {
    throw DataError("feature file: malformed header");
  }
  v.frames.resize(m, v.dim());
  for (std::uint32_t r = 0; r < m; ++r) {
    for (int c = 0; c < v.dim(); ++c) v.frames(r, c) = get_f32(in);
  }
  return v;
}

VideoFeatures read_text(std::istream& in) {
  VideoFeatures v;
  std::string header;
  if (!std::getline(in, header)) throw DataError("feature file: empty");
  std::istringstream hs(header);
  long m = 0;
  if (!(hs >> v.video_id >> m >> v.dim_appearance >> v.dim_motion) || m <= 0 ||
      v.dim_appearance < 0 || v.dim_motion < 0 || v.dim() <= 0) {
    throw DataError("feature file: malformed header '" + header + "'");
  }
  v.frames.resize(m, v.dim());
  for (long r = 0; r < m; ++r) {
    for (int c = 0; c < v.dim(); ++c) {
      std::string tok;
      if (!(in >> tok)) throw DataError("feature file: truncated frame data");
      try {
        std::size_t used = 0;
        v.frames(r, c) = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        // stod rejects "nan"/"inf" spellings inconsistently; treat any
        // unparsable token as malformed.
        throw DataError("feature file: bad number '" + tok + "'");
      }
    }
  }
  std::string extra;
  if (in >> extra) throw DataError("feature file: trailing data after frames");
  return v;
}

std::set<TokenId> content_tokens(const Example& e, const Vocabulary& vocab) {
  std::set<TokenId> out;
  for (const auto& c : e.captions) {
    for (TokenId t : c.tokens) {
      if (!vocab.is_stopword(t) && !vocab.is_special(t)) out.insert(t);
    }
  }
  return out;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_concepts < 1 || segments_per_video < 1 || frames_per_segment < 1 ||
      n_videos < 1) {
    throw UsageError("synthetic spec: counts must be positive");
  }
  if (n_concepts < segments_per_video) {
    throw UsageError("synthetic spec: n_concepts must be >= segments_per_video");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw UsageError("synthetic spec: noise_sigma must be finite and >= 0");
  }
  if (dim_appearance < 0 || dim_motion < 0 || dim_appearance + dim_motion < 1) {
    throw UsageError("synthetic spec: feature dims");
  }
}

std::string concept_token(int id) { return "concept" + std::to_string(id); }

SyntheticCorpus generate_corpus(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const int dv = spec.dim_appearance + spec.dim_motion;

  std::vector<std::string> words{"then"};
  for (int c = 0; c < spec.n_concepts; ++c) words.push_back(concept_token(c));
  SyntheticCorpus corpus{build_vocabulary({words}, 1), {}, Matrix(spec.n_concepts, dv)};
  for (int c = 0; c < spec.n_concepts; ++c) {
    for (int d = 0; d < dv; ++d) corpus.prototypes(c, d) = rng.normal(0.0, 1.0);
  }

  const int n_frames = spec.n_frames();
  std::vector<int> concepts(spec.n_concepts);
  for (int v = 0; v < spec.n_videos; ++v) {
    std::iota(concepts.begin(), concepts.end(), 0);
    rng.shuffle(concepts);
    if (spec.sorted_segments) {
      std::sort(concepts.begin(), concepts.begin() + spec.segments_per_video);
    }

    Example ex;
    ex.video.video_id = "synth" + std::to_string(v);
    ex.video.dim_appearance = spec.dim_appearance;
    ex.video.dim_motion = spec.dim_motion;
    ex.video.frames.resize(n_frames, dv);
    Caption caption;
    for (int s = 0; s < spec.segments_per_video; ++s) {
      const int concept_id = concepts[s];
      const TokenId token = corpus.vocab.id(concept_token(concept_id));
      ConceptSegment seg{concept_id, token, s * spec.frames_per_segment,
                         (s + 1) * spec.frames_per_segment};
      for (int f = seg.begin; f < seg.end; ++f) {
        for (int d = 0; d < dv; ++d) {
          ex.video.frames(f, d) = corpus.prototypes(concept_id, d) +
                                  (spec.noise_sigma > 0.0
                                       ? rng.normal(0.0, spec.noise_sigma)
                                       : 0.0);
        }
      }
      if (s > 0) caption.tokens.push_back(corpus.vocab.id("then"));
      caption.tokens.push_back(token);
      ex.segments.push_back(seg);
    }
    ex.captions.push_back(std::move(caption));
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

std::vector<int> resample_indices(int m, int n) {
  if (m < 1 || n < 1) throw DataError("resample: empty frame set");
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) {
    idx[i] = static_cast<int>((static_cast<long long>(i) * m) / n);
  }
  return idx;
}

Matrix resample_frames(const Matrix& frames, int n) {
  const auto idx = resample_indices(static_cast<int>(frames.rows()), n);
  Matrix out(n, frames.cols());
  for (int i = 0; i < n; ++i) out.row(i) = frames.row(idx[i]);
  return out;
}

VideoFeatures load_features(const std::filesystem::path& path,
                            const Config& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  VideoFeatures v;
  try {
    if (in.gcount() == 4 && magic == kMagic) {
      v = read_binary(in);
    } else {
      in.clear();
      in.seekg(0);
      v = read_text(in);
    }
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!v.frames.allFinite()) {
    throw DataError(path.string() + ": non-finite feature value");
  }
  if (v.dim_appearance != config.dim_appearance ||
      v.dim_motion != config.dim_motion) {
    throw DataError(path.string() + ": feature dims (" +
                    std::to_string(v.dim_appearance) + ", " +
                    std::to_string(v.dim_motion) + ") do not match config (" +
                    std::to_string(config.dim_appearance) + ", " +
                    std::to_string(config.dim_motion) + ")");
  }
  if (v.n_frames() != config.n_frames) {
    v.frames = resample_frames(v.frames, config.n_frames);
  }
  return v;
}

void save_features(const std::filesystem::path& path, const VideoFeatures& video,
                   bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DataError("cannot write feature file " + path.string());
  if (binary) {
    out.write(kMagic.data(), 4);
    put_u32(out, static_cast<std::uint32_t>(video.video_id.size()));
    out.write(video.video_id.data(),
              static_cast<std::streamsize>(video.video_id.size()));
    put_u32(out, static_cast<std::uint32_t>(video.frames.rows()));
    put_u32(out, static_cast<std::uint32_t>(video.dim_appearance));
    put_u32(out, static_cast<std::uint32_t>(video.dim_motion));
    for (Eigen::Index r = 0; r < video.frames.rows(); ++r) {
      for (Eigen::Index c = 0; c < video.frames.cols(); ++c) {
        put_f32(out, static_cast<float>(video.frames(r, c)));
      }
    }
  } else {
    out << video.video_id << ' ' << video.frames.rows() << ' '
        << video.dim_appearance << ' ' << video.dim_motion << '\n';
    out.precision(9);
    for (Eigen::Index r = 0; r < video.frames.rows(); ++r) {
      for (Eigen::Index c = 0; c < video.frames.cols(); ++c) {
        out << (c ? " " : "") << static_cast<float>(video.frames(r, c));
      }
      out << '\n';
    }
  }
}

bool captions_overlap(const Example& a, const Example& b,
                      const Vocabulary& vocab) {
  const auto ta = content_tokens(a, vocab);
  for (TokenId t : content_tokens(b, vocab)) {
    if (ta.count(t)) return true;
  }
  return false;
}

std::vector<std::size_t> eligible_negatives(const std::vector<Example>& pool,
                                            const Example& anchor,
                                            const Vocabulary& vocab) {
  const auto anchor_tokens = content_tokens(anchor, vocab);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].video.video_id == anchor.video.video_id) continue;
    bool overlap = false;
    for (TokenId t : content_tokens(pool[i], vocab)) {
      if (anchor_tokens.count(t)) {
        overlap = true;
        break;
      }
    }
    if (!overlap) out.push_back(i);
  }
  return out;
}

std::size_t sample_negative(const std::vector<Example>& pool,
                            const Example& anchor, const Vocabulary& vocab,
                            Rng& rng) {
  const auto eligible = eligible_negatives(pool, anchor, vocab);
  if (eligible.empty()) {
    throw DataError("no negative video without caption overlap for '" +
                    anchor.video.video_id + "'");
  }
  return eligible[rng.index(eligible.size())];
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected video_id<TAB>caption");
    }
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest " + path.string());
  for (const auto& e : entries) out << e.video_id << '\t' << e.caption << '\n';
}

std::vector<TextExample> load_corpus_dir(const std::filesystem::path& dir,
                                         const Config& config) {
  const auto entries = read_manifest(dir / "manifest.tsv");
  if (entries.empty()) throw DataError("empty manifest in " + dir.string());

  std::vector<TextExample> out;
  std::map<std::string, std::size_t> index;
  for (const auto& e : entries) {
    auto [it, inserted] = index.emplace(e.video_id, out.size());
    if (inserted) {
      auto feat = dir / "features" / (e.video_id + ".feat");
      if (!std::filesystem::exists(feat)) {
        feat = dir / "features" / (e.video_id + ".txt");
      }
      TextExample ex;
      ex.video = load_features(feat, config);
      ex.video.video_id = e.video_id;
      out.push_back(std::move(ex));
    }
    out[it->second].captions.push_back(tokenize(e.caption));
  }

  const auto seg_path = dir / "segments.tsv";
  if (std::filesystem::exists(seg_path)) {
    std::ifstream in(seg_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string id, token;
      ConceptSegment seg;
      if (!(ls >> id >> seg.concept_id >> token >> seg.begin >> seg.end)) {
        throw DataError("segments.tsv: malformed line '" + line + "'");
      }
      auto it = index.find(id);
      if (it == index.end()) continue;
      seg.token = -1;
      out[it->second].segments.push_back(seg);
      out[it->second].segment_tokens.push_back(token);
    }
  }
  return out;
}

void write_corpus_dir(const std::filesystem::path& dir,
                      const SyntheticCorpus& corpus, bool binary) {
  std::filesystem::create_directories(dir / "features");
  std::vector<ManifestEntry> manifest;
  std::ofstream segs(dir / "segments.tsv");
  for (const auto& ex : corpus.examples) {
    for (const auto& c : ex.captions) {
      manifest.push_back({ex.video.video_id, corpus.vocab.to_text(c)});
    }
    save_features(dir / "features" / (ex.video.video_id + (binary ? ".feat" : ".txt")),
                  ex.video, binary);
    for (const auto& s : ex.segments) {
      segs << ex.video.video_id << '\t' << s.concept_id << '\t'
           << corpus.vocab.token(s.token) << '\t' << s.begin << '\t' << s.end
           << '\n';
    }
  }
  write_manifest(dir / "manifest.tsv", manifest);
}

Vocabulary vocabulary_for(const std::vector<TextExample>& raw, int min_count) {
  std::vector<std::vector<std::string>> sentences;
  for (const auto& ex : raw) {
    sentences.insert(sentences.end(), ex.captions.begin(), ex.captions.end());
  }
  return build_vocabulary(sentences, min_count);
}

std::vector<Example> encode_corpus(const std::vector<TextExample>& raw,
                                   const Vocabulary& vocab, int max_len) {
  std::vector<Example> out;
  out.reserve(raw.size());
  for (const auto& r : raw) {
    Example ex;
    ex.video = r.video;
    for (const auto& words : r.captions) {
      ex.captions.push_back(encode_caption(vocab, words, max_len));
    }
    ex.segments = r.segments;
    for (std::size_t i = 0; i < ex.segments.size(); ++i) {
      ex.segments[i].token = vocab.id(r.segment_tokens[i]);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace sgn
