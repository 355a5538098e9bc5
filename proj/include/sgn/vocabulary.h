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

#ifndef SGN_VOCABULARY_H_
#define SGN_VOCABULARY_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sgn/types.h"

namespace sgn {

// Function words ignored when deciding whether two captions overlap.
const std::vector<std::string>& stopword_list();

// Lowercases, strips punctuation and splits on whitespace.
std::vector<std::string> tokenize(std::string_view text);

// Token list with four reserved entries at fixed indices.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kSos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kUnk = 3;
  static constexpr int kNumSpecials = 4;

  static const std::vector<std::string>& special_tokens();

  // `words` excludes the specials; they are prepended. Duplicates or words
  // colliding with a special name throw DataError.
  explicit Vocabulary(const std::vector<std::string>& words);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(TokenId id) const;
  // UNK for unknown strings.
  TokenId id(std::string_view token) const;
  bool contains(std::string_view token) const;
  bool is_special(TokenId id) const { return id >= 0 && id < kNumSpecials; }
  bool is_stopword(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<std::string> decode(const Caption& caption) const;
  std::string to_text(const Caption& caption) const;

  // FNV-1a over the token list; stored in checkpoints.
  std::uint64_t hash() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::vector<bool> stopword_;
};

// Keeps tokens with frequency >= min_count, ordered by frequency descending
// then lexicographically. Throws DataError on an empty corpus.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                            int min_count);

// Maps words to ids (unknown -> UNK). Throws DataError when longer than
// max_len or empty.
Caption encode_caption(const Vocabulary& vocab,
                       const std::vector<std::string>& words, int max_len);

// Header line naming the specials, then one token per line (specials first).
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);
std::string format_vocabulary(const Vocabulary& vocab);
Vocabulary parse_vocabulary(std::string_view text);

}  // namespace sgn

#endif  // SGN_VOCABULARY_H_
