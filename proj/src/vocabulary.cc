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

#include "sgn/vocabulary.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace sgn {

const std::vector<std::string>& stopword_list() {
  // Articles, prepositions, conjunctions, copulas and pronouns. "then" joins
  // concepts in the synthetic caption template.
  static const std::vector<std::string> words = {
      "a",    "an",   "the",  "is",   "are",  "was",   "were", "be",
      "been", "being", "am",  "of",   "in",   "on",    "at",   "to",
      "for",  "with", "by",   "from", "into", "and",   "or",   "then",
      "it",   "its",  "this", "that", "as",   "while", "there", "some"};
  return words;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else if (std::ispunct(c) && ch != '<' && ch != '>' && ch != '_') {
      continue;
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

const std::vector<std::string>& Vocabulary::special_tokens() {
  static const std::vector<std::string> specials = {"<pad>", "<sos>", "<eos>",
                                                    "<unk>"};
  return specials;
}

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  tokens_ = special_tokens();
  tokens_.insert(tokens_.end(), words.begin(), words.end());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw DataError("vocabulary: empty token");
    auto [it, inserted] =
        index_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted) throw DataError("vocabulary: duplicate token '" + tokens_[i] + "'");
  }
  stopword_.assign(tokens_.size(), false);
  for (const auto& w : stopword_list()) {
    if (auto it = index_.find(w); it != index_.end()) stopword_[it->second] = true;
  }
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || id >= size()) {
    throw DataError("vocabulary: token id out of range: " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

bool Vocabulary::is_stopword(TokenId id) const {
  return id >= 0 && id < size() && stopword_[static_cast<std::size_t>(id)];
}

std::vector<std::string> Vocabulary::decode(const Caption& caption) const {
  std::vector<std::string> out;
  out.reserve(caption.tokens.size());
  for (TokenId t : caption.tokens) out.push_back(token(t));
  return out;
}

std::string Vocabulary::to_text(const Caption& caption) const {
  std::string out;
  for (TokenId t : caption.tokens) {
    if (!out.empty()) out += ' ';
    out += token(t);
  }
  return out;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  }
  return h;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                            int min_count) {
  if (corpus.empty()) throw DataError("build_vocabulary: empty corpus");
  std::map<std::string, int> counts;
  const auto& specials = Vocabulary::special_tokens();
  for (const auto& sentence : corpus) {
    for (const auto& w : sentence) {
      if (std::find(specials.begin(), specials.end(), w) != specials.end()) {
        continue;
      }
      ++counts[w];
    }
  }
  std::vector<std::pair<std::string, int>> kept;
  for (const auto& [w, n] : counts) {
    if (n >= min_count) kept.emplace_back(w, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> words;
  words.reserve(kept.size());
  for (auto& [w, n] : kept) words.push_back(w);
  return Vocabulary(words);
}

Caption encode_caption(const Vocabulary& vocab,
                       const std::vector<std::string>& words, int max_len) {
  if (words.empty()) throw DataError("encode_caption: empty caption");
  if (static_cast<int>(words.size()) > max_len) {
    throw DataError("encode_caption: caption of " +
                    std::to_string(words.size()) + " tokens exceeds max_len " +
                    std::to_string(max_len));
  }
  Caption c;
  c.tokens.reserve(words.size());
  for (const auto& w : words) c.tokens.push_back(vocab.id(w));
  return c;
}

std::string format_vocabulary(const Vocabulary& vocab) {
  const auto& s = Vocabulary::special_tokens();
  std::ostringstream out;
  out << "#vocab v1 pad=" << s[0] << " sos=" << s[1] << " eos=" << s[2]
      << " unk=" << s[3] << "\n";
  for (const auto& t : vocab.tokens()) out << t << "\n";
  return out.str();
}

Vocabulary parse_vocabulary(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header) || header.rfind("#vocab v1", 0) != 0) {
    throw DataError("vocabulary: missing '#vocab v1' header");
  }
  const auto& s = Vocabulary::special_tokens();
  const std::string expected = "#vocab v1 pad=" + s[0] + " sos=" + s[1] +
                               " eos=" + s[2] + " unk=" + s[3];
  if (header != expected) {
    throw DataError("vocabulary: unexpected specials header: " + header);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.size() < s.size() || !std::equal(s.begin(), s.end(), lines.begin())) {
    throw DataError("vocabulary: specials must lead the token list");
  }
  return Vocabulary(std::vector<std::string>(lines.begin() + s.size(), lines.end()));
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << format_vocabulary(vocab);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_vocabulary(buf.str());
}

}  // namespace sgn
