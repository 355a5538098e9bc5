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

#ifndef SGN_CONFIG_H_
#define SGN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace sgn {

// Model, decoding and optimization settings. Read from and written to a
// `key = value` text file; unknown keys are rejected.
struct Config {
  int n_frames = 30;
  int dim_appearance = 16;
  int dim_motion = 16;
  int dim_word = 32;
  int dim_hidden = 32;
  int dim_attention = 0;  // joint attention width; 0 means dim_hidden
  double tau = 0.2;
  double lambda = 0.16;
  int beam_size = 5;
  int max_len = 20;
  std::uint64_t seed = 1;

  int phrase_layers = 1;
  bool use_position = true;
  bool length_normalization = true;
  int min_count = 1;
  double init_scale = 0.1;

  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_size = 16;
  int epochs = 300;
  double clip_norm = 5.0;
  double val_fraction = 0.1;

  int dim_video() const { return dim_appearance + dim_motion; }
  int attention_width() const {
    return dim_attention > 0 ? dim_attention : dim_hidden;
  }

  // Throws UsageError on out-of-range values.
  void validate() const;
};

Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);
std::string format_config(const Config& config);

// Which components of the model are active. The all-off setting is the
// temporal-attention (TA) baseline that attends over frames directly.
struct AblationFlags {
  bool use_semantic_aligner = true;
  bool use_phrase_suppressor = true;
  bool use_ca_loss = true;
  bool group_by_word = false;

  static AblationFlags full() { return {}; }
  static AblationFlags ta_baseline() { return {false, false, false, false}; }

  // Parses a comma-separated component list, e.g. "sa,ps,ca", "sa", "" or
  // "none". "word" selects grouping by raw words (implies no suppressor).
  static AblationFlags parse(std::string_view list);

  void validate() const;
  std::string label() const;
  std::string to_string() const;

  bool operator==(const AblationFlags&) const = default;
};

}  // namespace sgn

#endif  // SGN_CONFIG_H_
