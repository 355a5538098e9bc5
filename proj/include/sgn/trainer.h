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

#ifndef SGN_TRAINER_H_
#define SGN_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sgn/config.h"
#include "sgn/corpus.h"
#include "sgn/model.h"
#include "sgn/rng.h"
#include "sgn/vocabulary.h"

namespace sgn {

// Rows found in the pretrained file (`token v1 ... v_dw` per line) take
// that vector, the rest are uniform in (-0.1, 0.1).
Matrix embed_init(const Vocabulary& vocab, int dim_word, Rng& rng,
                  const std::optional<std::filesystem::path>& pretrained = {});

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;  // mean total loss per caption
  double train_ce = 0.0;    // mean CE per token
  double train_ca = 0.0;    // mean CA per group (0 when disabled)
  double val_ce = 0.0;      // mean CE per token on the validation set
  double grad_norm = 0.0;   // mean pre-clip norm over batches
  int items_without_negative = 0;
};

struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  Config config;
  AblationFlags flags;
  int vocab_size = 0;
  std::uint64_t vocab_hash = 0;
  ModelParams params;
  long optimizer_steps = 0;
  ModelParams adam_m;
  ModelParams adam_v;
  int epoch = 0;
  std::string rng_state;
  double best_val_ce = 0.0;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);
Model model_from(const Checkpoint& ckpt);

struct TrainOptions {
  // When set: vocab.txt, config.txt, metrics.jsonl, last.ckpt, best.ckpt.
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::filesystem::path> pretrained_embeddings;
  // Continue from this checkpoint (parameters, optimizer, epoch, RNG).
  std::optional<Checkpoint> resume;
  // Stop once the epoch's mean train CE per token falls below this.
  double stop_below_ce = -1.0;
  std::function<void(const EpochMetrics&)> on_epoch;
};

struct TrainResult {
  Checkpoint last;
  Checkpoint best;
  std::vector<EpochMetrics> history;
  std::vector<double> batch_losses;
};

// Teacher-forced training with Adam on L = L_ce + lambda L_ca, one freshly
// sampled negative video per (video, caption) item per epoch. Throws
// NumericError on a non-finite loss; files from the last good epoch stay.
TrainResult train(const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const Vocabulary& vocab,
                  const Config& config, const AblationFlags& flags,
                  const TrainOptions& options = {});

// Mean CE per token with teacher forcing.
double mean_token_ce(const Model& model, const std::vector<Example>& set);

// Seeded split by video into (train, validation).
std::pair<std::vector<Example>, std::vector<Example>> split_corpus(
    const std::vector<Example>& corpus, double val_fraction, std::uint64_t seed);

}  // namespace sgn

#endif  // SGN_TRAINER_H_
