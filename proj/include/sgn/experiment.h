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

#ifndef SGN_EXPERIMENT_H_
#define SGN_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgn/corpus.h"
#include "sgn/inspect.h"
#include "sgn/metrics.h"
#include "sgn/model.h"
#include "sgn/trainer.h"

namespace sgn {

// Decodes every example (beam_size 1 means greedy) and scores the output
// against its captions.
EvalReport evaluate_model(const Model& model, const std::vector<Example>& examples,
                          const Vocabulary& vocab, int beam_size, int max_len);

struct ExperimentRun {
  std::string label;
  AblationFlags flags;
  std::uint64_t seed = 0;
  EvalReport report;
  AlignmentStats alignment;
  EpochMetrics last_epoch;
  nlohmann::json to_json() const;
};

// TA baseline, SA, SA+PS, SA+PS+CA.
std::vector<AblationFlags> ablation_ladder();

ExperimentRun run_experiment(const std::vector<Example>& train_set,
                             const std::vector<Example>& test_set,
                             const Vocabulary& vocab, Config config,
                             const AblationFlags& flags, std::uint64_t seed,
                             const std::optional<std::filesystem::path>& out_dir = {});

}  // namespace sgn

#endif  // SGN_EXPERIMENT_H_
