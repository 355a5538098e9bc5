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

#include "sgn/experiment.h"

#include "sgn/decoding.h"

namespace sgn {

EvalReport evaluate_model(const Model& model, const std::vector<Example>& examples,
                          const Vocabulary& vocab, int beam_size, int max_len) {
  std::vector<std::string> ids;
  std::vector<Tokens> candidates;
  std::vector<std::vector<Tokens>> references;
  for (const auto& ex : examples) {
    const DecodeResult r =
        beam_size <= 1
            ? decode_greedy(model, ex.video.frames, max_len)
            : decode_beam(model, ex.video.frames, beam_size, max_len,
                          model.config().length_normalization);
    ids.push_back(ex.video.video_id);
    candidates.push_back(vocab.decode(r.caption));
    std::vector<Tokens> refs;
    for (const auto& c : ex.captions) refs.push_back(vocab.decode(c));
    references.push_back(std::move(refs));
  }
  return evaluate(ids, candidates, references);
}

std::vector<AblationFlags> ablation_ladder() {
  return {AblationFlags::ta_baseline(),
          {true, false, false, false},
          {true, true, false, false},
          AblationFlags::full()};
}

nlohmann::json ExperimentRun::to_json() const {
  nlohmann::json j = {{"label", label},
                      {"ablation", flags.to_string()},
                      {"seed", seed},
                      {"metrics", report.corpus},
                      {"final_train_ce", last_epoch.train_ce},
                      {"final_val_ce", last_epoch.val_ce}};
  if (flags.use_semantic_aligner) {
    j["alignment_mass"] = alignment.mean_mass;
    j["alignment_phrases"] = alignment.n_phrases;
  }
  return j;
}

ExperimentRun run_experiment(const std::vector<Example>& train_set,
                             const std::vector<Example>& test_set,
                             const Vocabulary& vocab, Config config,
                             const AblationFlags& flags, std::uint64_t seed,
                             const std::optional<std::filesystem::path>& out_dir) {
  config.seed = seed;
  TrainOptions options;
  options.out_dir = out_dir;
  const TrainResult trained = train(train_set, test_set, vocab, config, flags, options);
  const Model model = model_from(trained.last);

  ExperimentRun run;
  run.label = flags.label();
  run.flags = flags;
  run.seed = seed;
  run.report = evaluate_model(model, test_set, vocab, config.beam_size, config.max_len);
  run.alignment = alignment_precision(model, test_set);
  if (!trained.history.empty()) run.last_epoch = trained.history.back();
  return run;
}

}  // namespace sgn
