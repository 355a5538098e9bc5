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

#include "sgn/cli.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgn/bench.h"
#include "sgn/config.h"
#include "sgn/corpus.h"
#include "sgn/decoding.h"
#include "sgn/experiment.h"
#include "sgn/inspect.h"
#include "sgn/metrics.h"
#include "sgn/trainer.h"
#include "sgn/vocabulary.h"

namespace sgn {
namespace {

namespace fs = std::filesystem;

struct ModelBundle {
  Model model;
  Vocabulary vocab;
};

ModelBundle load_bundle(const fs::path& checkpoint, const std::string& vocab_path) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const fs::path vpath =
      vocab_path.empty() ? checkpoint.parent_path() / "vocab.txt" : fs::path(vocab_path);
  Vocabulary vocab = load_vocabulary(vpath);
  if (vocab.hash() != ckpt.vocab_hash || vocab.size() != ckpt.vocab_size) {
    throw DataError("vocabulary " + vpath.string() + " does not match checkpoint");
  }
  return {model_from(ckpt), std::move(vocab)};
}

Config load_or_default(const std::string& path) {
  return path.empty() ? Config{} : load_config(path);
}

// Feature files named by a list file (one path per line, relative to the
// list's directory) or by a corpus directory's manifest.
std::vector<VideoFeatures> load_inputs(const std::string& list, const std::string& corpus,
                                       const std::vector<std::string>& files,
                                       const Config& config) {
  std::vector<VideoFeatures> out;
  if (!corpus.empty()) {
    for (auto& ex : load_corpus_dir(corpus, config)) out.push_back(std::move(ex.video));
  }
  if (!list.empty()) {
    std::ifstream in(list);
    if (!in) throw DataError("cannot open feature list " + list);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      fs::path p(line);
      if (p.is_relative()) p = fs::path(list).parent_path() / p;
      out.push_back(load_features(p, config));
    }
  }
  for (const auto& f : files) out.push_back(load_features(f, config));
  if (out.empty()) throw UsageError("no input videos (use --features, --corpus or files)");
  return out;
}

std::vector<Example> load_training_corpus(const std::string& dir, const Config& config,
                                          std::optional<Vocabulary>& vocab) {
  const auto raw = load_corpus_dir(dir, config);
  if (!vocab) vocab = vocabulary_for(raw, config.min_count);
  return encode_corpus(raw, *vocab, config.max_len);
}

void write_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  if (!path.empty()) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    f << j.dump(2) << '\n';
  }
  out << j.dump(2) << '\n';
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      seeds.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw UsageError("bad seed '" + item + "'");
    }
  }
  if (seeds.empty()) throw UsageError("no seeds given");
  return seeds;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic grouping captioner: train, decode, evaluate, inspect"};
  app.require_subcommand(1);

  // synth
  SyntheticSpec spec;
  std::string synth_out;
  std::uint64_t synth_seed = 1;
  bool synth_text = false;
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus directory");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--concepts", spec.n_concepts);
  synth->add_option("--segments", spec.segments_per_video);
  synth->add_option("--frames-per-segment", spec.frames_per_segment);
  synth->add_option("--noise", spec.noise_sigma);
  synth->add_option("--videos", spec.n_videos);
  synth->add_option("--dim-a", spec.dim_appearance);
  synth->add_option("--dim-m", spec.dim_motion);
  synth->add_option("--seed", synth_seed);
  synth->add_flag("--text", synth_text, "Write text feature files");
  synth->add_flag("--sorted", spec.sorted_segments, "Order each video's concepts by id");

  // train
  std::string config_path, corpus_dir, out_dir, ablation = "sa,ps,ca", resume_path,
                                                 pretrained;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> epochs_override;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--config", config_path, "key = value config file");
  train_cmd->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  train_cmd->add_option("--out", out_dir, "Output directory")->required();
  train_cmd->add_option("--ablation", ablation, "Enabled components, e.g. sa,ps,ca");
  train_cmd->add_option("--seed", seed_override);
  train_cmd->add_option("--epochs", epochs_override);
  train_cmd->add_option("--resume", resume_path, "Checkpoint to continue from");
  train_cmd->add_option("--pretrained", pretrained, "Word vector file");

  // generate
  std::string checkpoint, vocab_path, features_list, dump_dir, out_path;
  std::vector<std::string> feature_files;
  std::optional<int> beam, max_len;
  bool greedy = false;
  auto* gen = app.add_subcommand("generate", "Caption videos");
  gen->add_option("--checkpoint", checkpoint)->required();
  gen->add_option("--vocab", vocab_path);
  gen->add_option("--features", features_list, "File listing feature files");
  gen->add_option("--corpus", corpus_dir, "Corpus directory to caption");
  gen->add_option("files", feature_files, "Feature files");
  gen->add_option("--beam", beam);
  gen->add_flag("--greedy", greedy);
  gen->add_option("--max-len", max_len);
  gen->add_option("--dump-attn", dump_dir, "Write per-step attention records here");
  gen->add_option("--out", out_path);

  // eval
  std::string candidates_path, references_path;
  auto* eval_cmd = app.add_subcommand("eval", "Score captions (BLEU@4, CIDEr-D, ROUGE_L)");
  eval_cmd->add_option("--candidates", candidates_path)->required();
  eval_cmd->add_option("--references", references_path)->required();
  eval_cmd->add_option("--out", out_path);

  // inspect
  int top_k = 3;
  auto* insp = app.add_subcommand("inspect", "Dump grouping and attention per step");
  insp->add_option("--checkpoint", checkpoint)->required();
  insp->add_option("--vocab", vocab_path);
  insp->add_option("--features", features_list);
  insp->add_option("files", feature_files);
  insp->add_option("--top-k", top_k);
  insp->add_option("--max-len", max_len);

  // ablate
  std::string seeds = "1,2,3";
  std::vector<std::string> ablations;
  auto* abl = app.add_subcommand("ablate", "Train and score ablation settings");
  abl->add_option("--config", config_path);
  abl->add_option("--corpus", corpus_dir)->required();
  abl->add_option("--out", out_dir);
  abl->add_option("--seeds", seeds);
  abl->add_option("--ablation", ablations, "Repeatable; default the TA..SGN ladder");
  abl->add_option("--epochs", epochs_override);

  // bench
  int repeats = 30, vocab_size = 50;
  int bench_frames = 30, bench_len = 20;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "Per-step decode latency, SGN vs TA");
  bench->add_option("--config", config_path);
  bench->add_option("--frames", bench_frames);
  bench->add_option("--max-len", bench_len);
  bench->add_option("--repeats", repeats);
  bench->add_option("--vocab-size", vocab_size);
  bench->add_option("--seed", bench_seed);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
      app.parse(rev);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "sgn: usage error: " << e.what() << '\n';
      return kExitUsage;
    }

    if (synth->parsed()) {
      const SyntheticCorpus corpus = generate_corpus(spec, synth_seed);
      write_corpus_dir(synth_out, corpus, !synth_text);
      Config cfg;
      cfg.n_frames = spec.n_frames();
      cfg.dim_appearance = spec.dim_appearance;
      cfg.dim_motion = spec.dim_motion;
      std::ofstream(fs::path(synth_out) / "config.txt") << format_config(cfg);
      out << "wrote " << corpus.examples.size() << " videos to " << synth_out << '\n';
    } else if (train_cmd->parsed()) {
      Config cfg = load_or_default(config_path);
      if (seed_override) cfg.seed = *seed_override;
      if (epochs_override) cfg.epochs = *epochs_override;
      cfg.validate();
      const AblationFlags flags = AblationFlags::parse(ablation);
      std::optional<Vocabulary> vocab;
      TrainOptions options;
      options.out_dir = out_dir;
      if (!pretrained.empty()) options.pretrained_embeddings = pretrained;
      if (!resume_path.empty()) {
        options.resume = load_checkpoint(resume_path);
        vocab = load_vocabulary(fs::path(resume_path).parent_path() / "vocab.txt");
      }
      const auto corpus = load_training_corpus(corpus_dir, cfg, vocab);
      auto [train_set, val_set] = split_corpus(corpus, cfg.val_fraction, cfg.seed);
      options.on_epoch = [&](const EpochMetrics& m) {
        err << "epoch " << m.epoch << " loss " << m.train_loss << " ce " << m.train_ce
            << " ca " << m.train_ca << " val_ce " << m.val_ce << '\n';
      };
      const TrainResult r = train(train_set, val_set, *vocab, cfg, flags, options);
      out << nlohmann::json{{"label", flags.label()},
                            {"epochs", r.last.epoch},
                            {"best_val_ce", r.last.best_val_ce},
                            {"out", out_dir}}
                 .dump()
          << '\n';
    } else if (gen->parsed()) {
      const ModelBundle b = load_bundle(checkpoint, vocab_path);
      const Config& cfg = b.model.config();
      const int steps = max_len.value_or(cfg.max_len);
      const int width = greedy ? 1 : beam.value_or(cfg.beam_size);
      if (width < 1 || steps < 1) throw UsageError("--beam and --max-len must be >= 1");
      const auto videos = load_inputs(features_list, corpus_dir, feature_files, cfg);
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw DataError("cannot write " + out_path);
      }
      std::ostream& sink = out_path.empty() ? out : file;
      if (!dump_dir.empty()) fs::create_directories(dump_dir);
      for (const auto& v : videos) {
        const DecodeResult r =
            width == 1 ? decode_greedy(b.model, v.frames, steps)
                       : decode_beam(b.model, v.frames, width, steps,
                                     cfg.length_normalization);
        sink << v.video_id << '\t' << b.vocab.to_text(r.caption) << '\n';
        if (!dump_dir.empty()) {
          std::ofstream dump(fs::path(dump_dir) / (v.video_id + ".jsonl"));
          for (const auto& rec : inspect_video(b.model, v, b.vocab, steps)) {
            dump << rec.to_json().dump() << '\n';
          }
        }
      }
    } else if (eval_cmd->parsed()) {
      std::map<std::string, std::string> cands;
      std::vector<std::string> order;
      for (const auto& e : read_manifest(candidates_path)) {
        if (!cands.emplace(e.video_id, e.caption).second) {
          throw DataError("duplicate candidate for " + e.video_id);
        }
        order.push_back(e.video_id);
      }
      std::map<std::string, std::vector<Tokens>> refs;
      for (const auto& e : read_manifest(references_path)) {
        refs[e.video_id].push_back(metric_tokens(e.caption));
      }
      std::vector<Tokens> c;
      std::vector<std::vector<Tokens>> r;
      for (const auto& id : order) {
        auto it = refs.find(id);
        if (it == refs.end()) throw DataError("no references for " + id);
        c.push_back(metric_tokens(cands[id]));
        r.push_back(it->second);
      }
      const EvalReport report = evaluate(order, c, r, "bleu4;cider-d:sigma=6;rouge-l:beta=1.2");
      write_json(report.to_json(), out_path, out);
    } else if (insp->parsed()) {
      const ModelBundle b = load_bundle(checkpoint, vocab_path);
      const int steps = max_len.value_or(b.model.config().max_len);
      for (const auto& v : load_inputs(features_list, "", feature_files, b.model.config())) {
        for (const auto& rec : inspect_video(b.model, v, b.vocab, steps, top_k)) {
          out << rec.to_json().dump() << '\n';
        }
      }
    } else if (abl->parsed()) {
      Config cfg = load_or_default(config_path);
      if (epochs_override) cfg.epochs = *epochs_override;
      cfg.validate();
      std::vector<AblationFlags> settings;
      for (const auto& a : ablations) settings.push_back(AblationFlags::parse(a));
      if (settings.empty()) settings = ablation_ladder();
      std::optional<Vocabulary> vocab;
      const auto corpus = load_training_corpus(corpus_dir, cfg, vocab);
      nlohmann::json runs = nlohmann::json::array();
      std::map<std::string, std::vector<double>> cider_by_label;
      for (std::uint64_t seed : parse_seeds(seeds)) {
        auto [train_set, test_set] = split_corpus(corpus, cfg.val_fraction, seed);
        for (const auto& flags : settings) {
          std::optional<fs::path> run_dir;
          if (!out_dir.empty()) {
            run_dir = fs::path(out_dir) / ("seed" + std::to_string(seed)) / flags.to_string();
          }
          const ExperimentRun run =
              run_experiment(train_set, test_set, *vocab, cfg, flags, seed, run_dir);
          err << run.label << " seed " << seed << " CIDEr-D "
              << run.report.corpus.at("CIDEr-D") << '\n';
          cider_by_label[run.label].push_back(run.report.corpus.at("CIDEr-D"));
          runs.push_back(run.to_json());
        }
      }
      nlohmann::json summary = nlohmann::json::object();
      for (const auto& [label, values] : cider_by_label) {
        double s = 0;
        for (double v : values) s += v;
        summary[label] = {{"mean_cider_d", s / static_cast<double>(values.size())}};
      }
      write_json({{"runs", runs}, {"summary", summary}},
                 out_dir.empty() ? "" : (fs::path(out_dir) / "ablation.json").string(), out);
    } else if (bench->parsed()) {
      Config cfg = load_or_default(config_path);
      cfg.n_frames = bench_frames;
      cfg.max_len = std::max(cfg.max_len, bench_len);
      cfg.validate();
      if (repeats < 1 || vocab_size <= Vocabulary::kNumSpecials) {
        throw UsageError("--repeats >= 1 and --vocab-size > 4 required");
      }
      const BenchReport report = run_bench(cfg, vocab_size, bench_len, repeats, bench_seed);
      out << report.to_json().dump(2) << '\n';
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "sgn: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "sgn: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "sgn: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "sgn: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "sgn: error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace sgn
