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

#include "sgn/trainer.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "sgn/optimizer.h"

namespace sgn {
namespace {

using nlohmann::json;

constexpr const char* kCheckpointMagic = "sgn-checkpoint";

json tensors_to_json(const ModelParams& p) {
  json out = json::object();
  p.for_each([&](const std::string& name, const auto& t) {
    std::vector<double> data(t.data(), t.data() + t.size());
    out[name] = {{"rows", t.rows()}, {"cols", t.cols()}, {"data", std::move(data)}};
  });
  return out;
}

void tensors_from_json(const json& j, ModelParams& p) {
  p.for_each([&](const std::string& name, auto& t) {
    if (!j.contains(name)) throw DataError("checkpoint: missing tensor " + name);
    const auto& e = j.at(name);
    const auto data = e.at("data").get<std::vector<double>>();
    if (e.at("rows").get<Eigen::Index>() != t.rows() ||
        e.at("cols").get<Eigen::Index>() != t.cols() ||
        static_cast<Eigen::Index>(data.size()) != t.size()) {
      throw DataError("checkpoint: shape mismatch for " + name);
    }
    std::copy(data.begin(), data.end(), t.data());
  });
}

// Parameter shapes implied by a configuration, values irrelevant.
ModelParams skeleton(const Config& config, const AblationFlags& flags,
                     int vocab_size) {
  Rng rng(0);
  return Model::initialize(config, flags, vocab_size, rng).params();
}

struct Item {
  std::size_t example;
  std::size_t caption;
};

void append_line(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::app);
  out << j.dump() << '\n';
}

}  // namespace

Matrix embed_init(const Vocabulary& vocab, int dim_word, Rng& rng,
                  const std::optional<std::filesystem::path>& pretrained) {
  Matrix table(vocab.size(), dim_word);
  for (Eigen::Index c = 0; c < table.cols(); ++c) {
    for (Eigen::Index r = 0; r < table.rows(); ++r) table(r, c) = rng.uniform(-0.1, 0.1);
  }
  if (!pretrained) return table;

  std::ifstream in(*pretrained);
  if (!in) throw DataError("cannot open embedding file " + pretrained->string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;
    std::vector<double> values;
    double v;
    while (ls >> v) values.push_back(v);
    if (static_cast<int>(values.size()) != dim_word) {
      throw DataError(pretrained->string() + ":" + std::to_string(line_no) +
                      ": expected " + std::to_string(dim_word) + " values, got " +
                      std::to_string(values.size()));
    }
    if (!vocab.contains(token)) continue;
    const TokenId id = vocab.id(token);
    for (int d = 0; d < dim_word; ++d) table(id, d) = values[d];
  }
  if (!table.allFinite()) throw DataError("embedding file holds non-finite values");
  return table;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  json j;
  j["format_version"] = Checkpoint::kFormatVersion;
  j["config"] = format_config(ckpt.config);
  j["flags"] = ckpt.flags.to_string();
  j["vocab_size"] = ckpt.vocab_size;
  j["vocab_hash"] = ckpt.vocab_hash;
  j["epoch"] = ckpt.epoch;
  j["rng_state"] = ckpt.rng_state;
  j["best_val_ce"] = ckpt.best_val_ce;
  j["params"] = tensors_to_json(ckpt.params);
  j["optimizer"] = {{"steps", ckpt.optimizer_steps},
                    {"m", tensors_to_json(ckpt.adam_m)},
                    {"v", tensors_to_json(ckpt.adam_v)}};
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out << kCheckpointMagic << ' ' << Checkpoint::kFormatVersion << '\n'
        << j.dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kCheckpointMagic) {
    throw DataError(path.string() + ": not a checkpoint");
  }
  if (version != Checkpoint::kFormatVersion) {
    throw DataError(path.string() + ": unsupported checkpoint version " +
                    std::to_string(version));
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": corrupt checkpoint: " + e.what());
  }
  Checkpoint c;
  try {
    c.config = parse_config(j.at("config").get<std::string>());
    c.flags = AblationFlags::parse(j.at("flags").get<std::string>());
    c.vocab_size = j.at("vocab_size").get<int>();
    c.vocab_hash = j.at("vocab_hash").get<std::uint64_t>();
    c.epoch = j.at("epoch").get<int>();
    c.rng_state = j.at("rng_state").get<std::string>();
    c.best_val_ce = j.at("best_val_ce").get<double>();
    c.params = skeleton(c.config, c.flags, c.vocab_size);
    tensors_from_json(j.at("params"), c.params);
    c.optimizer_steps = j.at("optimizer").at("steps").get<long>();
    c.adam_m = c.params.zeros_like();
    c.adam_v = c.params.zeros_like();
    tensors_from_json(j.at("optimizer").at("m"), c.adam_m);
    tensors_from_json(j.at("optimizer").at("v"), c.adam_v);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": corrupt checkpoint: " + e.what());
  }
  return c;
}

Model model_from(const Checkpoint& ckpt) {
  return Model(ckpt.config, ckpt.flags, ckpt.vocab_size, ckpt.params);
}

double mean_token_ce(const Model& model, const std::vector<Example>& set) {
  double ce = 0.0;
  long tokens = 0;
  for (const auto& ex : set) {
    for (const auto& cap : ex.captions) {
      const auto lb = model.loss(ex.video.frames, cap, nullptr, nullptr);
      ce += lb.ce;
      tokens += lb.n_tokens;
    }
  }
  return tokens ? ce / static_cast<double>(tokens) : 0.0;
}

std::pair<std::vector<Example>, std::vector<Example>> split_corpus(
    const std::vector<Example>& corpus, double val_fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed ^ 0x5eed5eed1177ULL);
  rng.shuffle(idx);
  std::size_t n_val = static_cast<std::size_t>(val_fraction * static_cast<double>(corpus.size()));
  if (val_fraction > 0.0 && n_val == 0 && corpus.size() >= 2) n_val = 1;
  std::vector<bool> is_val(corpus.size(), false);
  for (std::size_t i = 0; i < n_val; ++i) is_val[idx[i]] = true;
  std::pair<std::vector<Example>, std::vector<Example>> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (is_val[i] ? out.second : out.first).push_back(corpus[i]);
  }
  return out;
}

TrainResult train(const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const Vocabulary& vocab,
                  const Config& config, const AblationFlags& flags,
                  const TrainOptions& options) {
  config.validate();
  flags.validate();
  if (train_set.empty()) throw DataError("train: empty training set");
  for (const auto& ex : train_set) {
    ex.video.validate(config.n_frames, config.dim_appearance, config.dim_motion);
  }

  Rng rng(config.seed);
  std::optional<Model> model;
  Adam* adam_ptr = nullptr;
  int start_epoch = 1;
  double best_val = std::numeric_limits<double>::infinity();
  if (options.resume) {
    const Checkpoint& r = *options.resume;
    if (r.vocab_hash != vocab.hash() || r.vocab_size != vocab.size()) {
      throw DataError("resume: checkpoint vocabulary does not match");
    }
    if (!(r.flags == flags)) throw UsageError("resume: ablation flags differ");
    model.emplace(config, flags, vocab.size(), r.params);
    rng.set_state(r.rng_state);
    start_epoch = r.epoch + 1;
    best_val = r.best_val_ce;
  } else {
    Model init = Model::initialize(config, flags, vocab.size(), rng);
    init.mutable_params().embedding =
        embed_init(vocab, config.dim_word, rng, options.pretrained_embeddings);
    model.emplace(std::move(init));
  }
  Adam adam(config, model->params());
  adam_ptr = &adam;
  if (options.resume) {
    adam.restore(options.resume->optimizer_steps, options.resume->adam_m,
                 options.resume->adam_v);
  }

  std::filesystem::path metrics_path;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    save_vocabulary(vocab, *options.out_dir / "vocab.txt");
    std::ofstream(*options.out_dir / "config.txt") << format_config(config);
    metrics_path = *options.out_dir / "metrics.jsonl";
    if (!options.resume) std::ofstream(metrics_path, std::ios::trunc);
  }

  std::vector<Item> canonical;
  for (std::size_t e = 0; e < train_set.size(); ++e) {
    for (std::size_t c = 0; c < train_set[e].captions.size(); ++c) {
      canonical.push_back({e, c});
    }
  }

  auto snapshot = [&](int epoch) {
    Checkpoint c;
    c.config = config;
    c.flags = flags;
    c.vocab_size = vocab.size();
    c.vocab_hash = vocab.hash();
    c.params = model->params();
    c.optimizer_steps = adam_ptr->steps();
    c.adam_m = adam_ptr->first_moment();
    c.adam_v = adam_ptr->second_moment();
    c.epoch = epoch;
    c.rng_state = rng.state();
    c.best_val_ce = best_val;
    return c;
  };

  TrainResult result;
  if (options.resume) result.best = *options.resume;
  result.last = snapshot(start_epoch - 1);
  if (!options.resume) result.best = result.last;

  long global_step = adam.steps();
  for (int epoch = start_epoch; epoch <= config.epochs; ++epoch) {
    std::vector<Item> order = canonical;
    rng.shuffle(order);

    EpochMetrics em;
    em.epoch = epoch;
    double sum_total = 0.0, sum_ce = 0.0, sum_ca = 0.0, sum_norm = 0.0;
    long n_tokens = 0, n_groups = 0, n_batches = 0;

    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      ModelParams grads = model->params().zeros_like();
      LossBreakdown batch;
      batch.lambda = config.lambda;
      for (std::size_t k = start; k < end; ++k) {
        const Example& ex = train_set[order[k].example];
        const Matrix* negative = nullptr;
        if (flags.use_ca_loss) {
          try {
            negative = &train_set[sample_negative(train_set, ex, vocab, rng)].video.frames;
          } catch (const DataError&) {
            ++em.items_without_negative;
          }
        }
        const LossBreakdown lb = model->loss(
            ex.video.frames, ex.captions[order[k].caption], negative, &grads);
        batch.ce += lb.ce;
        batch.ca += lb.ca;
        batch.n_tokens += lb.n_tokens;
        batch.n_groups += lb.n_groups;
        batch.clamped += lb.clamped;
        batch.p_ca_values.insert(batch.p_ca_values.end(), lb.p_ca_values.begin(),
                                 lb.p_ca_values.end());
      }
      batch.total = combine(batch.ce, batch.ca, batch.lambda);
      const double inv = 1.0 / static_cast<double>(end - start);
      grads.for_each([&](const std::string&, auto& t) { t *= inv; });
      const double norm = clip_global_norm(grads, config.clip_norm);
      if (!std::isfinite(norm)) throw NumericError("non-finite gradient");
      adam.update(model->mutable_params(), grads);
      ++global_step;

      result.batch_losses.push_back(batch.total * inv);
      sum_total += batch.total;
      sum_ce += batch.ce;
      sum_ca += batch.ca;
      sum_norm += norm;
      n_tokens += batch.n_tokens;
      n_groups += batch.n_groups;
      ++n_batches;
      if (!metrics_path.empty()) {
        append_line(metrics_path,
                    {{"type", "step"}, {"epoch", epoch}, {"step", global_step},
                     {"total", batch.total}, {"ce", batch.ce}, {"ca", batch.ca},
                     {"lambda", batch.lambda}, {"n_tokens", batch.n_tokens},
                     {"n_groups", batch.n_groups}, {"clamped", batch.clamped},
                     {"grad_norm", norm}, {"p_ca_values", batch.p_ca_values}});
      }
    }

    em.train_loss = sum_total / static_cast<double>(order.size());
    em.train_ce = n_tokens ? sum_ce / static_cast<double>(n_tokens) : 0.0;
    em.train_ca = n_groups ? sum_ca / static_cast<double>(n_groups) : 0.0;
    em.grad_norm = n_batches ? sum_norm / static_cast<double>(n_batches) : 0.0;
    em.val_ce = val_set.empty() ? mean_token_ce(*model, train_set)
                                : mean_token_ce(*model, val_set);
    result.history.push_back(em);

    const bool improved = em.val_ce < best_val;
    if (improved) best_val = em.val_ce;
    result.last = snapshot(epoch);
    if (improved) result.best = result.last;
    if (options.out_dir) {
      save_checkpoint(*options.out_dir / "last.ckpt", result.last);
      if (improved) save_checkpoint(*options.out_dir / "best.ckpt", result.best);
      append_line(metrics_path,
                  {{"type", "epoch"}, {"epoch", epoch}, {"train_loss", em.train_loss},
                   {"train_ce", em.train_ce}, {"train_ca", em.train_ca},
                   {"val_ce", em.val_ce}, {"grad_norm", em.grad_norm},
                   {"items_without_negative", em.items_without_negative}});
    }
    if (options.on_epoch) options.on_epoch(em);
    if (options.stop_below_ce > 0.0 && em.train_ce < options.stop_below_ce) break;
  }
  return result;
}

}  // namespace sgn
