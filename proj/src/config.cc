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

#include "sgn/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sgn/types.h"

namespace sgn {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("config: bad value for '" + key + "': " + value);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError("config: bad boolean for '" + key + "': " + value);
}

// Binds every config key to a setter and a formatter.
struct Field {
  std::function<void(Config&, const std::string&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

template <typename T>
std::string format_value(T v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
  } else {
    return std::to_string(v);
  }
}

template <typename T>
Field field(T Config::*member) {
  return {[member](Config& c, const std::string& k, const std::string& v) {
            if constexpr (std::is_same_v<T, bool>) {
              c.*member = parse_bool(k, v);
            } else {
              c.*member = parse_number<T>(k, v);
            }
          },
          [member](const Config& c) { return format_value(c.*member); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"n_frames", field(&Config::n_frames)},
      {"dim_appearance", field(&Config::dim_appearance)},
      {"dim_motion", field(&Config::dim_motion)},
      {"dim_word", field(&Config::dim_word)},
      {"dim_hidden", field(&Config::dim_hidden)},
      {"dim_attention", field(&Config::dim_attention)},
      {"tau", field(&Config::tau)},
      {"lambda", field(&Config::lambda)},
      {"beam_size", field(&Config::beam_size)},
      {"max_len", field(&Config::max_len)},
      {"seed", field(&Config::seed)},
      {"phrase_layers", field(&Config::phrase_layers)},
      {"use_position", field(&Config::use_position)},
      {"length_normalization", field(&Config::length_normalization)},
      {"min_count", field(&Config::min_count)},
      {"init_scale", field(&Config::init_scale)},
      {"learning_rate", field(&Config::learning_rate)},
      {"adam_beta1", field(&Config::adam_beta1)},
      {"adam_beta2", field(&Config::adam_beta2)},
      {"adam_epsilon", field(&Config::adam_epsilon)},
      {"batch_size", field(&Config::batch_size)},
      {"epochs", field(&Config::epochs)},
      {"clip_norm", field(&Config::clip_norm)},
      {"val_fraction", field(&Config::val_fraction)},
  };
  return table;
}

}  // namespace

void Config::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw UsageError(std::string("config: ") + what);
  };
  require(n_frames >= 1, "n_frames must be >= 1");
  require(dim_appearance >= 0 && dim_motion >= 0 && dim_video() >= 1,
          "feature dims must be non-negative with a positive sum");
  require(dim_word >= 1 && dim_hidden >= 1, "dim_word and dim_hidden >= 1");
  require(dim_attention >= 0, "dim_attention must be >= 0");
  require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
  require(lambda >= 0.0, "lambda must be >= 0");
  require(beam_size >= 1, "beam_size must be >= 1");
  require(max_len >= 1, "max_len must be >= 1");
  require(phrase_layers >= 1, "phrase_layers must be >= 1");
  require(min_count >= 1, "min_count must be >= 1");
  require(init_scale > 0.0, "init_scale must be > 0");
  require(learning_rate > 0.0, "learning_rate must be > 0");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1 in [0, 1)");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2 in [0, 1)");
  require(adam_epsilon > 0.0, "adam_epsilon must be > 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(epochs >= 0, "epochs must be >= 0");
  require(clip_norm >= 0.0, "clip_norm must be >= 0 (0 disables)");
  require(val_fraction >= 0.0 && val_fraction < 1.0, "val_fraction in [0, 1)");
}

Config parse_config(std::string_view text) {
  std::map<std::string, const Field*> by_name;
  for (const auto& [name, f] : fields()) by_name[name] = &f;

  Config config;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    auto it = by_name.find(key);
    if (it == by_name.end()) throw UsageError("config: unknown key '" + key + "'");
    it->second->set(config, key, value);
  }
  config.validate();
  return config;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const Config& config) {
  std::ostringstream out;
  for (const auto& [name, f] : fields()) {
    out << name << " = " << f.get(config) << "\n";
  }
  return out.str();
}

AblationFlags AblationFlags::parse(std::string_view list) {
  AblationFlags flags = ta_baseline();
  std::string item;
  std::istringstream in{std::string(list)};
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty() || item == "none" || item == "ta") continue;
    if (item == "sa") {
      flags.use_semantic_aligner = true;
    } else if (item == "ps") {
      flags.use_phrase_suppressor = true;
    } else if (item == "ca") {
      flags.use_ca_loss = true;
    } else if (item == "word") {
      flags.group_by_word = true;
      flags.use_semantic_aligner = true;
    } else if (item == "full" || item == "sgn") {
      flags = full();
    } else {
      throw UsageError("unknown ablation component '" + item + "'");
    }
  }
  flags.validate();
  return flags;
}

void AblationFlags::validate() const {
  if (group_by_word && use_phrase_suppressor) {
    throw UsageError("group_by_word requires the phrase suppressor off");
  }
  if (group_by_word && !use_semantic_aligner) {
    throw UsageError("group_by_word requires the semantic aligner");
  }
  if (!use_semantic_aligner && (use_phrase_suppressor || use_ca_loss)) {
    throw UsageError("ps and ca require sa");
  }
}

std::string AblationFlags::label() const {
  if (!use_semantic_aligner) return "TA baseline";
  std::string out = group_by_word ? "SGN (group by word)" : "SA";
  if (use_phrase_suppressor) out += "+PS";
  if (use_ca_loss) out += "+CA";
  if (*this == full()) out += " (full SGN)";
  return out;
}

std::string AblationFlags::to_string() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ",";
    out += name;
  };
  add(use_semantic_aligner && !group_by_word, "sa");
  add(group_by_word, "word");
  add(use_phrase_suppressor, "ps");
  add(use_ca_loss, "ca");
  return out.empty() ? "none" : out;
}

}  // namespace sgn
