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

#include "sgn/optimizer.h"

#include <cmath>
#include <span>
#include <vector>

namespace sgn {
namespace {

std::vector<std::span<double>> flat(ModelParams& p) {
  std::vector<std::span<double>> out;
  p.for_each([&](const std::string&, auto& t) {
    out.emplace_back(t.data(), static_cast<std::size_t>(t.size()));
  });
  return out;
}

std::vector<std::span<const double>> flat(const ModelParams& p) {
  std::vector<std::span<const double>> out;
  p.for_each([&](const std::string&, const auto& t) {
    out.emplace_back(t.data(), static_cast<std::size_t>(t.size()));
  });
  return out;
}

}  // namespace

Adam::Adam(const Config& config, const ModelParams& like)
    : lr_(config.learning_rate),
      beta1_(config.adam_beta1),
      beta2_(config.adam_beta2),
      epsilon_(config.adam_epsilon),
      m_(like.zeros_like()),
      v_(like.zeros_like()) {}

void Adam::update(ModelParams& params, const ModelParams& grads) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto p = flat(params);
  auto g = flat(grads);
  auto m = flat(m_);
  auto v = flat(v_);
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t i = 0; i < p[k].size(); ++i) {
      m[k][i] = beta1_ * m[k][i] + (1.0 - beta1_) * g[k][i];
      v[k][i] = beta2_ * v[k][i] + (1.0 - beta2_) * g[k][i] * g[k][i];
      p[k][i] -= lr_ * (m[k][i] / c1) / (std::sqrt(v[k][i] / c2) + epsilon_);
    }
  }
}

void Adam::restore(long steps, ModelParams m, ModelParams v) {
  steps_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

double clip_global_norm(ModelParams& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    grads.for_each([&](const std::string&, auto& t) { t *= scale; });
  }
  return norm;
}

}  // namespace sgn
