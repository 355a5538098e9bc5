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

#include "sgn/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "sgn/decoding.h"
#include "sgn/model.h"
#include "sgn/vocabulary.h"

namespace sgn {
namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

BenchSeries time_mode(const Config& config, const AblationFlags& flags,
                      int vocab_size, int max_len, int repeats, std::uint64_t seed) {
  Rng rng(seed);
  const Model model = Model::initialize(config, flags, vocab_size, rng);
  Matrix frames(config.n_frames, config.dim_video());
  for (Eigen::Index i = 0; i < frames.size(); ++i) frames.data()[i] = rng.normal(0, 1);

  std::vector<std::vector<double>> samples(static_cast<std::size_t>(max_len));
  for (int rep = 0; rep < repeats; ++rep) {
    DecoderState state = DecoderState::initial(config.dim_hidden);
    for (int t = 0; t < max_len; ++t) {
      const auto start = std::chrono::steady_clock::now();
      const StepTrace trace = model.step(frames, state);
      const auto stop = std::chrono::steady_clock::now();
      samples[t].push_back(std::chrono::duration<double>(stop - start).count());
      // Keep decoding past EOS so every run reaches max_len steps.
      Vector lp = next_log_probs(trace);
      lp(Vocabulary::kEos) = -std::numeric_limits<double>::infinity();
      Eigen::Index best = 0;
      lp.maxCoeff(&best);
      state = trace.state;
      state.prefix.push_back(static_cast<TokenId>(best));
    }
  }

  BenchSeries s;
  for (int t = 0; t < max_len; ++t) {
    s.step.push_back(t + 1);
    s.seconds.push_back(median(samples[t]));
  }
  s.fit = fit_line(s.step, s.seconds);
  double sum = 0.0;
  for (double x : s.seconds) sum += x;
  s.mean_seconds = sum / static_cast<double>(s.seconds.size());
  return s;
}

nlohmann::json series_json(const BenchSeries& s) {
  return {{"step", s.step},
          {"median_seconds", s.seconds},
          {"mean_seconds", s.mean_seconds},
          {"slope", s.fit.slope},
          {"intercept", s.fit.intercept},
          {"slope_stderr", s.fit.slope_stderr},
          {"slope_t", s.fit.t_stat()},
          {"r2", s.fit.r2}};
}

}  // namespace

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  LinearFit f;
  if (xs.size() < 3 || xs.size() != ys.size()) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (f.intercept + f.slope * xs[i]);
    sse += e * e;
  }
  f.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  f.r2 = syy > 0 ? 1.0 - sse / syy : 0.0;
  return f;
}

nlohmann::json BenchReport::to_json() const {
  return {{"sgn", series_json(sgn)},
          {"ta", series_json(ta)},
          {"ta_over_sgn_speed", ta_over_sgn_speed}};
}

BenchReport run_bench(const Config& config, int vocab_size, int max_len,
                      int repeats, std::uint64_t seed) {
  BenchReport r;
  r.sgn = time_mode(config, AblationFlags::full(), vocab_size, max_len, repeats, seed);
  r.ta = time_mode(config, AblationFlags::ta_baseline(), vocab_size, max_len, repeats, seed);
  r.ta_over_sgn_speed = r.sgn.mean_seconds / r.ta.mean_seconds;
  return r;
}

}  // namespace sgn
