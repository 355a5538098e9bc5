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

#ifndef SGN_BENCH_H_
#define SGN_BENCH_H_

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "sgn/config.h"

namespace sgn {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;

  double t_stat() const { return slope_stderr > 0 ? slope / slope_stderr : 0.0; }
};

// Ordinary least squares y = intercept + slope * x.
LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

struct BenchSeries {
  std::vector<double> step;     // t = 1..max_len
  std::vector<double> seconds;  // median per-step latency at t
  LinearFit fit;
  double mean_seconds = 0.0;
};

struct BenchReport {
  BenchSeries sgn;
  BenchSeries ta;
  double ta_over_sgn_speed = 0.0;  // videos/s of TA divided by SGN's
  nlohmann::json to_json() const;
};

// Times each decoding step of randomly initialized SGN and TA models,
// decoding max_len steps regardless of EOS, `repeats` times per mode.
BenchReport run_bench(const Config& config, int vocab_size, int max_len,
                      int repeats, std::uint64_t seed);

}  // namespace sgn

#endif  // SGN_BENCH_H_
