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

#ifndef SGN_TESTS_TEST_UTIL_H_
#define SGN_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>

#include <unistd.h>

#include "sgn/config.h"
#include "sgn/model.h"
#include "sgn/rng.h"
#include "sgn/types.h"

namespace sgn::test {

inline Matrix random_matrix(Rng& rng, long rows, long cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
  }
  return m;
}

inline Vector random_vector(Rng& rng, long n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale).col(0);
}

inline Matrix random_stochastic(Rng& rng, long rows, long cols) {
  return row_softmax(random_matrix(rng, rows, cols, 3.0));
}

// Relative error with an absolute floor, so entries whose true gradient is
// essentially zero are judged on absolute error.
inline double rel_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Central difference of f with respect to every entry of m; returns the worst
// relative error against the analytic gradient.
template <typename Tensor>
double check_gradient(Tensor& m, const Tensor& analytic, const std::function<double()>& f,
                      double h = 1e-5) {
  double worst = 0.0;
  for (long i = 0; i < m.size(); ++i) {
    const double saved = m.data()[i];
    m.data()[i] = saved + h;
    const double up = f();
    m.data()[i] = saved - h;
    const double down = f();
    m.data()[i] = saved;
    worst = std::max(worst, rel_error(analytic.data()[i], (up - down) / (2 * h)));
  }
  return worst;
}

// A small model with random (not tiny) parameters so attention is not flat.
inline Model tiny_model(const AblationFlags& flags, int vocab_size, std::uint64_t seed,
                        int dim = 4, int n_frames = 4, int dim_a = 2, int dim_m = 2) {
  Config c;
  c.n_frames = n_frames;
  c.dim_appearance = dim_a;
  c.dim_motion = dim_m;
  c.dim_word = dim;
  c.dim_hidden = dim;
  c.max_len = 6;
  c.init_scale = 0.5;
  Rng rng(seed);
  Model m = Model::initialize(c, flags, vocab_size, rng);
  m.mutable_params().for_each([&](const std::string&, auto& t) {
    t = random_matrix(rng, t.rows(), t.cols(), 0.8);
  });
  return m;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("sgn_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace sgn::test

#endif  // SGN_TESTS_TEST_UTIL_H_
