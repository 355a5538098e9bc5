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

#include <doctest.h>

#include <cmath>

#include "oracles.h"
#include "sgn/decoder.h"
#include "test_util.h"

namespace sgn {
namespace {

GroupAttentionParams random_attention(Rng& rng, int d_a, int d_h, int d_t) {
  return {test::random_matrix(rng, d_a, d_h), test::random_matrix(rng, d_a, d_t),
          test::random_vector(rng, d_a), test::random_vector(rng, d_a)};
}

LstmParams random_lstm(Rng& rng, int d_h, int d_in) {
  return {test::random_matrix(rng, 4 * d_h, d_in), test::random_matrix(rng, 4 * d_h, d_h),
          test::random_vector(rng, 4 * d_h)};
}

TEST_CASE("a single group takes all the attention") {
  Rng rng(1);
  const auto p = random_attention(rng, 3, 2, 4);
  const Matrix s = test::random_matrix(rng, 1, 4);
  const AttendResult r = attend_groups(test::random_vector(rng, 2), s, p);
  CHECK(r.beta.size() == 1);
  CHECK(r.beta(0) == 1.0);
  CHECK((r.x - s.row(0).transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("identical groups share attention evenly") {
  Rng rng(2);
  const auto p = random_attention(rng, 3, 2, 4);
  const Matrix s = test::random_matrix(rng, 1, 4).replicate(5, 1);
  const AttendResult r = attend_groups(test::random_vector(rng, 2), s, p);
  CHECK((r.beta.array() - 0.2).abs().maxCoeff() < 1e-12);
  CHECK((r.x - s.row(0).transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("attention matches a weighted-sum loop") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_attention(rng, 4, 3, 5);
    const Vector h = test::random_vector(rng, 3);
    const Matrix s = test::random_matrix(rng, 1 + static_cast<long>(rng.index(6)), 5);
    const AttendResult r = attend_groups(h, s, p);
    const oracle::Attend o = oracle::attend(h, s, p);
    for (long i = 0; i < s.rows(); ++i) CHECK(r.beta(i) == doctest::Approx(o.beta[i]).epsilon(1e-12));
    for (long k = 0; k < 5; ++k) CHECK(r.x(k) == doctest::Approx(o.x[k]).epsilon(1e-12));
    CHECK(std::abs(r.beta.sum() - 1.0) < 1e-5);
  }
  CHECK_THROWS_AS(attend_groups(Vector::Zero(3), Matrix(0, 5), random_attention(rng, 4, 3, 5)),
                  DataError);
}

TEST_CASE("attention gradients match central differences") {
  Rng rng(4);
  auto p = random_attention(rng, 4, 3, 5);
  Vector h = test::random_vector(rng, 3);
  Matrix s = test::random_matrix(rng, 3, 5);
  const Vector w = test::random_vector(rng, 5);
  auto f = [&] { return attend_groups(h, s, p).x.dot(w); };
  GroupAttentionParams g{Matrix::Zero(4, 3), Matrix::Zero(4, 5), Vector::Zero(4), Vector::Zero(4)};
  Vector d_h;
  Matrix d_s;
  backward_attend(attend_groups(h, s, p), h, s, w, p, g, d_h, d_s);
  CHECK(test::check_gradient(h, d_h, f) < 1e-4);
  CHECK(test::check_gradient(s, d_s, f) < 1e-4);
  CHECK(test::check_gradient(p.state_proj, g.state_proj, f) < 1e-4);
  CHECK(test::check_gradient(p.target_proj, g.target_proj, f) < 1e-4);
  CHECK(test::check_gradient(p.bias, g.bias, f) < 1e-4);
  CHECK(test::check_gradient(p.score, g.score, f) < 1e-4);
}

TEST_CASE("LSTM step matches a hand-stepped cell (d_h=2, |V|=3)") {
  LstmParams p;
  p.input_weights.resize(8, 3);
  p.hidden_weights.resize(8, 2);
  p.bias.resize(8);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 3; ++c) p.input_weights(r, c) = 0.1 * (r + 1) - 0.07 * c;
    for (int c = 0; c < 2; ++c) p.hidden_weights(r, c) = 0.05 * (c + 1) - 0.03 * r;
    p.bias(r) = 0.02 * r - 0.1;
  }
  DecoderState s{Vector(2), Vector(2), {}};
  s.h << 0.3, -0.2;
  s.c << -0.1, 0.4;
  Vector input(3);
  input << 0.5, -1.0, 0.25;
  const DecoderState next = lstm_step(s, input, p);
  const oracle::Cell cell = oracle::lstm({0.5, -1.0, 0.25}, {0.3, -0.2}, {-0.1, 0.4}, p);
  for (int u = 0; u < 2; ++u) {
    CHECK(next.h(u) == doctest::Approx(cell.h[u]).epsilon(1e-14));
    CHECK(next.c(u) == doctest::Approx(cell.c[u]).epsilon(1e-14));
  }

  OutputParams out{Matrix(3, 2), Vector(3)};
  out.weights << 1.0, -1.0, 0.5, 0.5, -2.0, 0.1;
  out.bias << 0.0, 0.1, -0.1;
  const Vector logits = output_logits(next.h, out);
  std::vector<double> raw;
  for (int v = 0; v < 3; ++v) {
    raw.push_back(out.weights(v, 0) * cell.h[0] + out.weights(v, 1) * cell.h[1] + out.bias(v));
  }
  const auto probs = oracle::softmax(raw);
  const Vector got = softmax(logits);
  for (int v = 0; v < 3; ++v) CHECK(got(v) == doctest::Approx(probs[v]).epsilon(1e-14));
}

TEST_CASE("zero weights give a uniform next-word distribution") {
  OutputParams out{Matrix::Zero(7, 3), Vector::Zero(7)};
  const Vector probs = softmax(output_logits(Vector::Constant(3, 0.4), out));
  CHECK((probs.array() - 1.0 / 7.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("LSTM gradients match central differences") {
  Rng rng(5);
  LstmParams p = random_lstm(rng, 3, 4);
  Vector input = test::random_vector(rng, 4);
  DecoderState s{test::random_vector(rng, 3), test::random_vector(rng, 3), {}};
  const Vector wh = test::random_vector(rng, 3);
  const Vector wc = test::random_vector(rng, 3);
  auto f = [&] {
    const DecoderState n = lstm_step(s, input, p);
    return n.h.dot(wh) + n.c.dot(wc);
  };
  LstmCache cache;
  lstm_step(s, input, p, &cache);
  LstmParams g{Matrix::Zero(12, 4), Matrix::Zero(12, 3), Vector::Zero(12)};
  Vector d_h = wh, d_c = wc;
  const Vector d_in = backward_lstm(cache, p, g, d_h, d_c);
  CHECK(test::check_gradient(input, d_in, f) < 1e-4);
  CHECK(test::check_gradient(s.h, d_h, f) < 1e-4);
  CHECK(test::check_gradient(s.c, d_c, f) < 1e-4);
  CHECK(test::check_gradient(p.input_weights, g.input_weights, f) < 1e-4);
  CHECK(test::check_gradient(p.hidden_weights, g.hidden_weights, f) < 1e-4);
  CHECK(test::check_gradient(p.bias, g.bias, f) < 1e-4);
}

TEST_CASE("decoder state tracks the step index") {
  DecoderState s = DecoderState::initial(3);
  CHECK(s.step() == 1);
  CHECK(s.h.isZero());
  s.prefix = {5, 6};
  CHECK(s.step() == 3);
}

}  // namespace
}  // namespace sgn
