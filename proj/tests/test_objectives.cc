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
#include <limits>

#include "oracles.h"
#include "sgn/objectives.h"
#include "test_util.h"

namespace sgn {
namespace {

TEST_CASE("cross entropy special cases") {
  CHECK(cross_entropy({Vector::Constant(10, 0.1)}, {3}) == doctest::Approx(std::log(10.0)));
  CHECK(cross_entropy({Vector::Constant(10, 0.1)}, {3}) == doctest::Approx(2.302585).epsilon(1e-6));
  Vector one_hot = Vector::Zero(5);
  one_hot(2) = 1.0;
  CHECK(cross_entropy({one_hot, one_hot}, {2, 2}) == 0.0);
  CHECK_THROWS_AS(cross_entropy({one_hot}, {2, 2}), DataError);
}

TEST_CASE("cross entropy sums per-token negative log probabilities") {
  Rng rng(1);
  std::vector<Vector> probs;
  std::vector<TokenId> targets;
  double expected = 0.0;
  for (int t = 0; t < 3; ++t) {
    probs.push_back(softmax(test::random_vector(rng, 6, 2.0)));
    targets.push_back(static_cast<TokenId>(rng.index(6)));
    expected += -std::log(probs.back()(targets.back()));
  }
  CHECK(cross_entropy(probs, targets) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("zero probability at a gold token is clamped and counted") {
  Vector p = Vector::Zero(3);
  p(0) = 1.0;
  int clamped = 0;
  CHECK(cross_entropy({p, p}, {1, 0}, &clamped) == doctest::Approx(-std::log(1e-12)));
  CHECK(clamped == 1);
}

TEST_CASE("identical positive and negative frames give ln 2 per group") {
  Rng rng(2);
  const AlignerParams p{test::random_matrix(rng, 4, 3), test::random_matrix(rng, 4, 2),
                        test::random_vector(rng, 4), test::random_vector(rng, 4)};
  VideoFeatures v;
  v.frames = test::random_matrix(rng, 5, 2);
  const ContrastiveResult r = contrastive_attention(test::random_matrix(rng, 3, 3), v, v, p);
  REQUIRE(r.p_ca.size() == 3);
  for (double q : r.p_ca) CHECK(std::abs(q - 0.5) < 1e-12);
  CHECK(std::abs(r.loss / 3.0 - std::log(2.0)) < 1e-6);
}

TEST_CASE("saturated negatives drive the loss to zero") {
  Rng rng(3);
  const Matrix pos = test::random_matrix(rng, 2, 4);
  const ContrastiveResult r = contrastive_from_scores(pos, Matrix::Constant(2, 4, -1e6));
  CHECK(r.loss < 1e-6);
  for (double q : r.p_ca) CHECK(q == doctest::Approx(1.0));

  const Matrix masked = Matrix::Constant(2, 4, -std::numeric_limits<double>::infinity());
  const ContrastiveResult m = contrastive_from_scores(pos, masked);
  CHECK(m.loss == 0.0);
  CHECK(m.d_pos_scores.cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.d_neg_scores.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("p_ca matches a 2N-way softmax loop") {
  Rng rng(4);
  const Matrix pos = test::random_matrix(rng, 2, 3, 2.0);
  const Matrix neg = test::random_matrix(rng, 2, 3, 2.0);
  const ContrastiveResult r = contrastive_from_scores(pos, neg);
  double loss = 0.0;
  for (long i = 0; i < 2; ++i) {
    std::vector<double> all;
    for (long j = 0; j < 3; ++j) all.push_back(pos(i, j));
    for (long j = 0; j < 3; ++j) all.push_back(neg(i, j));
    const auto q = oracle::softmax(all);
    const double p = q[0] + q[1] + q[2];
    CHECK(r.p_ca[i] == doctest::Approx(p).epsilon(1e-13));
    CHECK(r.p_ca[i] > 0.0);
    CHECK(r.p_ca[i] <= 1.0);
    loss -= std::log(p);
  }
  CHECK(r.loss == doctest::Approx(loss).epsilon(1e-13));
}

TEST_CASE("alignment weights agree with the positive half when negatives are masked") {
  Rng rng(5);
  const Matrix pos = test::random_matrix(rng, 2, 4, 2.0);
  const Matrix alpha = row_softmax(pos);
  for (long i = 0; i < 2; ++i) {
    std::vector<double> all;
    for (long j = 0; j < 4; ++j) all.push_back(pos(i, j));
    for (long j = 0; j < 4; ++j) all.push_back(-std::numeric_limits<double>::infinity());
    const auto q = oracle::softmax(all);
    for (long j = 0; j < 4; ++j) CHECK(q[j] == doctest::Approx(alpha(i, j)).epsilon(1e-14));
  }
}

TEST_CASE("CA loss falls with positive scores and rises with negative scores") {
  Rng rng(6);
  const Matrix pos = test::random_matrix(rng, 2, 3);
  const Matrix neg = test::random_matrix(rng, 2, 3);
  const double base = contrastive_from_scores(pos, neg).loss;
  for (long i = 0; i < 2; ++i) {
    for (long j = 0; j < 3; ++j) {
      Matrix p2 = pos, n2 = neg;
      p2(i, j) += 1e-3;
      n2(i, j) += 1e-3;
      CHECK(contrastive_from_scores(p2, neg).loss < base);
      CHECK(contrastive_from_scores(pos, n2).loss > base);
    }
  }
}

TEST_CASE("CA score gradients match central differences") {
  Rng rng(7);
  Matrix pos = test::random_matrix(rng, 3, 4, 2.0);
  Matrix neg = test::random_matrix(rng, 3, 4, 2.0);
  const ContrastiveResult r = contrastive_from_scores(pos, neg);
  auto f = [&] { return contrastive_from_scores(pos, neg).loss; };
  CHECK(test::check_gradient(pos, r.d_pos_scores, f) < 1e-4);
  CHECK(test::check_gradient(neg, r.d_neg_scores, f) < 1e-4);
}

TEST_CASE("vanishing p_ca is clamped") {
  const ContrastiveResult r =
      contrastive_from_scores(Matrix::Constant(1, 2, -1e6), Matrix::Constant(1, 2, 0.0));
  CHECK(r.clamped == 1);
  CHECK(r.loss == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("combine") {
  CHECK(combine(1.0, 2.0, 0.0) == 1.0);
  CHECK(combine(1.0, 2.0, 0.16) == doctest::Approx(1.32).epsilon(1e-15));
  CHECK(combine(3.5, 0.0, 1.0) == 3.5);
}

}  // namespace
}  // namespace sgn
