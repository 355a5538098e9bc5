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
#include "sgn/semantic_grouping.h"
#include "test_util.h"

namespace sgn {
namespace {

AlignerParams random_aligner(Rng& rng, int d_s, int d_w, int d_v) {
  return {test::random_matrix(rng, d_s, d_w), test::random_matrix(rng, d_s, d_v),
          test::random_vector(rng, d_s), test::random_vector(rng, d_s)};
}

AlignerParams zeros_like(const AlignerParams& p) {
  return {Matrix::Zero(p.phrase_proj.rows(), p.phrase_proj.cols()),
          Matrix::Zero(p.frame_proj.rows(), p.frame_proj.cols()), Vector::Zero(p.bias.size()),
          Vector::Zero(p.score.size())};
}

TEST_CASE("orthogonal word attentions are all kept") {
  const Matrix a = Matrix::Identity(2, 2);
  const SuppressionResult r = suppress(Matrix::Ones(2, 3), a, 0.2);
  CHECK(r.kept == std::vector<int>{0, 1});
  CHECK(r.similarity == Matrix::Identity(2, 2));
}

TEST_CASE("a single phrase always survives") {
  for (double tau : {0.01, 0.5, 0.99}) {
    CHECK(suppress(Matrix::Ones(1, 2), Matrix::Ones(1, 1), tau).kept == std::vector<int>{0});
  }
}

TEST_CASE("three-phrase worked example") {
  Matrix a(3, 3);
  a << 0.6, 0.4, 0.0, 0.5, 0.5, 0.0, 0.1, 0.9, 0.0;
  Matrix p(3, 2);
  p << 1, 2, 3, 4, 5, 6;
  const SuppressionResult r = suppress(p, a, 0.2);
  CHECK(r.similarity(0, 1) == doctest::Approx(0.50));
  CHECK(r.similarity(0, 2) == doctest::Approx(0.42));
  CHECK(r.similarity(1, 2) == doctest::Approx(0.50));
  const Vector sums = r.similarity.rowwise().sum();
  CHECK(sums(0) == doctest::Approx(1.44));
  CHECK(sums(1) == doctest::Approx(1.50));
  CHECK(sums(2) == doctest::Approx(1.74));
  // (1,2): 1.44 is not above 1.50, so p2 goes; (1,3): 1.44 is not above 1.74,
  // so p3 goes; (2,3) is skipped because p2 is gone.
  CHECK(r.kept == std::vector<int>{0});
  CHECK(oracle::suppress(a, 0.2) == r.kept);
  CHECK(r.phrases == p.topRows(1));
  CHECK(r.attention == a.topRows(1));
}

TEST_CASE("equal row sums discard the later phrase") {
  Matrix a(2, 2);
  a << 0.5, 0.5, 0.5, 0.5;
  CHECK(suppress(Matrix::Zero(2, 1), a, 0.2).kept == std::vector<int>{0});
}

TEST_CASE("suppressor agrees with the brute-force oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(7));
    const Matrix a = test::random_stochastic(rng, n, n);
    const double tau = rng.uniform(0.05, 0.6);
    const SuppressionResult r = suppress(test::random_matrix(rng, n, 3), a, tau);
    CHECK(r.kept == oracle::suppress(a, tau));
    CHECK_FALSE(r.kept.empty());
    CHECK(std::is_sorted(r.kept.begin(), r.kept.end()));
    CHECK((r.similarity - a * a.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("re-running on survivors with the restricted similarity discards nothing new") {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(7));
    const Matrix a = test::random_stochastic(rng, n, n);
    const double tau = rng.uniform(0.05, 0.6);
    const auto kept = suppress(Matrix::Zero(n, 1), a, tau).kept;
    // Surviving pairs never exceed tau, so the restricted run keeps all.
    for (std::size_t x = 0; x < kept.size(); ++x) {
      for (std::size_t y = x + 1; y < kept.size(); ++y) {
        CHECK(a.row(kept[x]).dot(a.row(kept[y])) <= tau);
      }
    }
    Matrix sub(static_cast<long>(kept.size()), n);
    for (std::size_t x = 0; x < kept.size(); ++x) sub.row(static_cast<long>(x)) = a.row(kept[x]);
    CHECK(suppress(Matrix::Zero(sub.rows(), 1), sub, tau).size() == static_cast<int>(kept.size()));
  }
}

TEST_CASE("relevance special cases") {
  Rng rng(13);
  AlignerParams p = random_aligner(rng, 5, 3, 4);
  const Matrix phrases = test::random_matrix(rng, 2, 3);
  const Matrix frames = test::random_matrix(rng, 6, 4);

  AlignerParams zero_u = p;
  zero_u.score.setZero();
  CHECK(relevance(phrases, frames, zero_u).cwiseAbs().maxCoeff() == 0.0);

  const Matrix same = frames.row(0).replicate(6, 1);
  const Matrix e = relevance(phrases, same, p);
  for (long i = 0; i < e.rows(); ++i) CHECK((e.row(i).array() - e(i, 0)).abs().maxCoeff() < 1e-14);

  CHECK((relevance(phrases, frames, p) - oracle::relevance(phrases, frames, p))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  AlignerParams broken = p;
  broken.bias(0) = std::nan("");
  CHECK_THROWS_AS(relevance(phrases, frames, broken), NumericError);
  CHECK_THROWS_AS(relevance(Matrix::Zero(2, 4), frames, p), DataError);
}

TEST_CASE("align: uniform and saturated attention") {
  Rng rng(14);
  const Matrix frames = test::random_matrix(rng, 5, 2);
  const Matrix phrases = test::random_matrix(rng, 2, 3);
  AlignerParams p = random_aligner(rng, 4, 3, 2);
  p.score.setZero();
  const SemanticGroupSet flat = align(phrases, frames, p);
  CHECK((flat.alpha.array() - 0.2).abs().maxCoeff() < 1e-15);
  for (long i = 0; i < 2; ++i) {
    CHECK((flat.aligned.row(i) - frames.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(flat.groups.leftCols(3) == phrases);
  CHECK(flat.groups.rightCols(2) == flat.aligned);

  // One frame scores 1000 above the rest.
  AlignerParams spike{Matrix::Zero(1, 3), Matrix::Zero(1, 2), Vector::Zero(1),
                      Vector::Constant(1, 1000.0 / std::tanh(1.0))};
  spike.frame_proj(0, 0) = 1.0;
  Matrix f = Matrix::Zero(5, 2);
  f(3, 0) = 1.0;
  f.col(1) = test::random_vector(rng, 5);
  const SemanticGroupSet peak = align(phrases, f, spike);
  for (long i = 0; i < 2; ++i) {
    CHECK(peak.alpha(i, 3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((peak.aligned.row(i) - f.row(3)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("alpha rows are probability vectors") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const AlignerParams p = random_aligner(rng, 4, 3, 2);
    const SemanticGroupSet g =
        align(test::random_matrix(rng, 1 + static_cast<long>(rng.index(6)), 3, 4.0),
              test::random_matrix(rng, 1 + static_cast<long>(rng.index(30)), 2, 4.0), p);
    CHECK((g.alpha.array() >= 0).all());
    CHECK((g.alpha.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("raising one score raises its weight and lowers the others") {
  Rng rng(16);
  const Matrix scores = test::random_matrix(rng, 1, 6);
  const Matrix base = row_softmax(scores);
  for (long j = 0; j < 6; ++j) {
    Matrix bumped = scores;
    bumped(0, j) += 0.3;
    const Matrix after = row_softmax(bumped);
    for (long k = 0; k < 6; ++k) {
      if (k == j) {
        CHECK(after(0, k) > base(0, k));
      } else {
        CHECK(after(0, k) < base(0, k));
      }
    }
  }
}

TEST_CASE("aligner gradients match central differences") {
  Rng rng(17);
  AlignerParams p = random_aligner(rng, 4, 3, 2);
  Matrix phrases = test::random_matrix(rng, 3, 3);
  Matrix frames = test::random_matrix(rng, 5, 2);
  const Matrix weights = test::random_matrix(rng, 3, 5);
  auto f = [&] { return align(phrases, frames, p).groups.cwiseProduct(weights).sum(); };
  AlignerParams g = zeros_like(p);
  const Matrix d_phrases =
      backward_align(align(phrases, frames, p), phrases, frames, weights, p, g);
  CHECK(test::check_gradient(phrases, d_phrases, f) < 1e-4);
  CHECK(test::check_gradient(p.phrase_proj, g.phrase_proj, f) < 1e-4);
  CHECK(test::check_gradient(p.frame_proj, g.frame_proj, f) < 1e-4);
  CHECK(test::check_gradient(p.bias, g.bias, f) < 1e-4);
  CHECK(test::check_gradient(p.score, g.score, f) < 1e-4);
}

}  // namespace
}  // namespace sgn
