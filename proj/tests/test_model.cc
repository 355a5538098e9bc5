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

#include "sgn/model.h"
#include "sgn/vocabulary.h"
#include "test_util.h"

namespace sgn {
namespace {

std::vector<Matrix*> tensors(ModelParams& p) {
  std::vector<Matrix*> out;
  p.for_each([&](const std::string&, auto& t) {
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Matrix>) out.push_back(&t);
  });
  return out;
}

std::vector<Vector*> vectors(ModelParams& p) {
  std::vector<Vector*> out;
  p.for_each([&](const std::string&, auto& t) {
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Vector>) out.push_back(&t);
  });
  return out;
}

std::vector<std::string> names(const ModelParams& p) {
  std::vector<std::string> out;
  p.for_each([&](const std::string& n, const auto&) { out.push_back(n); });
  return out;
}

// Worst relative error of the analytic loss gradient over every parameter.
double model_gradient_error(Model& model, const Matrix& frames, const Caption& gold,
                            const Matrix* negative) {
  ModelParams grads = model.params().zeros_like();
  model.loss(frames, gold, negative, &grads);
  auto f = [&] { return model.loss(frames, gold, negative, nullptr).total; };
  double worst = 0.0;
  auto pm = tensors(model.mutable_params());
  auto gm = tensors(grads);
  for (std::size_t i = 0; i < pm.size(); ++i) {
    worst = std::max(worst, test::check_gradient(*pm[i], *gm[i], f));
  }
  auto pv = vectors(model.mutable_params());
  auto gv = vectors(grads);
  for (std::size_t i = 0; i < pv.size(); ++i) {
    worst = std::max(worst, test::check_gradient(*pv[i], *gv[i], f));
  }
  return worst;
}

TEST_CASE("parameters are visited in a fixed canonical order") {
  Config c;
  c.phrase_layers = 2;
  Rng rng(1);
  const Model m = Model::initialize(c, AblationFlags::full(), 10, rng);
  const auto n = names(m.params());
  REQUIRE(n.size() == 21);
  CHECK(n[0] == "embedding");
  CHECK(n[1] == "phrase.position");
  CHECK(n[2] == "phrase.layer0.query");
  CHECK(n[5] == "phrase.layer1.query");
  CHECK(n.back() == "output.bias");
  CHECK(m.params().embedding.rows() == 10);
  CHECK(m.params().phrase.position.rows() == c.max_len + 1);
  // Forget-gate bias starts at one, other biases at zero.
  CHECK(m.params().lstm.bias.segment(c.dim_hidden, c.dim_hidden).isOnes());
  CHECK(m.params().lstm.bias.head(c.dim_hidden).isZero());
  CHECK(m.params().output.bias.isZero());
  CHECK(m.params().parameter_count() > 0);
}

TEST_CASE("initialization is deterministic in the seed") {
  Config c;
  Rng a(4), b(4), other(5);
  const Model ma = Model::initialize(c, AblationFlags::full(), 12, a);
  const Model mb = Model::initialize(c, AblationFlags::full(), 12, b);
  const Model mc = Model::initialize(c, AblationFlags::full(), 12, other);
  CHECK(ma.params().squared_norm() == mb.params().squared_norm());
  CHECK(ma.params().embedding == mb.params().embedding);
  CHECK(ma.params().embedding != mc.params().embedding);
}

TEST_CASE("first step sees only SOS; later steps drop it") {
  Model m = test::tiny_model(AblationFlags::full(), 8, 2);
  Rng rng(3);
  const Matrix frames = test::random_matrix(rng, 4, 4);
  DecoderState s = DecoderState::initial(4);
  const StepTrace t1 = m.step(frames, s);
  CHECK(t1.step == 1);
  CHECK(t1.phrase_words == std::vector<TokenId>{Vocabulary::kSos});
  CHECK(t1.previous_word == Vocabulary::kSos);
  CHECK(t1.phrase.attention.rows() == 1);

  s = t1.state;
  s.prefix = {5, 6, 5};
  const StepTrace t4 = m.step(frames, s);
  CHECK(t4.step == 4);
  CHECK(t4.phrase_words == std::vector<TokenId>{5, 6, 5});
  CHECK(t4.previous_word == 5);
  CHECK(t4.phrase.attention.rows() == 3);
  CHECK(t4.targets.cols() == m.config().dim_word + 4);
}

TEST_CASE("ablation modes route the right targets") {
  Rng rng(4);
  const Matrix frames = test::random_matrix(rng, 4, 4);
  DecoderState s = DecoderState::initial(4);
  s.prefix = {4, 5, 6};

  const Model ta = test::tiny_model(AblationFlags::ta_baseline(), 8, 1);
  const StepTrace t = ta.step(frames, s);
  CHECK(t.targets == frames);
  CHECK(t.attend.beta.size() == 4);

  const Model word = test::tiny_model(AblationFlags::parse("word"), 8, 1);
  const StepTrace w = word.step(frames, s);
  CHECK(w.phrase.attention == Matrix::Identity(3, 3));
  CHECK(w.suppression.kept == std::vector<int>{0, 1, 2});
  CHECK(w.phrase.phrases.row(0) == word.params().embedding.row(4));

  const Model sa = test::tiny_model(AblationFlags::parse("sa"), 8, 1);
  CHECK(sa.step(frames, s).suppression.size() == 3);
}

TEST_CASE("per-step probability vectors are normalized") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Model m = test::tiny_model(AblationFlags::full(), 9, 100 + trial);
    const Matrix frames = test::random_matrix(rng, 4, 4, 2.0);
    DecoderState s = DecoderState::initial(4);
    for (int t = 0; t < 4; ++t) {
      const StepTrace tr = m.step(frames, s);
      CHECK((tr.phrase.attention.rowwise().sum().array() - 1).abs().maxCoeff() < 1e-5);
      CHECK((tr.groups.alpha.rowwise().sum().array() - 1).abs().maxCoeff() < 1e-5);
      CHECK(std::abs(tr.attend.beta.sum() - 1) < 1e-5);
      CHECK(std::abs(tr.probs.sum() - 1) < 1e-5);
      CHECK((tr.probs.array() >= 0).all());
      s = tr.state;
      s.prefix.push_back(static_cast<TokenId>(4 + rng.index(5)));
    }
  }
}

TEST_CASE("loss breakdown is consistent") {
  Rng rng(6);
  const Model m = test::tiny_model(AblationFlags::full(), 8, 7);
  const Matrix frames = test::random_matrix(rng, 4, 4);
  const Matrix negative = test::random_matrix(rng, 4, 4);
  const Caption gold{{5, 6}};
  const LossBreakdown l = m.loss(frames, gold, &negative, nullptr);
  CHECK(l.total == combine(l.ce, l.ca, m.config().lambda));
  CHECK(l.n_tokens == 3);
  CHECK(l.ce > 0);
  CHECK(l.ca > 0);
  CHECK(l.lambda == m.config().lambda);
  CHECK(static_cast<int>(l.p_ca_values.size()) == l.n_groups);
  for (double p : l.p_ca_values) {
    CHECK(p > 0);
    CHECK(p <= 1);
  }

  // Teacher forcing: CE equals summed -log p of the gold tokens.
  DecoderState s = DecoderState::initial(4);
  double ce = 0;
  for (TokenId tok : {5, 6, static_cast<int>(Vocabulary::kEos)}) {
    const StepTrace tr = m.step(frames, s);
    ce -= std::log(tr.probs(tok));
    s = tr.state;
    s.prefix.push_back(tok);
  }
  CHECK(l.ce == doctest::Approx(ce).epsilon(1e-13));

  const LossBreakdown no_neg = m.loss(frames, gold, nullptr, nullptr);
  CHECK(no_neg.ca == 0.0);
  CHECK(no_neg.total == no_neg.ce);
}

TEST_CASE("TA baseline with lambda zero trains on cross entropy alone") {
  Rng rng(7);
  const Model m = test::tiny_model(AblationFlags::ta_baseline(), 8, 3);
  const Matrix frames = test::random_matrix(rng, 4, 4);
  const Matrix negative = test::random_matrix(rng, 4, 4);
  const LossBreakdown l = m.loss(frames, Caption{{4, 7}}, &negative, nullptr);
  CHECK(l.ca == 0.0);
  CHECK(l.total == l.ce);
  CHECK(l.n_groups == 0);
}

TEST_CASE("non-finite loss is a numeric error") {
  Rng rng(8);
  const Model m = test::tiny_model(AblationFlags::full(), 8, 3);
  Matrix frames = test::random_matrix(rng, 4, 4);
  frames(1, 1) = std::nan("");
  CHECK_THROWS_AS(m.loss(frames, Caption{{4}}, nullptr, nullptr), NumericError);
}

TEST_CASE("full-model gradients match central differences in every mode") {
  Rng rng(9);
  const Matrix frames = test::random_matrix(rng, 4, 4);
  const Matrix negative = test::random_matrix(rng, 4, 4);
  const Caption gold{{5, 6}};
  for (const char* mode : {"full", "sa", "sa,ps", "sa,ca", "ta", "word", "word,ca"}) {
    CAPTURE(mode);
    Model m = test::tiny_model(AblationFlags::parse(mode), 8, 11);
    CHECK(model_gradient_error(m, frames, gold, &negative) < 1e-4);
  }
}

TEST_CASE("gradients with two phrase layers and without positions") {
  Rng rng(10);
  const Matrix frames = test::random_matrix(rng, 4, 4);
  const Matrix negative = test::random_matrix(rng, 4, 4);
  Config c = test::tiny_model(AblationFlags::full(), 8, 1).config();
  c.phrase_layers = 2;
  c.use_position = false;
  Rng init(3);
  Model m = Model::initialize(c, AblationFlags::full(), 8, init);
  m.mutable_params().for_each([&](const std::string&, auto& t) {
    t = test::random_matrix(init, t.rows(), t.cols(), 0.8);
  });
  CHECK(model_gradient_error(m, frames, Caption{{5, 6, 7}}, &negative) < 1e-4);
}

}  // namespace
}  // namespace sgn
