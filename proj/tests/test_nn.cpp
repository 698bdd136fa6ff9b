#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "itema2c/checkpoint.hpp"
#include "itema2c/encoder.hpp"
#include "itema2c/grad_check.hpp"
#include "itema2c/nn.hpp"

using namespace itema2c;
using namespace itema2c::nn;

namespace {

Mlp make_mlp(Index in, std::vector<Index> hidden, Index out, Activation act = Activation::tanh) {
  NetworkSpec spec;
  spec.input = in;
  spec.hidden = std::move(hidden);
  spec.output = out;
  spec.activation = act;
  spec.init_scale = 0.5;
  return Mlp("m", spec);
}

Matrix random_matrix(Index r, Index c, Rng& rng) {
  Matrix m(r, c);
  init_uniform(m, 1.0, rng);
  return m;
}

}  // namespace

TEST(ParameterStore, RejectsDuplicatesAndEmptyShapes) {
  ParameterStore s;
  s.add("a", 2, 3);
  EXPECT_THROW(s.add("a", 1, 1), std::invalid_argument);
  EXPECT_THROW(s.add("b", 0, 1), std::invalid_argument);
  EXPECT_EQ(s.num_scalars(), 6u);
  EXPECT_TRUE(s.value("a").isZero());
}

TEST(Mlp, ZeroWeightsOutputBias) {
  auto mlp = make_mlp(3, {4}, 2);
  ParameterStore s;
  Rng rng(1);
  mlp.declare(s, rng);
  for (const auto& n : s.names()) s.value(n).setZero();
  s.value("m.b1") << 0.25, -1.5;
  Rng r2(2);
  const Matrix y = mlp.forward(s, random_matrix(5, 3, r2));
  for (Index i = 0; i < 5; ++i) {
    EXPECT_EQ(y(i, 0), 0.25);
    EXPECT_EQ(y(i, 1), -1.5);
  }
}

TEST(Mlp, LinearOneByOne) {
  auto mlp = make_mlp(1, {}, 1, Activation::identity);
  ParameterStore s;
  Rng rng(1);
  mlp.declare(s, rng);
  s.value("m.w0")(0, 0) = 2.0;
  s.value("m.b0")(0, 0) = 0.0;
  Matrix x(3, 1);
  x << -1.0, 0.5, 4.0;
  EXPECT_EQ(mlp.forward(s, x), Matrix(2.0 * x));
}

TEST(Mlp, ForwardIsPure) {
  auto mlp = make_mlp(4, {8, 8}, 3);
  ParameterStore s;
  Rng rng(4);
  mlp.declare(s, rng);
  const Matrix x = random_matrix(6, 4, rng);
  EXPECT_EQ(mlp.forward(s, x), mlp.forward(s, x));
}

TEST(Mlp, HalfSquaredNormGradient) {
  auto mlp = make_mlp(3, {}, 2, Activation::identity);
  ParameterStore s;
  Rng rng(5);
  mlp.declare(s, rng);
  Matrix x(1, 3);
  x << 0.3, -0.7, 1.1;
  Mlp::Tape tape;
  const Matrix y = mlp.forward(s, x, &tape);
  ParameterStore sink = s;
  sink.zero_grad();
  mlp.backward(s, &sink, tape, y);
  // y = x W, L = |y|^2 / 2  =>  dL/dW = x^T y.
  const Matrix expected = x.transpose() * y;
  EXPECT_LT((sink.grad("m.w0") - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Mlp, ParameterOffLossPathGetsZeroGradient) {
  auto mlp = make_mlp(2, {3}, 1);
  ParameterStore s;
  Rng rng(6);
  mlp.declare(s, rng);
  s.add("unused", 2, 2);
  Mlp::Tape tape;
  Rng r2(7);
  const Matrix y = mlp.forward(s, random_matrix(4, 2, r2), &tape);
  s.zero_grad();
  mlp.backward(s, &s, tape, Matrix::Ones(4, 1));
  EXPECT_TRUE(s.grad("unused").isZero());
  EXPECT_FALSE(s.grad("m.w0").isZero());
}

TEST(Mlp, TapeIsSingleUse) {
  auto mlp = make_mlp(2, {3}, 1);
  ParameterStore s;
  Rng rng(6);
  mlp.declare(s, rng);
  Mlp::Tape tape;
  mlp.forward(s, Matrix::Ones(1, 2), &tape);
  mlp.backward(s, nullptr, tape, Matrix::Ones(1, 1));
  EXPECT_THROW(mlp.backward(s, nullptr, tape, Matrix::Ones(1, 1)), std::logic_error);
}

class MlpGradCheck : public ::testing::TestWithParam<Activation> {};

TEST_P(MlpGradCheck, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto mlp = make_mlp(3, {5, 4}, 2, GetParam());
    ParameterStore s;
    Rng rng(seed);
    mlp.declare(s, rng);
    const Matrix x = random_matrix(4, 3, rng);
    const Matrix target = random_matrix(4, 2, rng);
    auto loss = [&](const ParameterStore& p) { return 0.5 * (mlp.forward(p, x) - target).squaredNorm(); };
    auto grad = [&](ParameterStore& p) {
      Mlp::Tape tape;
      const Matrix y = mlp.forward(p, x, &tape);
      mlp.backward(p, &p, tape, y - target);
    };
    const auto rep = grad_check(s, loss, grad);
    EXPECT_TRUE(rep.passed) << rep.worst_param << " " << rep.max_rel_error;
  }
}

INSTANTIATE_TEST_SUITE_P(Activations, MlpGradCheck,
                         ::testing::Values(Activation::tanh, Activation::relu, Activation::identity));

TEST(GradCheck, LinearRegressionTight) {
  auto mlp = make_mlp(4, {}, 1, Activation::identity);
  ParameterStore s;
  Rng rng(9);
  mlp.declare(s, rng);
  const Matrix x = random_matrix(8, 4, rng);
  const Matrix t = random_matrix(8, 1, rng);
  auto loss = [&](const ParameterStore& p) { return 0.5 * (mlp.forward(p, x) - t).squaredNorm(); };
  auto grad = [&](ParameterStore& p) {
    Mlp::Tape tape;
    const Matrix y = mlp.forward(p, x, &tape);
    mlp.backward(p, &p, tape, y - t);
  };
  GradCheckOptions opt;
  opt.tolerance = 1e-6;
  EXPECT_TRUE(grad_check(s, loss, grad, opt).passed);
  opt.analytic_scale = 1.1;
  const auto bad = grad_check(s, loss, grad, opt);
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.max_rel_error, 0.04);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  ParameterStore s;
  s.add("w", 2, 2).value << 1, 2, 3, 4;
  const Matrix before = s.value("w");
  adam_step(s, 0.1);
  EXPECT_EQ(s.value("w"), before);
}

TEST(Adam, MovesAgainstGradientSign) {
  ParameterStore s;
  s.add("w", 1, 2);
  for (int i = 0; i < 20; ++i) {
    s.grad("w") << 1.0, -2.0;
    adam_step(s, 0.01);
  }
  EXPECT_LT(s.value("w")(0, 0), 0.0);
  EXPECT_GT(s.value("w")(0, 1), 0.0);
  EXPECT_TRUE(s.grad("w").isZero());
}

TEST(Adam, ScalarQuadraticOracle) {
  // f(w) = (w - 3)^2 / 2 from w = 0. Hand iteration of the bias-corrected
  // update: the first step has m_hat / sqrt(v_hat) = g / |g| = -1.
  ParameterStore s;
  s.add("w", 1, 1);
  const double lr = 0.01;
  s.grad("w")(0, 0) = s.value("w")(0, 0) - 3.0;
  adam_step(s, lr);
  EXPECT_NEAR(s.value("w")(0, 0), lr * 3.0 / (3.0 + 1e-8), 1e-15);
  double prev = s.value("w")(0, 0);
  for (int i = 0; i < 50; ++i) {
    s.grad("w")(0, 0) = s.value("w")(0, 0) - 3.0;
    adam_step(s, lr);
    EXPECT_GT(s.value("w")(0, 0), prev);
    prev = s.value("w")(0, 0);
  }
  EXPECT_LT(prev, 3.0);
}

TEST(Adam, RejectsNonFiniteGradient) {
  ParameterStore s;
  s.add("w", 1, 1);
  s.grad("w")(0, 0) = std::nan("");
  EXPECT_THROW(adam_step(s, 0.1), std::runtime_error);
}

TEST(SoftUpdate, Extremes) {
  ParameterStore online, target;
  online.add("w", 1, 3).value.setOnes();
  target.add("w", 1, 3);
  soft_update(target, online, 0.0);
  EXPECT_TRUE(target.value("w").isZero());
  soft_update(target, online, 0.01);
  for (Index j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(target.value("w")(0, j), 0.01);
  soft_update(target, online, 1.0);
  EXPECT_EQ(target.value("w"), online.value("w"));
}

TEST(Checkpoint, RoundTripIsBitExact) {
  ParameterStore a, b;
  Rng rng(11);
  init_uniform(a.add("x", 3, 4).value, 1.0, rng);
  a.value("x")(0, 0) = 1.0 / 3.0;
  a.value("x")(0, 1) = -0.0;
  init_uniform(b.add("y", 1, 2).value, 1.0, rng);
  std::stringstream ss;
  save_checkpoint(ss, {{"first", &a}, {"second", &b}});
  const auto back = load_checkpoint(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at("first").value("x"), a.value("x"));
  EXPECT_TRUE(std::signbit(back.at("first").value("x")(0, 1)));
  EXPECT_EQ(back.at("second").value("y"), b.value("y"));
}

TEST(Checkpoint, RejectsGarbage) {
  std::stringstream ss("not a checkpoint\n");
  EXPECT_THROW(load_checkpoint(ss), std::runtime_error);
}

namespace {

struct EncoderFixture {
  StateEncoder enc;
  ParameterStore store;
  EncoderFixture() {
    EncoderSpec spec;
    spec.n_users = 3;
    spec.n_items = 10;
    spec.user_dim = 2;
    spec.item_dim = 3;
    spec.state_dim = 4;
    spec.hidden = {5};
    spec.init_scale = 0.5;
    enc = StateEncoder("enc", spec);
    Rng rng(3);
    enc.declare(store, rng);
  }
};

}  // namespace

TEST(Encoder, EmptyHistoryUsesZeroPools) {
  EncoderFixture f;
  Observation o{1, {}};
  NetworkSpec spec;
  spec.input = f.enc.input_dim();
  spec.hidden = {5};
  spec.output = 4;
  Mlp mlp("enc.mlp", spec);
  Matrix x = Matrix::Zero(1, f.enc.input_dim());
  x.block(0, 0, 1, 2) = f.store.value(f.enc.user_table()).row(1);
  const Matrix expected = mlp.forward(f.store, x);
  const auto got = f.enc.encode_one(f.store, o);
  for (Index j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(got[static_cast<std::size_t>(j)], expected(0, j));
}

TEST(Encoder, MeanPoolingIgnoresDuplicationPattern) {
  EncoderFixture f;
  Observation a{0, {{ItemId{1}, true}, {ItemId{2}, false}}};
  Observation b{0, {{ItemId{1}, true}, {ItemId{1}, true}, {ItemId{2}, false}, {ItemId{2}, false}}};
  const auto ea = f.enc.encode_one(f.store, a), eb = f.enc.encode_one(f.store, b);
  for (std::size_t j = 0; j < ea.size(); ++j) EXPECT_NEAR(ea[j], eb[j], 1e-15);
}

TEST(Encoder, EmbeddingChangeIsLocal) {
  EncoderFixture f;
  Observation o{0, {{ItemId{1}, true}, {ItemId{2}, false}}};
  const auto before = f.enc.encode_one(f.store, o);
  f.store.value(f.enc.item_table())(7, 0) += 1e-3;
  EXPECT_EQ(f.enc.encode_one(f.store, o), before);
  f.store.value(f.enc.item_table())(2, 0) += 1e-3;
  EXPECT_NE(f.enc.encode_one(f.store, o), before);
}

TEST(Encoder, RejectsUnknownIds) {
  EncoderFixture f;
  Observation bad_user{5, {}};
  Observation bad_item{0, {{ItemId{10}, true}}};
  EXPECT_THROW(f.enc.encode_one(f.store, bad_user), std::invalid_argument);
  EXPECT_THROW(f.enc.encode_one(f.store, bad_item), std::invalid_argument);
}

TEST(Encoder, GradientMatchesFiniteDifferences) {
  EncoderFixture f;
  Observation a{0, {{ItemId{1}, true}, {ItemId{2}, false}}};
  Observation b{2, {{ItemId{3}, false}}};
  std::vector<const Observation*> obs{&a, &b};
  Rng rng(8);
  Matrix dir(2, 4);
  init_uniform(dir, 1.0, rng);
  auto loss = [&](const ParameterStore& p) { return f.enc.encode(p, obs).cwiseProduct(dir).sum(); };
  auto grad = [&](ParameterStore& p) {
    StateEncoder::Tape tape;
    f.enc.encode(p, obs, &tape);
    f.enc.backward(p, &p, tape, dir);
  };
  const auto rep = grad_check(f.store, loss, grad);
  EXPECT_TRUE(rep.passed) << rep.worst_param << " " << rep.max_rel_error;
}
