#include <cmath>
#include <random>

#include "doctest.h"
#include "dwpi/nn/adam.hpp"
#include "dwpi/nn/mlp.hpp"

using namespace dwpi::nn;

namespace {

Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> d(0, 1);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

std::vector<double> flat(Mlp& m) {
  std::vector<double> out;
  m.for_each_parameter([&](double& p) { out.push_back(p); });
  return out;
}

}  // namespace

TEST_CASE("zero model outputs zero") {
  Mlp m({3, 5, 2});
  const Vector out = m.forward(Vector::Constant(3, 7.0));
  CHECK(out.isZero());
}

TEST_CASE("identity single layer") {
  Mlp m({3, 3});
  m.layer(0).weights = Matrix::Identity(3, 3);
  Vector x(3);
  x << 1.5, -2, 0.25;
  CHECK(m.forward(x) == x);
}

TEST_CASE("hand-set 2-2-1 network") {
  Mlp m({2, 2, 1});
  m.layer(0).weights << 1, -1, 2, 0.5;
  m.layer(0).bias << 0.5, -4;
  m.layer(1).weights << 3, -2;
  m.layer(1).bias << 0.25;
  Vector x(2);
  x << 2, 1;
  // hidden pre = (2 - 1 + 0.5, 4 + 0.5 - 4) = (1.5, 0.5); relu keeps both
  CHECK(m.forward(x)(0) == doctest::Approx(3 * 1.5 - 2 * 0.5 + 0.25));
  x << -1, 3;
  // hidden pre = (-1 - 3 + 0.5, -2 + 1.5 - 4) -> both clipped
  CHECK(m.forward(x)(0) == doctest::Approx(0.25));
}

TEST_CASE("forward dimension mismatch throws") {
  Mlp m({3, 2});
  CHECK_THROWS(m.forward(Vector::Zero(4)));
}

TEST_CASE("hidden activations are non-negative") {
  std::mt19937_64 rng(2);
  auto m = Mlp::glorot({4, 16, 16, 3}, rng);
  Matrix x(4, 50);
  for (Eigen::Index c = 0; c < 50; ++c) x.col(c) = random_vector(rng, 4) * 3;
  Tape tape;
  m.forward_batch(x, tape);
  for (std::size_t l = 1; l < tape.inputs.size(); ++l) CHECK(tape.inputs[l].minCoeff() >= 0.0);
}

TEST_CASE("batched forward matches per-sample forward") {
  std::mt19937_64 rng(9);
  auto m = Mlp::glorot({5, 7, 3}, rng);
  Matrix x(5, 4);
  for (Eigen::Index c = 0; c < 4; ++c) x.col(c) = random_vector(rng, 5);
  const Matrix y = m.forward_batch(x);
  for (Eigen::Index c = 0; c < 4; ++c) CHECK((y.col(c) - m.forward(Vector(x.col(c)))).norm() < 1e-14);
}

TEST_CASE("gradient check on 4-8-3 models over 20 seeds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    auto m = Mlp::glorot({4, 8, 3}, rng);
    for (std::size_t l = 0; l < m.layer_count(); ++l) m.layer(l).bias = random_vector(rng, m.layer(l).bias.size()) * 0.1;
    CHECK(grad_check(m, random_vector(rng, 4), random_vector(rng, 3)) < 1e-4);
  }
}

TEST_CASE("gradient check on 2-2-2 models over 10 seeds") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    std::mt19937_64 rng(seed);
    auto m = Mlp::glorot({2, 2, 2}, rng);
    CHECK(grad_check(m, random_vector(rng, 2), random_vector(rng, 2)) < 1e-4);
  }
}

TEST_CASE("gradient check of zero model with zero target is exact") {
  Mlp m({3, 4, 2});
  CHECK(grad_check(m, Vector::Ones(3), Vector::Zero(2)) == 0.0);
}

TEST_CASE("one-parameter linear model has the closed-form gradient") {
  Mlp m({1, 1});
  const double w = 0.7, x = 1.9, y = -0.4;
  m.layer(0).weights(0, 0) = w;
  Matrix in(1, 1), target(1, 1);
  in << x;
  target << y;
  const auto lg = mse_gradients(m, in, target);
  CHECK(lg.grads.weights[0](0, 0) == doctest::Approx(2 * (w * x - y) * x).epsilon(1e-14));
  CHECK(lg.loss == doctest::Approx((w * x - y) * (w * x - y)));
}

TEST_CASE("train step at the target leaves parameters unchanged") {
  std::mt19937_64 rng(4);
  auto m = Mlp::glorot({3, 6, 2}, rng);
  Matrix x(3, 8);
  for (Eigen::Index c = 0; c < 8; ++c) x.col(c) = random_vector(rng, 3);
  const Matrix y = m.forward_batch(x);
  const auto before = flat(m);
  Adam opt(m, {});
  CHECK(train_step(m, x, y, opt) == 0.0);
  CHECK(flat(m) == before);
}

TEST_CASE("adam with learning rate zero is a no-op") {
  std::mt19937_64 rng(5);
  auto m = Mlp::glorot({3, 6, 2}, rng);
  Matrix x = Matrix::Random(3, 8), y = Matrix::Random(2, 8);
  const auto before = flat(m);
  Adam opt(m, {.learning_rate = 0.0});
  for (int i = 0; i < 10; ++i) train_step(m, x, y, opt);
  CHECK(flat(m) == before);
  CHECK(opt.step_count() == 10);
}

TEST_CASE("repeated steps on one pair do not increase the loss") {
  std::mt19937_64 rng(6);
  auto m = Mlp::glorot({3, 8, 2}, rng);
  Matrix x(3, 1), y(2, 1);
  x << 0.3, -0.5, 0.8;
  y << 0.2, -0.1;
  Adam opt(m, {.learning_rate = 1e-3});
  double prev = train_step(m, x, y, opt);
  for (int i = 0; i < 100; ++i) {
    const double loss = train_step(m, x, y, opt);
    CHECK(loss <= prev + 1e-15);
    prev = loss;
  }
}

TEST_CASE("linear regression task reaches low error") {
  std::mt19937_64 rng(12);
  auto m = Mlp::glorot({2, 16, 1}, rng);
  Matrix x(2, 64), y(1, 64);
  std::uniform_real_distribution<double> u(-1, 1);
  for (Eigen::Index c = 0; c < 64; ++c) {
    x(0, c) = u(rng);
    x(1, c) = u(rng);
    y(0, c) = 0.5 * x(0, c) - 0.3 * x(1, c) + 0.1;
  }
  Adam opt(m, {.learning_rate = 3e-3});
  double loss = 1.0;
  for (int i = 0; i < 5000 && loss >= 1e-3; ++i) loss = train_step(m, x, y, opt);
  CHECK(mse_loss(m, x, y) < 1e-3);
}

TEST_CASE("non-finite loss raises divergence") {
  Mlp m({1, 1});
  Matrix x(1, 1), y(1, 1);
  x << 1;
  y << std::nan("");
  Adam opt(m, {});
  CHECK_THROWS_AS(train_step(m, x, y, opt), DivergenceError);
}

TEST_CASE("serialization round trip is bit exact") {
  std::mt19937_64 rng(21);
  auto m = Mlp::glorot({6, 9, 4, 3}, rng);
  m.layer(1).bias = random_vector(rng, 4) * 1e-7;
  const auto copy = deserialize(serialize(m));
  CHECK(copy.layer_sizes() == m.layer_sizes());
  for (int t = 0; t < 50; ++t) {
    const Vector x = random_vector(rng, 6) * 10;
    const Vector a = m.forward(x), b = copy.forward(x);
    for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(a(i) == b(i));
  }
  auto mm = m;
  auto cc = copy;
  CHECK(flat(mm) == flat(cc));
}

TEST_CASE("malformed blobs are rejected") {
  std::mt19937_64 rng(1);
  const auto blob = serialize(Mlp::glorot({2, 3, 1}, rng));
  CHECK_THROWS_AS(deserialize(blob.substr(0, blob.size() / 2)), FormatError);
  std::string wrong = blob;
  wrong.replace(wrong.find("dwpi-mlp 1"), 10, "dwpi-mlp 7");
  CHECK_THROWS_WITH_AS(deserialize(wrong), "unsupported model format version 7 (expected 1)", FormatError);
  CHECK_THROWS_AS(deserialize("garbage"), FormatError);
}

TEST_CASE("sparse inputs give the dense outputs and gradients") {
  std::mt19937_64 rng(21);
  const Mlp m = Mlp::glorot({12, 6, 3}, rng);
  Matrix dense = Matrix::Zero(12, 5);
  std::uniform_int_distribution<int> row(0, 11);
  for (Eigen::Index c = 0; c < dense.cols(); ++c)
    for (int k = 0; k < 3; ++k) dense(row(rng), c) = random_vector(rng, 1)(0);
  const SparseMatrix sparse = dense.sparseView();

  Tape dense_tape, sparse_tape;
  const Matrix a = m.forward_batch(dense, dense_tape);
  const Matrix b = m.forward_batch(sparse, sparse_tape);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.forward_batch(sparse) - a).cwiseAbs().maxCoeff() < 1e-12);

  const Matrix grad = Matrix::Random(3, 5);
  const auto ga = m.backward(dense_tape, grad);
  const auto gb = m.backward(sparse_tape, grad);
  for (std::size_t i = 0; i < m.layer_count(); ++i) {
    CHECK((ga.weights[i] - gb.weights[i]).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ga.biases[i] - gb.biases[i]).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(m.forward_batch(SparseMatrix(4, 2)), std::invalid_argument);
}
