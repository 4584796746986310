#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "stnsim/mlp.hpp"

using namespace stnsim;
using Catch::Approx;

TEST_CASE("a single linear layer is a plain matrix product") {
  Mlp net(2, {}, 2);
  REQUIRE(net.params.size() == 6); // 2x2 weights + 2 biases
  // Row-major [out x in], then biases.
  net.params = {1.0, 2.0, -3.0, 0.5, 0.25, -1.0};
  const auto y = net.forward({2.0, -1.0});
  REQUIRE(y.size() == 2);
  CHECK(y[0] == Approx(1.0 * 2.0 + 2.0 * -1.0 + 0.25));
  CHECK(y[1] == Approx(-3.0 * 2.0 + 0.5 * -1.0 - 1.0));
}

TEST_CASE("hidden layers clamp negatives") {
  Mlp net(1, {2}, 1);
  // Layer 1: w = [1; -1], b = [0, 0]; layer 2: w = [1, 1], b = [0].
  net.params = {1.0, -1.0, 0.0, 0.0, 1.0, 1.0, 0.0};
  // x=3: hidden = relu(3, -3) = (3, 0) -> y = 3.
  CHECK(net.forward({3.0})[0] == Approx(3.0));
  // x=-2: hidden = relu(-2, 2) = (0, 2) -> y = 2.
  CHECK(net.forward({-2.0})[0] == Approx(2.0));
}

TEST_CASE("initialization is deterministic and zero-biased") {
  Mlp a(4, {8}, 3), b(4, {8}, 3);
  a.init_params(99);
  b.init_params(99);
  CHECK(a.params == b.params);
  b.init_params(100);
  CHECK(a.params != b.params);
  // Biases start at zero: the tail of each layer block.
  const int l1_w = 8 * 4;
  for (int i = 0; i < 8; ++i) CHECK(a.params[static_cast<std::size_t>(l1_w + i)] == 0.0);
}

TEST_CASE("backward matches central finite differences") {
  Mlp net(3, {5, 4}, 2);
  net.init_params(7);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<double> x = {u(rng), u(rng), u(rng)};
  const std::vector<double> c = {u(rng), u(rng)}; // fixed linear loss weights

  auto loss = [&](const Mlp& m) {
    const auto y = m.forward(x);
    return c[0] * y[0] + c[1] * y[1];
  };

  Mlp::Cache cache;
  net.forward(x, &cache);
  std::vector<double> grad(net.params.size(), 0.0);
  net.backward(cache, c.data(), grad.data());

  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < net.params.size(); ++i) {
    Mlp plus = net, minus = net;
    plus.params[i] += h;
    minus.params[i] -= h;
    const double fd = (loss(plus) - loss(minus)) / (2.0 * h);
    const double denom = std::max({std::fabs(fd), std::fabs(grad[i]), 1e-8});
    worst = std::max(worst, std::fabs(fd - grad[i]) / denom);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("backward accumulates instead of overwriting") {
  Mlp net(2, {}, 1);
  net.params = {1.0, 1.0, 0.0};
  Mlp::Cache cache;
  net.forward({1.0, 2.0}, &cache);
  const double dout = 1.0;
  std::vector<double> grad(net.params.size(), 0.0);
  net.backward(cache, &dout, grad.data());
  net.backward(cache, &dout, grad.data());
  CHECK(grad[0] == Approx(2.0)); // two passes, same contribution twice
  CHECK(grad[1] == Approx(4.0));
  CHECK(grad[2] == Approx(2.0));
}

TEST_CASE("momentum descent follows the hand recurrence") {
  SgdMomentum opt;
  opt.lr = 0.1;
  opt.momentum = 0.5;
  std::vector<double> p = {1.0};
  opt.step(p, {2.0});
  // v = 0.5*0 + 2 = 2; p = 1 - 0.1*2 = 0.8.
  CHECK(p[0] == Approx(0.8));
  opt.step(p, {1.0});
  // v = 0.5*2 + 1 = 2; p = 0.8 - 0.2 = 0.6.
  CHECK(p[0] == Approx(0.6));
  // Zero learning rate freezes parameters regardless of gradient.
  SgdMomentum frozen;
  frozen.lr = 0.0;
  std::vector<double> q = {3.0};
  frozen.step(q, {123.0});
  CHECK(q[0] == 3.0);
}

TEST_CASE("target smoothing interpolates and converges geometrically") {
  std::vector<double> online = {1.0, -2.0};
  std::vector<double> target = {0.0, 0.0};

  SECTION("rho = 0 is a hard copy") {
    soft_update(target, online, 0.0);
    CHECK(target == online);
  }

  SECTION("rho = 0.5 is the midpoint") {
    soft_update(target, online, 0.5);
    CHECK(target[0] == Approx(0.5));
    CHECK(target[1] == Approx(-1.0));
  }

  SECTION("repeated updates shrink the gap by rho each time") {
    const double rho = 0.9;
    double gap = std::fabs(target[0] - online[0]);
    for (int k = 0; k < 20; ++k) {
      soft_update(target, online, rho);
      const double next = std::fabs(target[0] - online[0]);
      CHECK(next == Approx(gap * rho).epsilon(1e-9));
      gap = next;
    }
    CHECK(gap == Approx(std::pow(rho, 20)).epsilon(1e-9));
  }

  SECTION("rho = 1 never moves") {
    soft_update(target, online, 1.0);
    CHECK(target[0] == 0.0);
    CHECK_THROWS_AS(soft_update(target, online, 1.5), std::invalid_argument);
  }
}
