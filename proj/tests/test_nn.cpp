#include <doctest.h>

#include <cmath>

#include "humo/core/error.hpp"
#include "humo/core/rng.hpp"
#include "humo/nn/adam.hpp"
#include "humo/nn/checkpoint.hpp"
#include "humo/nn/grad_check.hpp"
#include "humo/nn/ops.hpp"
#include "humo/nn/parameters.hpp"

using namespace humo;
using namespace humo::nn;

namespace {

Tensor random_tensor(Shape s, Rng& rng, double scale = 1.0) { return randn(std::move(s), rng, scale); }

// Runs grad_check at 10 seeded points drawn for the given input shapes.
double worst_over_points(const ScalarFn& fn, const std::vector<Shape>& shapes, std::uint64_t seed) {
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    Rng rng(seed, k);
    std::vector<Tensor> point;
    for (const Shape& s : shapes) point.push_back(random_tensor(s, rng));
    worst = std::max(worst, grad_check(fn, point));
  }
  return worst;
}

// Weighted sum so every output coordinate gets a distinct upstream gradient.
Var probe(Var y) {
  Tensor w(y.shape());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(1.0 + 0.7 * static_cast<double>(i));
  return sum(mul(y, y.tape().constant(w)));
}

}  // namespace

TEST_CASE("closed-form examples") {
  Tape t;
  Var x = t.constant(Tensor({5}, 3.0));
  Var g = t.constant(Tensor({5}, 1.0));
  for (double v : rmsnorm(x, g).value().values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));

  Var logits = t.constant(Tensor({2, 7}, 0.3));
  for (double v : softmax(logits).value().values()) CHECK(v == doctest::Approx(1.0 / 7.0).epsilon(1e-14));

  Rng rng(1);
  Var seq = t.constant(random_tensor({2, 6, 3}, rng));
  Tensor ident({1, 3, 3}, 0.0);
  for (std::size_t c = 0; c < 3; ++c) ident[c * 3 + c] = 1.0;
  CHECK(conv1d(seq, t.constant(ident), Var{}).value() == seq.value());
}

TEST_CASE("softmax rows sum to one and cross entropy is non-negative") {
  Rng rng(2);
  Tape t;
  Var z = t.constant(random_tensor({6, 9}, rng, 5.0));
  const Tensor y = softmax(z).value();
  for (std::size_t r = 0; r < 6; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < 9; ++i) s += y[r * 9 + i];
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
  const std::vector<int> targets{0, 1, 2, 3, 4, 5};
  CHECK(cross_entropy(z, targets).value().item() >= 0.0);

  Tensor sharp({1, 3}, -50.0);
  sharp[1] = 50.0;
  CHECK(cross_entropy(t.constant(sharp), std::vector<int>{1}).value().item() < 1e-40);
}

TEST_CASE("backward of sum of squares is 2x") {
  Rng rng(3);
  Tape t;
  Var x = t.leaf(random_tensor({4, 3}, rng));
  t.backward(sum(square(x)));
  for (std::size_t i = 0; i < 12; ++i) CHECK(x.grad()[i] == 2.0 * x.value()[i]);
  CHECK_THROWS_AS(t.backward(x), DimensionError);
}

TEST_CASE("cross entropy gradient is softmax minus one-hot") {
  Rng rng(4);
  Tape t;
  Var z = t.leaf(random_tensor({1, 5}, rng));
  t.backward(cross_entropy(z, std::vector<int>{3}));
  const Tensor p = softmax(t.constant(z.value())).value();
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(z.grad()[i] - (p[i] - (i == 3 ? 1.0 : 0.0))) < 1e-14);
}

TEST_CASE("ignored targets do not contribute") {
  Tape t;
  Rng rng(5);
  Var z = t.leaf(random_tensor({3, 4}, rng));
  t.backward(cross_entropy(z, std::vector<int>{1, -1, 2}));
  for (std::size_t i = 0; i < 4; ++i) CHECK(z.grad()[4 + i] == 0.0);
  CHECK_THROWS_AS(cross_entropy(z, std::vector<int>{-1, -1, -1}), ValidationError);
}

TEST_CASE("shape errors name the shapes") {
  Tape t;
  Var a = t.constant(Tensor({2, 3}));
  Var b = t.constant(Tensor({4, 5}));
  try {
    matmul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("[2, 3]") != std::string::npos);
    CHECK(std::string(e.what()).find("[4, 5]") != std::string::npos);
  }
  CHECK_THROWS_AS(add(a, b), DimensionError);
  CHECK_THROWS_AS(conv1d(t.constant(Tensor({1, 4, 3})), t.constant(Tensor({3, 2, 5})), Var{}), DimensionError);
}

TEST_CASE("grad_check is exact for a quadratic form") {
  Rng rng(6);
  const Tensor A = random_tensor({4, 4}, rng);
  auto fn = [&](Tape& t, std::span<const Var> in) {
    Var x = reshape(in[0], {1, 4});
    return sum(mul(matmul(x, t.constant(A)), x));
  };
  CHECK(grad_check(fn, {random_tensor({4}, rng)}) < 1e-9);
}

TEST_CASE("every differentiable primitive passes grad_check") {
  const double tol = 1e-4;
  SUBCASE("add / sub / mul with broadcasting") {
    CHECK(worst_over_points([](Tape&, auto in) { return probe(add(in[0], in[1])); }, {{2, 3}, {3}}, 1) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(sub(in[0], in[1])); }, {{2, 3}, {1}}, 2) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(mul(in[0], in[1])); }, {{2, 3}, {2, 3}}, 3) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(mul(in[0], in[1])); }, {{2, 3}, {3}}, 4) < tol);
  }
  SUBCASE("pointwise") {
    CHECK(worst_over_points([](Tape&, auto in) { return probe(scale(in[0], -1.7)); }, {{5}}, 5) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(relu(in[0])); }, {{7}}, 6) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(sigmoid(in[0])); }, {{7}}, 7) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(nn::exp(in[0])); }, {{4}}, 8) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(square(in[0])); }, {{4}}, 9) < tol);
  }
  SUBCASE("reductions") {
    CHECK(worst_over_points([](Tape&, auto in) { return mean(in[0]); }, {{3, 2}}, 10) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(mean_axis(in[0], 1)); }, {{2, 3, 2}}, 11) < tol);
  }
  SUBCASE("matmul / bmm") {
    CHECK(worst_over_points([](Tape&, auto in) { return probe(matmul(in[0], in[1])); }, {{2, 3, 4}, {4, 2}}, 12) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(bmm(in[0], in[1])); }, {{2, 3, 4}, {2, 4, 2}}, 13) < tol);
  }
  SUBCASE("shape ops") {
    CHECK(worst_over_points([](Tape&, auto in) { return probe(permute(in[0], {2, 0, 1})); }, {{2, 3, 4}}, 14) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(slice(in[0], 1, 1, 3)); }, {{2, 4, 2}}, 15) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(concat({in[0], in[1]}, 1)); }, {{2, 1, 3}, {2, 2, 3}}, 16) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(reshape(in[0], {6})); }, {{2, 3}}, 17) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(upsample_repeat(in[0], 3)); }, {{1, 2, 2}}, 18) < tol);
  }
  SUBCASE("normalizations") {
    CHECK(worst_over_points([](Tape&, auto in) { return probe(softmax(in[0])); }, {{3, 4}}, 19) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(rmsnorm(in[0], in[1])); }, {{3, 4}, {4}}, 20) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(l2_normalize(in[0])); }, {{3, 4}}, 21) < tol);
  }
  SUBCASE("lookup, masking, losses") {
    const std::vector<int> ids{2, 0, 2, 1};
    CHECK(worst_over_points([&](Tape&, auto in) { return probe(embedding(in[0], ids)); }, {{3, 2}}, 22) < tol);
    const std::vector<std::uint8_t> mask{0, 1, 0, 0};
    CHECK(worst_over_points([&](Tape&, auto in) { return probe(masked_fill(in[0], mask, -3.0)); }, {{2, 2, 2}}, 23) < tol);
    const std::vector<int> targets{1, -1, 3};
    CHECK(worst_over_points([&](Tape&, auto in) { return cross_entropy(in[0], targets); }, {{3, 4}}, 24) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return mse(in[0], in[1]); }, {{2, 3}, {2, 3}}, 25) < tol);
  }
  SUBCASE("conv1d") {
    CHECK(worst_over_points([](Tape&, auto in) { return probe(conv1d(in[0], in[1], in[2], {1, 1, 1})); },
                            {{2, 5, 3}, {3, 3, 2}, {2}}, 26) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(conv1d(in[0], in[1], in[2], {2, 1, 1})); },
                            {{1, 8, 2}, {4, 2, 3}, {3}}, 27) < tol);
    CHECK(worst_over_points([](Tape&, auto in) { return probe(conv1d(in[0], in[1], Var{}, {1, 2, 2})); },
                            {{1, 6, 2}, {3, 2, 2}}, 28) < tol);
  }
}

TEST_CASE("composite conv + rmsnorm + attention matches finite differences") {
  // x [1, T=4, C=3] -> conv -> rmsnorm -> single-head masked attention -> loss
  const std::vector<std::uint8_t> causal{0, 1, 1, 1, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0};
  auto fn = [&](Tape&, std::span<const Var> in) {
    Var h = conv1d(in[0], in[1], in[2], {1, 1, 1});
    h = rmsnorm(h, in[3]);
    Var q = matmul(h, in[4]);
    Var k = matmul(h, in[5]);
    Var v = matmul(h, in[6]);
    Var scores = scale(bmm(q, permute(k, {0, 2, 1})), 1.0 / std::sqrt(3.0));
    Var att = softmax(masked_fill(scores, causal, -1e9));
    return probe(relu(add(bmm(att, v), h)));
  };
  const double err = worst_over_points(fn, {{1, 4, 3}, {3, 3, 3}, {3}, {3}, {3, 3}, {3, 3}, {3, 3}}, 99);
  CHECK(err < 1e-4);
}

TEST_CASE("adam first step moves each coordinate by about lr") {
  Parameters p;
  p.add("w", Tensor({4}, std::vector<double>{1.0, -2.0, 0.5, 3.0}));
  Adam adam(AdamConfig{0.01});
  const Tensor before = p.get("w");
  adam.step(p, {Tensor({4}, std::vector<double>{0.3, -5.0, 1e-2, 100.0})});
  for (std::size_t i = 0; i < 4; ++i) {
    const double d = std::abs(p.get("w")[i] - before[i]);
    CHECK(d >= 0.9 * 0.01);
    CHECK(d <= 0.01);
  }
}

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
  Parameters p;
  p.add("w", Tensor({3}, 0.25));
  Adam adam;
  for (int i = 0; i < 3; ++i) adam.step(p, {Tensor({3}, 0.0)});
  CHECK(p.get("w") == Tensor({3}, 0.25));
  CHECK_THROWS_AS(adam.step(p, {Tensor({2}, 0.0)}), DimensionError);
}

TEST_CASE("training trajectories are bit-identical across runs") {
  auto run = [] {
    Rng rng(17);
    Parameters p;
    p.add("w", init_uniform({3, 2}, 3, rng));
    p.add("b", Tensor({2}, 0.0));
    Adam adam(AdamConfig{0.05});
    const Tensor x = randn({8, 3}, rng, 1.0);
    const Tensor y = randn({8, 2}, rng, 1.0);
    std::vector<double> losses;
    for (int step = 0; step < 20; ++step) {
      Tape t;
      Binding b(t, p);
      Var loss = mse(add(matmul(t.constant(x), b("w")), b("b")), t.constant(y));
      t.backward(loss);
      adam.step(p, b.gradients());
      losses.push_back(loss.value().item());
    }
    return std::make_pair(losses, p.get("w"));
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  CHECK(a.first.back() < a.first.front());
}

TEST_CASE("parameters and bindings") {
  Parameters p;
  p.add("a", Tensor({2}, 1.0));
  p.add("b", Tensor({3}, 2.0));
  CHECK_THROWS_AS(p.add("a", Tensor({1})), ValidationError);
  CHECK(p.scalar_count() == 5);
  Tape t;
  Binding bind(t, p);
  t.backward(sum(bind("a")));
  const auto grads = bind.gradients();
  CHECK(grads[0] == Tensor({2}, 1.0));
  CHECK(grads[1] == Tensor({3}, 0.0));
}

TEST_CASE("checkpoint round trip") {
  Rng rng(8);
  Parameters p;
  p.add("enc.w", randn({3, 4, 5}, rng, 1.0));
  p.add("enc.b", randn({5}, rng, 1.0));
  p.add("scalar", Tensor::scalar(-0.0));
  Json meta{{"kind", "test"}, {"step", 12}};
  const std::string bytes = serialize_checkpoint(p, meta);
  const Checkpoint ck = parse_checkpoint(bytes);
  CHECK(ck.meta == meta);
  CHECK(ck.params.names() == p.names());
  for (std::size_t i = 0; i < p.count(); ++i) CHECK(ck.params.at(i) == p.at(i));
  CHECK(std::signbit(ck.params.get("scalar")[0]));
  CHECK(serialize_checkpoint(ck.params, ck.meta) == bytes);

  CHECK_THROWS_AS(parse_checkpoint(bytes.substr(0, bytes.size() - 8)), ParseError);
  std::string bumped = bytes;
  bumped.replace(bumped.find("\"format_version\":1"), 18, "\"format_version\":2");
  CHECK_THROWS_AS(parse_checkpoint(bumped), VersionError);

  Parameters other;
  other.add("enc.w", Tensor({3, 4, 5}));
  other.add("enc.b", Tensor({4}));
  other.add("scalar", Tensor::scalar(0.0));
  CHECK_THROWS_AS(assign_parameters(other, ck.params), DimensionError);
}
