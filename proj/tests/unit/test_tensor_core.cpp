#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "mazescope/maze/maze.hpp"
#include "mazescope/maze/render.hpp"
#include "mazescope/nn/forward.hpp"
#include "mazescope/nn/layers.hpp"
#include "mazescope/nn/weights.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mazescope;
using testutil::error_code_of;

namespace {

const nn::NetworkSpec& impala() {
  static const auto spec = nn::NetworkSpec::impala();
  return spec;
}

const nn::WeightStore& seed0_weights() {
  static const auto store = nn::init_random_weights(impala(), 0);
  return store;
}

Tensor seed42_observation() { return maze::render_observation(maze::generate_kruskal(42, 15)); }

}  // namespace

TEST_SUITE("hand-computed oracles") {
  TEST_CASE("3x3 all-ones kernel counts in-bounds neighbours") {
    Tensor input({1, 3, 3}, 1.0f);
    Tensor kernel({1, 1, 3, 3}, 1.0f);
    Tensor bias({1}, 0.5f);
    const auto out = nn::conv2d_forward(input, kernel, bias);
    const float expected[9] = {4.5f, 6.5f, 4.5f, 6.5f, 9.5f, 6.5f, 4.5f, 6.5f, 4.5f};
    for (int i = 0; i < 9; ++i) CHECK(out[i] == expected[i]);
  }

  TEST_CASE("conv sums over input channels with per-channel kernels") {
    // Two channels, centre tap only: out = 2*a + 3*b.
    Tensor input({2, 2, 2}, std::vector<float>{1, 2, 3, 4, 10, 20, 30, 40});
    Tensor kernel({1, 2, 3, 3}, 0.0f);
    kernel[4] = 2.0f;
    kernel[9 + 4] = 3.0f;
    const auto out = nn::conv2d_forward(input, kernel, Tensor({1}, 0.0f));
    CHECK(out.values() == std::vector<float>{32, 64, 96, 128});
  }

  TEST_CASE("maxpool 4x4 uses windows centred on even pixels") {
    Tensor input({1, 4, 4}, std::vector<float>{1, 2, 3, 4,     //
                                               5, 6, 7, 8,     //
                                               9, 10, 11, 12,  //
                                               13, 14, 15, 16});
    const auto r = nn::maxpool_forward(input);
    CHECK(r.output.shape() == Shape{1, 2, 2});
    // Output (0,0) sees rows/cols 0..1, (0,1) sees rows 0..1 cols 1..3, etc.
    CHECK(r.output.values() == std::vector<float>{6, 8, 14, 16});
    CHECK(r.argmax == std::vector<std::uint32_t>{5, 7, 13, 15});
  }

  TEST_CASE("maxpool of odd extent rounds up") {
    const auto r = nn::maxpool_forward(Tensor({2, 5, 3}, 1.0f));
    CHECK(r.output.shape() == Shape{2, 3, 2});
  }

  TEST_CASE("dense layer") {
    Tensor x({3}, std::vector<float>{1, 2, 3});
    Tensor k({2, 3}, std::vector<float>{1, 0, -1, 0.5f, 0.5f, 0.5f});
    Tensor b({2}, std::vector<float>{0.25f, -1});
    CHECK(nn::dense_forward(x, k, b).values() == std::vector<float>{-1.75f, 2.0f});
  }

  TEST_CASE("softmax of uniform and shifted logits") {
    const std::vector<float> uniform(15, 0.3f);
    for (double p : nn::softmax(uniform)) CHECK(p == doctest::Approx(1.0 / 15).epsilon(1e-12));
    const std::vector<float> big{1000.0f, 1000.0f};
    const auto p = nn::softmax(big);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(std::isfinite(p[1]));
  }
}

TEST_SUITE("randomized layer oracles") {
  TEST_CASE("each kernel agrees with the brute-force reference") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> dim(1, 9);
    for (int trial = 0; trial < 20; ++trial) {
      const Shape s{dim(rng), dim(rng), dim(rng)};
      const auto x = oracle::random_tensor(s, rng);
      const std::size_t o = dim(rng);
      const auto k = oracle::random_tensor({o, s[0], 3, 3}, rng);
      const auto b = oracle::random_tensor({o}, rng);
      CHECK(oracle::max_abs_diff(nn::conv2d_forward(x, k, b).data(), oracle::conv3x3(x, k, b).data()) < 1e-5);
      CHECK(oracle::max_abs_diff(nn::maxpool_forward(x).output.data(), oracle::maxpool3x3s2(x).data()) == 0.0);
      CHECK(nn::relu(x) == oracle::relu(x));
      const auto y = oracle::random_tensor(s, rng);
      CHECK(nn::resadd(x, y) == oracle::add(x, y));
      const auto flat = nn::flatten(x);
      const auto dk = oracle::random_tensor({o, flat.numel()}, rng);
      CHECK(oracle::max_abs_diff(nn::dense_forward(flat, dk, b).data(), oracle::dense(flat, dk, b).data()) < 1e-5);
      const auto p = nn::softmax(b.data());
      const auto q = oracle::softmax(b.data());
      for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - q[i]) < 1e-12);
    }
  }

  TEST_CASE("shape mismatches are rejected") {
    CHECK(error_code_of([] { nn::resadd(Tensor({1, 2, 2}), Tensor({1, 2, 3})); }) == ErrorCode::kConfiguration);
    CHECK(error_code_of([] { nn::conv2d_forward(Tensor({2, 4, 4}), Tensor({1, 3, 3, 3}), Tensor({1})); }) ==
          ErrorCode::kConfiguration);
  }
}

TEST_SUITE("network graph") {
  TEST_CASE("layer ladder of the default configuration") {
    const auto& spec = impala();
    CHECK(spec.count(nn::LayerKind::kConv) == 15);
    CHECK(spec.count(nn::LayerKind::kMaxPool) == 3);
    CHECK(spec.count(nn::LayerKind::kResAdd) == 6);
    CHECK(spec.count(nn::LayerKind::kDense) == 3);
    CHECK(spec.layer(spec.index_of("block1.conv")).output_shape == Shape{64, 64, 64});
    CHECK(spec.layer(spec.index_of("block1.maxpool")).output_shape == Shape{64, 32, 32});
    CHECK(spec.layer(spec.index_of("block2.res1.resadd")).output_shape == Shape{128, 16, 16});
    CHECK(spec.layer(spec.index_of("block3.res2.resadd")).output_shape == Shape{128, 8, 8});
    CHECK(spec.layer(spec.index_of("final.flatten")).output_shape == Shape{8192});
    CHECK(spec.layer(spec.policy_index()).output_shape == Shape{15});
    CHECK(spec.layer(spec.value_index()).output_shape == Shape{1});
    const auto& add = spec.layer(spec.index_of("block1.res2.resadd"));
    CHECK(add.inputs.size() == 2);
    CHECK(spec.layer(static_cast<std::size_t>(add.inputs[0])).name == "block1.res2.conv2");
    CHECK(spec.layer(static_cast<std::size_t>(add.inputs[1])).name == "block1.res1.resadd");
  }

  TEST_CASE("unknown layer names list the valid ones") {
    try {
      impala().index_of("block9.conv");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNotFound);
      CHECK(std::string(e.what()).find("block1.conv") != std::string::npos);
    }
  }
}

TEST_SUITE("forward pass") {
  TEST_CASE("golden logits for seed-0 weights on the seed-42 maze") {
    const auto trace = nn::forward_with_capture(impala(), seed0_weights(), seed42_observation());
    const double golden[15] = {-0.06774765, 0.00288479, -0.00635945, 0.02938344, 0.05533703,
                               -0.09877934, -0.00546815, 0.04535642, 0.06985302, 0.05954850,
                               0.06033772, -0.05577023, -0.10187463, 0.02486357, -0.05277517};
    REQUIRE(trace.logits.numel() == 15);
    for (int i = 0; i < 15; ++i) CHECK(std::abs(trace.logits[i] - golden[i]) < 1e-5);
    CHECK(std::abs(trace.value - 0.03531945) < 1e-5);
  }

  TEST_CASE("capture returns exactly the requested layers") {
    const auto trace = nn::forward_with_capture(impala(), seed0_weights(), seed42_observation(),
                                                {"block1.conv", "block2.res1.resadd"});
    CHECK(trace.layers.size() == 2);
    CHECK(trace.layers.at("block1.conv").shape() == Shape{64, 64, 64});
    CHECK(trace.layers.at("block2.res1.resadd").shape() == Shape{128, 16, 16});
    CHECK(error_code_of([] {
            nn::forward_with_capture(impala(), seed0_weights(), seed42_observation(), {"nope"});
          }) == ErrorCode::kNotFound);
  }

  TEST_CASE("capturing the heads leaves logits and value intact") {
    const auto plain = nn::forward_with_capture(impala(), seed0_weights(), seed42_observation());
    const auto heads =
        nn::forward_with_capture(impala(), seed0_weights(), seed42_observation(), {"head.policy", "head.value"});
    CHECK(heads.logits.values() == plain.logits.values());
    CHECK(heads.value == plain.value);
    CHECK(heads.layers.at("head.policy").values() == plain.logits.values());
    CHECK(heads.layers.at("head.value")[0] == plain.value);
  }

  TEST_CASE("captured block1.conv matches the layer kernel directly") {
    const auto x = seed42_observation();
    const auto trace = nn::forward_with_capture(impala(), seed0_weights(), x, {"block1.conv"});
    const auto& p = seed0_weights().at("block1.conv");
    CHECK(oracle::max_abs_diff(trace.layers.at("block1.conv").data(), oracle::conv3x3(x, p.kernel, p.bias).data()) <
          1e-5);
  }

  TEST_CASE("repeated forwards are bit-identical") {
    const auto x = seed42_observation();
    const auto a = nn::forward_with_capture(impala(), seed0_weights(), x, {"block3.res2.resadd"});
    const auto b = nn::forward_with_capture(impala(), seed0_weights(), x, {"block3.res2.resadd"});
    CHECK(a.logits.bitwise_equal(b.logits));
    CHECK(a.layers.at("block3.res2.resadd").bitwise_equal(b.layers.at("block3.res2.resadd")));
  }

  TEST_CASE("float64 route agrees with the float32 forward") {
    const auto x = seed42_observation();
    const auto trace = nn::forward_with_capture(impala(), seed0_weights(), x);
    const std::vector<double> xd(x.data().begin(), x.data().end());
    const auto l64 = nn::logits_f64(impala(), seed0_weights(), xd);
    for (int i = 0; i < 15; ++i) CHECK(std::abs(l64[i] - trace.logits[i]) < 1e-5);
  }

  TEST_CASE("wrong input shape is a configuration error") {
    CHECK(error_code_of([] { nn::forward_with_capture(impala(), seed0_weights(), Tensor({3, 32, 32})); }) ==
          ErrorCode::kConfiguration);
  }
}

TEST_SUITE("gradients") {
  TEST_CASE("target values") {
    const std::vector<float> logits{0.0f, std::log(3.0f)};
    CHECK(nn::evaluate_target(logits, nn::LogitTarget{1}) == doctest::Approx(std::log(3.0)));
    CHECK(nn::evaluate_target(logits, nn::ProbabilityTarget{1}) == doctest::Approx(0.75));
    CHECK(nn::evaluate_target(logits, nn::ProbabilityGroupTarget{{0, 1}}) == doctest::Approx(1.0));
  }

  TEST_CASE("backward matches central differences away from kinks") {
    std::mt19937_64 rng(99);
    const auto x = oracle::random_tensor(impala().input_shape(), rng, 0.0f, 1.0f);
    const std::vector<nn::GradientTarget> targets{nn::LogitTarget{3}, nn::ProbabilityTarget{7},
                                                  nn::ProbabilityGroupTarget{{0, 1, 2}}};
    const auto check = oracle::check_gradients(impala(), seed0_weights(), x, targets, 4, rng);
    CHECK(check.samples.size() == 12);
    CHECK(check.worst < 1e-2);
  }

  TEST_CASE("gradient of the total probability vanishes") {
    const auto ctx = nn::forward_for_gradient(impala(), seed0_weights(), seed42_observation());
    const auto g = nn::backward_to_input(impala(), seed0_weights(), ctx, nn::LogitTarget{0});
    CHECK(g.shape() == impala().input_shape());
    CHECK(g.all_finite());
    std::vector<std::size_t> all(15);
    std::iota(all.begin(), all.end(), 0);
    const auto gsum = nn::backward_to_input(impala(), seed0_weights(), ctx, nn::ProbabilityGroupTarget{all});
    double worst = 0;
    for (float v : gsum.data()) worst = std::max(worst, static_cast<double>(std::abs(v)));
    CHECK(worst < 1e-6);
  }

  TEST_CASE("out-of-range target index") {
    const auto ctx = nn::forward_for_gradient(impala(), seed0_weights(), seed42_observation());
    CHECK(error_code_of([&] { nn::backward_to_input(impala(), seed0_weights(), ctx, nn::LogitTarget{15}); }) ==
          ErrorCode::kRange);
  }
}

TEST_SUITE("IMPW weights") {
  TEST_CASE("init is reproducible and fan-in bounded") {
    const auto a = nn::init_random_weights(impala(), 0);
    CHECK(a == seed0_weights());
    CHECK(a.checksum() == 752547208u);
    CHECK(nn::init_random_weights(impala(), 1).checksum() != a.checksum());
    const float bound = 1.0f / std::sqrt(3.0f * 9.0f);
    for (float v : a.at("block1.conv").kernel.data()) CHECK(std::abs(v) <= bound);
  }

  TEST_CASE("encoded length follows the record layout") {
    const auto bytes = nn::encode_impw(seed0_weights());
    std::size_t expected = 4 + 4 + 4 + 4;
    for (const auto& [name, p] : seed0_weights().entries()) {
      for (const auto* t : {&p.kernel, &p.bias}) {
        const std::size_t name_len = name.size() + (t == &p.kernel ? 7 : 5);
        expected += 2 + name_len + 1 + 4 * t->rank() + 4 * t->numel();
      }
    }
    CHECK(bytes.size() == expected);
    CHECK(bytes.substr(0, 4) == "IMPW");
  }

  TEST_CASE("file round trip is bitwise exact") {
    testutil::TempDir dir("impw");
    nn::save_weights(seed0_weights(), dir / "w.impw");
    const auto back = nn::load_weights(dir / "w.impw", impala());
    CHECK(back == seed0_weights());
    CHECK(nn::encode_impw(back) == nn::encode_impw(seed0_weights()));
  }

  TEST_CASE("corruption is detected") {
    auto bytes = nn::encode_impw(seed0_weights());
    auto flipped = bytes;
    flipped[flipped.size() / 2] ^= 0x01;
    CHECK(error_code_of([&] { nn::decode_impw(flipped); }) == ErrorCode::kFormat);
    CHECK(error_code_of([&] { nn::decode_impw(bytes.substr(0, bytes.size() - 9)); }) == ErrorCode::kFormat);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK(error_code_of([&] { nn::decode_impw(bad_magic); }) == ErrorCode::kFormat);
  }

  TEST_CASE("missing or mis-shaped layers fail validation") {
    auto store = seed0_weights();
    store.set("block1.conv", {Tensor({64, 3, 3, 3}), Tensor({63})});
    CHECK(error_code_of([&] { nn::validate_weights(store, impala()); }) == ErrorCode::kConfiguration);
    CHECK(error_code_of([] { nn::validate_weights(nn::WeightStore{}, impala()); }) == ErrorCode::kConfiguration);
    CHECK(error_code_of([] { nn::load_weights("/nonexistent/w.impw"); }) == ErrorCode::kIo);
  }
}
