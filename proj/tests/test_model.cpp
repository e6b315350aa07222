#include <doctest.h>

#include "crslearn/errors.hpp"
#include "crslearn/model.hpp"
#include "crslearn/trainer.hpp"
#include "test_support.hpp"

using namespace crslearn;

TEST_SUITE_BEGIN("model");

namespace {

TrainConfig small_config(std::vector<std::size_t> widths, std::uint64_t seed = 0) {
    TrainConfig cfg;
    cfg.layer_widths = std::move(widths);
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("init_model shapes, range and determinism") {
    const TrainConfig cfg = small_config({4, 8, 8, 8, 2}, 11);
    const MllpModel a = init_model(cfg);
    const MllpModel b = init_model(cfg);

    REQUIRE(a.layers.size() == 4);
    CHECK(a.layers[0].w.rows == 8);
    CHECK(a.layers[0].w.cols == 4);
    CHECK(a.layers[1].w.rows == 8);
    CHECK(a.layers[1].w.cols == 8);
    CHECK(a.layers[3].w.rows == 2);
    CHECK(a.layers[3].w.cols == 8);
    CHECK(a.layers[0].kind == LayerKind::conjunction);
    CHECK(a.layers[1].kind == LayerKind::disjunction);
    CHECK(a.layers[3].kind == LayerKind::disjunction);

    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        CHECK(a.layers[l].w == b.layers[l].w);  // bitwise identical
        for (double w : a.layers[l].w.data) {
            CHECK(w >= 0.0);
            CHECK(w < 0.1);
        }
    }

    const MllpModel c = init_model(small_config({4, 8, 8, 8, 2}, 12));
    CHECK_FALSE(c.layers[0].w == a.layers[0].w);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(init_model(small_config({4, 8})), ConfigError);       // even count
    CHECK_THROWS_AS(init_model(small_config({4, 0, 2})), ConfigError);    // zero width
    TrainConfig bad = small_config({4, 8, 2});
    bad.threshold = 1.0;
    CHECK_THROWS_AS(init_model(bad), ConfigError);
    bad = small_config({4, 8, 2});
    bad.rb_rate = 1.5;
    CHECK_THROWS_AS(init_model(bad), ConfigError);
}

TEST_CASE("default hidden width heuristic") {
    CHECK(TrainConfig::default_hidden_width(4) == 32);
    CHECK(TrainConfig::default_hidden_width(27) == 64);    // 2J = 54 -> 64
    CHECK(TrainConfig::default_hidden_width(117) == 256);  // capped
    CHECK(TrainConfig::make_widths(27, 2, 4, 64) ==
          std::vector<std::size_t>{27, 64, 64, 64, 2});
}

TEST_CASE("sample_masks endpoints and concentration") {
    const MllpModel model = init_model(small_config({50, 100, 100, 100, 2}, 3));
    Rng rng(17);

    const MaskSet zeros = sample_masks(model, 0.0, rng);
    for (const auto& m : zeros.masks) {
        CHECK(m.count_ones() == 0);
    }
    const MaskSet ones = sample_masks(model, 1.0, rng);
    for (const auto& m : ones.masks) {
        CHECK(m.count_ones() == m.data.size());
    }

    // 10000+ entries at P=0.8: the 1-fraction concentrates within 5 sigma
    const MaskSet p8 = sample_masks(model, 0.8, rng);
    std::size_t total = 0, set = 0;
    for (const auto& m : p8.masks) {
        total += m.data.size();
        set += m.count_ones();
    }
    REQUIRE(total >= 10000);
    const double frac = double(set) / double(total);
    CHECK(frac >= 0.78);
    CHECK(frac <= 0.82);
}

TEST_CASE("effective_weights") {
    Matrix w(1, 2);
    w(0, 0) = 0.7;
    w(0, 1) = 0.3;

    BinMatrix all(1, 2, 1);
    Matrix e = effective_weights(w, all, 0.5);
    CHECK(e(0, 0) == 1.0);
    CHECK(e(0, 1) == 0.0);

    BinMatrix none(1, 2, 0);
    CHECK(effective_weights(w, none, 0.5) == w);

    BinMatrix mixed(1, 2, 0);
    mixed(0, 0) = 1;
    e = effective_weights(w, mixed, 0.5);
    CHECK(e(0, 0) == 1.0);
    CHECK(e(0, 1) == 0.3);

    BinMatrix wrong(2, 2, 0);
    CHECK_THROWS_AS(effective_weights(w, wrong, 0.5), DimensionError);
}

TEST_CASE("forward at binary weights equals the discrete rule evaluation") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t j = 3 + rng.below(6);
        MllpModel model = init_model(small_config({j, 5, 4, 3, 2}, 77 + trial));
        for (auto& layer : model.layers) {
            for (double& w : layer.w.data) w = rng.bernoulli(0.4) ? 1.0 : 0.0;
        }
        const CrsModel crs = extract_crs(model, 0.5);
        const MaskSet no_masks = MaskSet::zeros_like(model);
        for (int k = 0; k < 20; ++k) {
            std::vector<std::uint8_t> x(j);
            for (auto& b : x) b = rng.bernoulli(0.5) ? 1 : 0;
            const std::vector<double> xd(x.begin(), x.end());
            const auto out = mllp_output(model, no_masks, xd);
            const auto ref = crs_output(crs, x);
            for (std::size_t c = 0; c < out.size(); ++c) {
                CHECK(out[c] == double(ref[c]));  // exact at binary points
            }
        }
    }
}

TEST_CASE("all-zero conjunction row outputs 1; outputs stay in range") {
    MllpModel model = init_model(small_config({3, 2, 2}, 5));
    std::fill(model.layers[0].w.row(0).begin(), model.layers[0].w.row(0).end(), 0.0);
    const std::vector<double> x{1, 0, 1};
    const auto acts = mllp_forward(model, MaskSet::zeros_like(model), x);
    CHECK(acts[1][0] == 1.0);

    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        MllpModel m = init_model(small_config({4, 6, 6, 6, 3}, 100 + trial));
        for (auto& layer : m.layers) {
            for (double& w : layer.w.data) w = rng.uniform();
        }
        std::vector<double> in(4);
        for (auto& v : in) v = rng.uniform();
        for (const auto& layer_vals : mllp_forward(m, MaskSet::zeros_like(m), in)) {
            for (double v : layer_vals) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("loss hand cases") {
    std::vector<WeightLayer> no_layers;

    Matrix out(1, 2), label(1, 2);
    out(0, 0) = 1.0;
    label(0, 0) = 1.0;
    CHECK(mllp_loss(out, label, no_layers, 0.0) == doctest::Approx(0.0));

    out(0, 0) = 0.5;
    out(0, 1) = 0.5;
    CHECK(mllp_loss(out, label, no_layers, 0.0) == doctest::Approx(0.25));

    // zero weights contribute nothing to the regularizer
    std::vector<WeightLayer> zero_layers(1);
    zero_layers[0].w = Matrix(2, 2, 0.0);
    CHECK(mllp_loss(out, label, zero_layers, 0.5) == doctest::Approx(0.25));

    zero_layers[0].w(0, 0) = 2.0;
    CHECK(mllp_loss(out, label, zero_layers, 0.5) == doctest::Approx(0.25 + 0.5 * 4.0));
}

TEST_SUITE_END();
