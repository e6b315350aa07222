#include <doctest.h>

#include <cmath>

#include "crslearn/binarizer.hpp"
#include "crslearn/errors.hpp"
#include "crslearn/metrics.hpp"
#include "crslearn/trainer.hpp"
#include "test_support.hpp"

using namespace crslearn;

TEST_SUITE_BEGIN("trainer");

namespace {

BinarizedDataset xor_data(std::size_t copies = 32) {
    const RawDataset raw = parse_csv(testsupport::xor_csv(copies), "target");
    return binarize(raw, fit_discretizer(raw));
}

TrainConfig xor_config(double rb_rate, std::uint64_t seed = 0) {
    TrainConfig cfg;
    cfg.layer_widths = {4, 16, 2};
    cfg.rb_rate = rb_rate;
    cfg.optimizer = Optimizer::adam;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("xor trains to a perfect extracted rule set") {
    const BinarizedDataset data = xor_data();
    REQUIRE(data.binary_feature_count() == 4);
    REQUIRE(data.n() == 128);

    std::vector<double> epoch_loss;
    TrainOptions opts;
    opts.log = [&](const EpochLog& e) { epoch_loss.push_back(e.mean_loss); };

    const MllpModel model = train(init_model(xor_config(0.8)), data, opts);
    const CrsModel crs = extract_crs(model, 0.5);
    const CrsEvaluation eval = evaluate_crs(crs, data);
    CHECK(eval.f1 == 1.0);

    // exhaustive over the 4 distinct inputs
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(predict(crs, data.features.row(i)) == data.label_ids[i]);
    }

    // loss decreases: epoch 50 strictly below epoch 1
    REQUIRE(epoch_loss.size() == 400);
    CHECK(epoch_loss[49] < epoch_loss[0]);
}

TEST_CASE("P=1 with all weights below threshold freezes the model") {
    const BinarizedDataset data = xor_data(4);
    TrainConfig cfg = xor_config(1.0);
    cfg.epochs = 10;
    const MllpModel before = init_model(cfg);
    for (const auto& layer : before.layers) {
        for (double w : layer.w.data) REQUIRE(w < 0.5);
    }
    const MllpModel after = train(before, data);
    for (std::size_t l = 0; l < before.layers.size(); ++l) {
        CHECK(after.layers[l].w == before.layers[l].w);  // bitwise
    }
}

TEST_CASE("same seed and config give identical final weights") {
    const BinarizedDataset data = xor_data(8);
    TrainConfig cfg = xor_config(0.7, 42);
    cfg.epochs = 30;
    const MllpModel a = train(init_model(cfg), data);
    const MllpModel b = train(init_model(cfg), data);
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        CHECK(a.layers[l].w == b.layers[l].w);
    }
}

TEST_CASE("masked entries are bitwise frozen and keep continuous values") {
    const BinarizedDataset data = xor_data(8);
    TrainConfig cfg = xor_config(0.5, 7);
    cfg.epochs = 1;
    const MllpModel before = init_model(cfg);

    // reproduce the first epoch's mask draw: the trainer samples masks from
    // Rng(mix_seed(seed, 0x7e41)) before shuffling
    Rng mask_rng(mix_seed(cfg.seed, 0x7e41));
    const MaskSet masks = sample_masks(before, cfg.rb_rate, mask_rng);

    const MllpModel after = train(before, data);
    std::size_t frozen = 0, moved = 0;
    for (std::size_t l = 0; l < before.layers.size(); ++l) {
        for (std::size_t i = 0; i < masks.masks[l].data.size(); ++i) {
            const double b = before.layers[l].w.data[i];
            const double a = after.layers[l].w.data[i];
            if (masks.masks[l].data[i]) {
                CHECK(a == b);  // bitwise unchanged, still the continuous value
                ++frozen;
            } else if (a != b) {
                ++moved;
            }
        }
    }
    CHECK(frozen > 0);
    CHECK(moved > 0);  // unmasked entries did update
}

TEST_CASE("weights stay in [0,1] after every step") {
    // one batch per epoch makes each train() call a single optimizer step
    const BinarizedDataset data = xor_data(1);
    TrainConfig cfg = xor_config(0.5, 3);
    cfg.epochs = 1;
    cfg.batch_size = 4;
    cfg.lr = 0.5;  // large steps so clipping actually engages
    cfg.optimizer = Optimizer::sgd;

    MllpModel model = init_model(cfg);
    for (int step = 0; step < 20; ++step) {
        cfg.seed = 100 + step;
        model.config = cfg;
        model = train(std::move(model), data);
        for (const auto& layer : model.layers) {
            for (double w : layer.w.data) {
                CHECK(w >= 0.0);
                CHECK(w <= 1.0);
            }
        }
    }
}

TEST_CASE("plain gradient descent is the default and moves weights") {
    const BinarizedDataset data = xor_data(8);
    TrainConfig cfg = xor_config(0.0, 5);
    cfg.optimizer = Optimizer::sgd;
    cfg.epochs = 20;
    const MllpModel before = init_model(cfg);
    const MllpModel after = train(before, data);
    double delta = 0.0;
    for (std::size_t l = 0; l < before.layers.size(); ++l) {
        for (std::size_t i = 0; i < before.layers[l].w.data.size(); ++i) {
            delta += std::abs(after.layers[l].w.data[i] - before.layers[l].w.data[i]);
        }
    }
    CHECK(delta > 0.0);
    CHECK(TrainConfig{}.optimizer == Optimizer::sgd);
}

TEST_CASE("non-finite loss aborts with diagnostics") {
    const BinarizedDataset data = xor_data(2);
    TrainConfig cfg = xor_config(0.0, 1);
    cfg.epochs = 1;
    MllpModel model = init_model(cfg);
    model.layers[0].w(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(train(std::move(model), data), NumericError);
}

TEST_CASE("extraction binarizes strictly above the threshold") {
    MllpModel model = init_model(xor_config(0.8));
    model.widths = {2, 2, 2};
    model.layers.resize(2);
    model.layers[0].kind = LayerKind::conjunction;
    model.layers[0].w = Matrix(2, 2);
    model.layers[0].w(0, 0) = 0.9;
    model.layers[0].w(0, 1) = 0.1;
    model.layers[0].w(1, 0) = 0.4;
    model.layers[0].w(1, 1) = 0.6;
    model.layers[1].kind = LayerKind::disjunction;
    model.layers[1].w = Matrix(2, 2, 0.5);  // exactly T stays 0
    model.config.layer_widths = {2, 2, 2};

    const CrsModel crs = extract_crs(model, 0.5);
    CHECK(crs.layers[0](0, 0) == 1);
    CHECK(crs.layers[0](0, 1) == 0);
    CHECK(crs.layers[0](1, 0) == 0);
    CHECK(crs.layers[0](1, 1) == 1);
    CHECK(crs.layers[1].count_ones() == 0);

    // idempotence: re-extracting a binary model changes nothing
    MllpModel binary = model;
    for (auto& layer : binary.layers) {
        for (double& w : layer.w.data) w = w > 0.5 ? 1.0 : 0.0;
    }
    const CrsModel again = extract_crs(binary, 0.5);
    for (std::size_t l = 0; l < crs.layers.size(); ++l) {
        CHECK(again.layers[l] == crs.layers[l]);
    }
}

TEST_CASE("extraction records the training majority as fallback") {
    const std::string csv = "f,y\na,0\na,0\nb,1\na,0\nb,1\n";  // 3 zeros, 2 ones
    const RawDataset raw = parse_csv(csv, "y");
    const BinarizedDataset data = binarize(raw, fit_discretizer(raw));
    TrainConfig cfg;
    cfg.layer_widths = {2, 4, 2};
    cfg.epochs = 1;
    const MllpModel model = train(init_model(cfg), data);
    CHECK(model.majority_class == 0);
    CHECK(extract_crs(model, 0.5).fallback_class == 0);
}

TEST_CASE("training dimension mismatches are rejected") {
    const BinarizedDataset data = xor_data(2);
    TrainConfig cfg;
    cfg.layer_widths = {5, 8, 2};  // J is 4, not 5
    CHECK_THROWS_AS(train(init_model(cfg), data), DimensionError);
    cfg.layer_widths = {4, 8, 3};  // C is 2, not 3
    CHECK_THROWS_AS(train(init_model(cfg), data), DimensionError);
}

TEST_SUITE_END();
