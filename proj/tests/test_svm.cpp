#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "roadcross/rng.hpp"
#include "roadcross/svm.hpp"

using namespace roadcross;

namespace {

svm::LinearSvmModel manual_model(std::vector<double> weights, double bias,
                                 double threshold = 0.5)
{
    svm::LinearSvmModel m;
    m.weights = std::move(weights);
    m.bias = bias;
    m.threshold = threshold;
    m.scaler.min.assign(m.weights.size(), 0.0); // identity scaling
    m.scaler.max.assign(m.weights.size(), 1.0);
    return m;
}

// Duplicates every positive sample once, appended in order.
void duplicate_positives(std::vector<std::vector<double>>& X, std::vector<int>& y)
{
    const std::size_t n = X.size();
    for (std::size_t i = 0; i < n; ++i)
        if (y[i] == 1) {
            X.push_back(X[i]);
            y.push_back(1);
        }
}

} // namespace

TEST_CASE("separable toy set trains to full accuracy")
{
    Rng rng(1);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
        X.push_back({rng.range(1.0, 4.0), rng.range(-2.0, 2.0)});
        y.push_back(1);
        X.push_back({rng.range(-4.0, -1.0), rng.range(-2.0, 2.0)});
        y.push_back(0);
    }
    svm::SvmTrainConfig cfg;
    cfg.epochs = 100;
    cfg.rng_seed = 3;
    const auto model = svm::train(X, y, {1.0, 1.0}, cfg);
    for (std::size_t i = 0; i < X.size(); ++i)
        CHECK(svm::predict(model, X[i]) == y[i]);
}

TEST_CASE("symmetric data with equal class weights keeps the bias near zero")
{
    Rng rng(2);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> x{rng.range(0.5, 2.0), rng.range(-1.0, 1.0)};
        X.push_back(x);
        y.push_back(1);
        X.push_back({-x[0], -x[1]});
        y.push_back(0);
    }
    svm::SvmTrainConfig cfg;
    cfg.regularization_lambda = 0.5;
    cfg.epochs = 2000;
    cfg.rng_seed = 7;
    // scaled_columns 0 keeps the fixture symmetric around the origin
    const auto model = svm::train(X, y, {1.0, 1.0}, cfg, 0);
    CHECK(std::abs(model.bias) < 0.1);
}

TEST_CASE("weighted loss equals unit-weight loss on the duplicated dataset")
{
    Rng rng(5);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) {
        X.push_back({rng.range(-3.0, 3.0), rng.range(-3.0, 3.0),
                     rng.range(-3.0, 3.0)});
        y.push_back(static_cast<int>(rng.index(2)));
    }
    svm::SvmTrainConfig cfg;
    cfg.epochs = 60;
    cfg.rng_seed = 11;
    auto model = svm::train(X, y, {1.0, 2.0}, cfg, 0);

    auto X_dup = X;
    auto y_dup = y;
    duplicate_positives(X_dup, y_dup);
    auto unit_model = model;
    unit_model.class_weights = {1.0, 1.0};

    const double weighted = svm::training_loss(model, X, y, cfg.regularization_lambda);
    const double duplicated =
        svm::training_loss(unit_model, X_dup, y_dup, cfg.regularization_lambda);
    CHECK(std::abs(weighted - duplicated) < 1e-9);
}

TEST_CASE("integer class weights reproduce duplication for any weight vector")
{
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> X;
        std::vector<int> y;
        const int n = 5 + static_cast<int>(rng.index(15));
        for (int i = 0; i < n; ++i) {
            X.push_back({rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)});
            y.push_back(static_cast<int>(rng.index(2)));
        }
        auto model = manual_model({rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)},
                                  rng.range(-1.0, 1.0));
        model.class_weights = {1.0, 2.0};

        auto X_dup = X;
        auto y_dup = y;
        duplicate_positives(X_dup, y_dup);
        auto unit = model;
        unit.class_weights = {1.0, 1.0};

        CHECK(std::abs(svm::training_loss(model, X, y, 1e-4) -
                       svm::training_loss(unit, X_dup, y_dup, 1e-4)) < 1e-9);
    }
}

TEST_CASE("training is deterministic in the config seed")
{
    Rng rng(8);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
        X.push_back({rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)});
        y.push_back(static_cast<int>(rng.index(2)));
    }
    svm::SvmTrainConfig cfg;
    cfg.rng_seed = 99;
    const auto a = svm::train(X, y, {1.0, 1.5}, cfg);
    const auto b = svm::train(X, y, {1.0, 1.5}, cfg);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    cfg.rng_seed = 100;
    const auto c = svm::train(X, y, {1.0, 1.5}, cfg);
    CHECK(a.weights != c.weights);
}

TEST_CASE("score is the logistic link on the margin")
{
    const auto model = manual_model({1.0, 0.0}, 0.0);
    CHECK(svm::score(model, {0.0, 0.3}) == 0.5);
    CHECK(svm::score(model, {30.0, 0.0}) > 0.999999);
    CHECK(svm::score(model, {-2.0, 0.0}) ==
          doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-12));
}

TEST_CASE("predict thresholds the score with ties unsafe")
{
    const auto model = manual_model({1.0}, 0.0);
    CHECK(svm::predict(model, {0.05}) == 1);  // score just above 0.5
    CHECK(svm::predict(model, {0.0}) == 0);   // exactly at the threshold
    CHECK(svm::predict(model, {-1.5}) == 0);
}

TEST_CASE("predict agrees with the margin sign at threshold 0.5")
{
    Rng rng(12);
    const auto model = manual_model({rng.range(-1.0, 1.0), rng.range(-1.0, 1.0),
                                     rng.range(-1.0, 1.0)},
                                    rng.range(-0.5, 0.5));
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x{rng.range(-5.0, 5.0), rng.range(-5.0, 5.0),
                                    rng.range(-5.0, 5.0)};
        double margin = model.bias;
        for (std::size_t j = 0; j < x.size(); ++j)
            margin += model.weights[j] * x[j];
        CHECK(svm::predict(model, x) == (margin > 0.0 ? 1 : 0));
    }
}

TEST_CASE("training rejects bad input")
{
    CHECK_THROWS_AS(svm::train({{1.0}, {2.0}}, {1, 1}, {1.0, 1.0}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(svm::train({{1.0}}, {1}, {1.0, 1.0}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(svm::train({{1.0}, {2.0, 3.0}}, {1, 0}, {1.0, 1.0}, {}),
                    std::invalid_argument);
    const auto model = manual_model({1.0, 1.0}, 0.0);
    CHECK_THROWS_AS(svm::score(model, {1.0}), std::invalid_argument);
}

TEST_CASE("multi-frame chain")
{
    // Single-frame model on 2-d vectors, multi-frame model on 2 + (k-1).
    const int k = 3;
    const auto sf = manual_model({2.0, -1.0}, -0.5);
    const auto mf = manual_model({1.0, 1.0, -2.0, 3.0}, 0.25);

    Rng rng(21);
    std::vector<std::vector<double>> frames;
    for (int n = 0; n < 20; ++n)
        frames.push_back({rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)});

    const auto got = svm::predict_multiframe_video(sf, mf, frames, k);
    REQUIRE(got.size() == frames.size());

    // Independent hand-stepped execution of the chain.
    std::vector<int> sf_preds;
    for (const auto& f : frames) {
        const double margin = 2.0 * f[0] - 1.0 * f[1] - 0.5;
        sf_preds.push_back(1.0 / (1.0 + std::exp(-margin)) > 0.5 ? 1 : 0);
    }
    for (int n = 0; n < 20; ++n) {
        const double p0 = n - 2 >= 0 ? sf_preds[n - 2] : 0;
        const double p1 = n - 1 >= 0 ? sf_preds[n - 1] : 0;
        const double margin =
            frames[n][0] + frames[n][1] - 2.0 * p0 + 3.0 * p1 + 0.25;
        const int expected = 1.0 / (1.0 + std::exp(-margin)) > 0.5 ? 1 : 0;
        CHECK(got[static_cast<std::size_t>(n)] == expected);
    }

    SUBCASE("k = 1 degenerates to the multi-frame model alone")
    {
        const auto mf1 = manual_model({1.0, -1.0}, 0.0);
        const auto direct = svm::predict_multiframe_video(sf, mf1, frames, 1);
        for (int n = 0; n < 20; ++n)
            CHECK(direct[static_cast<std::size_t>(n)] ==
                  svm::predict(mf1, frames[static_cast<std::size_t>(n)]));
    }
    SUBCASE("k < 1 is an error")
    {
        CHECK_THROWS_AS(svm::predict_multiframe_video(sf, mf, frames, 0),
                        std::invalid_argument);
    }
}

TEST_CASE("class weights from counts")
{
    const auto w = svm::class_weights_from_counts(1920, 1000);
    CHECK(w.unsafe_weight == 1.0);
    CHECK(w.safe_weight == doctest::Approx(1.92));
    CHECK_THROWS_AS(svm::class_weights_from_counts(5, 0), std::invalid_argument);
}

TEST_CASE("model file round trip preserves every value")
{
    Rng rng(33);
    svm::LinearSvmModel model;
    for (int j = 0; j < 24; ++j) {
        model.weights.push_back(rng.range(-2.0, 2.0));
        model.scaler.min.push_back(rng.range(-10.0, 0.0));
        model.scaler.max.push_back(rng.range(0.0, 10.0));
    }
    model.bias = rng.range(-1.0, 1.0);
    model.threshold = 0.5;
    model.class_weights = {1.0, 1.92};

    const auto dir = std::filesystem::temp_directory_path() / "roadcross_svm";
    std::filesystem::create_directories(dir);
    svm::save_model(model, dir / "m.svm");
    const auto loaded = svm::load_model(dir / "m.svm");
    CHECK(loaded.weights == model.weights);
    CHECK(loaded.bias == model.bias);
    CHECK(loaded.threshold == model.threshold);
    CHECK(loaded.scaler.min == model.scaler.min);
    CHECK(loaded.scaler.max == model.scaler.max);
    CHECK(loaded.class_weights.safe_weight == model.class_weights.safe_weight);
    std::filesystem::remove_all(dir);
}
