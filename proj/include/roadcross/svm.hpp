#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "roadcross/features.hpp"

namespace roadcross::svm {

struct SvmTrainConfig {
    double regularization_lambda = 1e-4;
    int epochs = 50;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct ClassWeights {
    double unsafe_weight = 1.0; // per-sample weight for label 0
    double safe_weight = 1.0;   // per-sample weight for label 1
};

// Linear SVM with a logistic link on the margin. Inputs to score/predict are
// raw feature vectors; the stored scaler is applied internally.
struct LinearSvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    features::ScalerParams scaler;
    double threshold = 0.5;
    ClassWeights class_weights;

    std::size_t dim() const { return weights.size(); }
};

// Pegasos-style seeded stochastic subgradient descent on the weighted hinge
// loss with step size 1/(lambda * t). The first `scaled_columns` columns are
// min-max scaled from the training data (all columns when negative); the
// rest pass through unscaled (used for appended prediction-label columns,
// already in [0,1]). Deterministic given (X, y, weights, config).
LinearSvmModel train(const std::vector<std::vector<double>>& X,
                     const std::vector<int>& y, ClassWeights class_weights,
                     const SvmTrainConfig& config, int scaled_columns = -1);

// (lambda/2)*||w||^2 + sum_i c_i * max(0, 1 - y_i * (w.x_i + b)) with x_i
// scaled by the model scaler, y in {-1,+1}, c the class weight of sample i.
double training_loss(const LinearSvmModel& model,
                     const std::vector<std::vector<double>>& X,
                     const std::vector<int>& y, double lambda);

// 1 / (1 + exp(-(w.x + b))) in (0,1); 0.5 exactly at zero margin.
double score(const LinearSvmModel& model, const std::vector<double>& x);

// 1 (safe) iff score strictly exceeds the threshold; ties are unsafe.
int predict(const LinearSvmModel& model, const std::vector<double>& x);

// Sliding-window chain: frame n's multi-frame vector takes the single-frame
// model's predictions on frames n-(k-1)..n-1, padded with 0 (unsafe) before
// the start of the video, then the multi-frame model decides. `raw_frames`
// holds one unscaled single-frame vector per frame of one contiguous video.
std::vector<int>
predict_multiframe_video(const LinearSvmModel& single_frame_model,
                         const LinearSvmModel& multi_frame_model,
                         const std::vector<std::vector<double>>& raw_frames,
                         int k);

// w_safe = n_unsafe / n_safe with w_unsafe fixed to 1.
ClassWeights class_weights_from_counts(long long n_unsafe, long long n_safe);

// Plain-text model file:
//   line 1: dim threshold w_unsafe w_safe
//   line 2: bias
//   line 3: weights
//   line 4: scaler mins
//   line 5: scaler maxs
void save_model(const LinearSvmModel& model, const std::filesystem::path& path);
LinearSvmModel load_model(const std::filesystem::path& path);

} // namespace roadcross::svm
