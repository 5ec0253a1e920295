#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roadcross/scene_sim.hpp"

namespace roadcross::cnn {

// Dense float tensor in row-major height -> width -> channel order.
struct Tensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> data;

    static Tensor zeros(int h, int w, int c)
    {
        Tensor t{h, w, c, {}};
        t.data.assign(static_cast<std::size_t>(h) * w * c, 0.0f);
        return t;
    }
    float& at(int y, int x, int c)
    {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float at(int y, int x, int c) const
    {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t size() const { return data.size(); }
};

enum class LayerKind {
    conv2d,
    batchnorm,
    relu,
    maxpool,
    global_avg_pool,
    dense,
    sigmoid,
    dropout,
};

enum class Padding { same, valid };

struct LayerSpec {
    LayerKind kind = LayerKind::relu;
    // conv2d
    int out_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    int stride = 1;
    int dilation = 1;
    Padding padding = Padding::same;
    // maxpool
    int pool = 0;
    int pool_stride = 0;
    // dense
    int units = 0;
    // dropout (identity at inference)
    double rate = 0.0;
    // batchnorm
    double epsilon = 1e-3;
};

struct NetworkSpec {
    std::string name = "custom";
    int input_h = 0;
    int input_w = 0;
    int input_c = 0;
    std::vector<LayerSpec> layers;
};

struct Shape3 {
    int h = 0;
    int w = 0;
    int c = 0;
    std::size_t elements() const
    {
        return static_cast<std::size_t>(h) * w * c;
    }
};

// Output shape of one layer; throws naming the layer on any inconsistency.
Shape3 layer_output_shape(const LayerSpec& layer, Shape3 in, int layer_index);

// Walks the whole chain and enforces that the network ends in a sigmoid over
// a single unit. Returns the per-layer output shapes.
std::vector<Shape3> validate_shapes(const NetworkSpec& spec);

// Number of weight values the layer consumes. Layout:
//   conv2d:    kernels [kh][kw][cin][cout], then bias [cout]
//   batchnorm: gamma [c], beta [c], moving mean [c], moving var [c]
//   dense:     matrix [in][units] row-major, then bias [units]
//   others:    0
std::size_t layer_param_count(const LayerSpec& layer, Shape3 in);

// Cross-correlation with tap spacing = dilation. Same padding follows the
// ceil(in/stride) rule with the extra pad at bottom/right; valid padding
// requires the effective kernel to fit. im2col + GEMM fast path.
Tensor conv2d(const Tensor& input, const float* kernels, const float* bias,
              int out_channels, int kernel_h, int kernel_w, int stride,
              int dilation, Padding padding);

// Direct quadruple-loop implementation with the same tap accumulation order;
// kept as the slow reference for equivalence checks.
Tensor conv2d_reference(const Tensor& input, const float* kernels,
                        const float* bias, int out_channels, int kernel_h,
                        int kernel_w, int stride, int dilation, Padding padding);

Tensor batchnorm_infer(const Tensor& input, const float* gamma,
                       const float* beta, const float* mean, const float* var,
                       float epsilon);
Tensor relu(const Tensor& input);
Tensor maxpool(const Tensor& input, int pool, int stride);
Tensor global_avg_pool(const Tensor& input);
// Flattens the input and applies the affine map.
Tensor dense(const Tensor& input, const float* weights, const float* bias,
             int units);
Tensor sigmoid(const Tensor& input);
inline Tensor dropout_infer(const Tensor& input) { return input; }

struct Network {
    NetworkSpec spec;
    std::vector<std::vector<float>> layer_weights; // one blob per layer
};

// Runs the full chain; the scalar output of the final sigmoid unit.
double forward(const Network& network, const Tensor& image);
// Same, returning every layer's output (for inspection/tests).
std::vector<Tensor> forward_all_layers(const Network& network,
                                       const Tensor& image);

struct LayerRf {
    int rf = 1;   // receptive field side length, in input pixels
    int jump = 1; // input-pixel distance between adjacent outputs
};

// Standard recurrence rf += (k_eff - 1) * jump, jump *= stride, with
// k_eff = k + (k-1)(dilation-1); pooling counts as a kernel; non-spatial
// layers leave the values unchanged. One entry per layer.
std::vector<LayerRf> receptive_field(const NetworkSpec& spec);

// Text spec file, one layer per line (see README for the grammar).
NetworkSpec parse_network_spec(const std::filesystem::path& path);

// Binary weights: per layer in spec order, a little-endian u64 element count
// followed by that many little-endian float32 values. Parameterless layers
// store count 0. Any mismatch with the spec is a load error.
Network load_network(const std::filesystem::path& spec_path,
                     const std::filesystem::path& weights_path);
void save_weights(const Network& network, const std::filesystem::path& path);

// Seeded uniform init scaled by fan-in; batchnorm gets identity parameters.
Network random_network(const NetworkSpec& spec, std::uint64_t seed);

// w_safe = n_unsafe / n_safe. Throws when either count is not positive.
double compute_class_weight(long long n_unsafe, long long n_safe);
// Two-decimal rendering used wherever the weight is echoed to configs/logs.
std::string format_class_weight(double weight);

// White boxes on black, all three channels, at native frame resolution.
Tensor rasterize_boxes(const sim::FrameRecord& frame, int frame_width,
                       int frame_height);
Tensor nearest_resize(const Tensor& input, int out_h, int out_w);

} // namespace roadcross::cnn
