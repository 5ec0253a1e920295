#include "roadcross/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "roadcross/rng.hpp"

namespace roadcross::cnn {

namespace {

[[noreturn]] void layer_error(int layer_index, const std::string& kind,
                              const std::string& message)
{
    throw std::runtime_error("layer " + std::to_string(layer_index) + " (" +
                             kind + "): " + message);
}

const char* kind_name(LayerKind kind)
{
    switch (kind) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::relu: return "relu";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::global_avg_pool: return "global_avg_pool";
    case LayerKind::dense: return "dense";
    case LayerKind::sigmoid: return "sigmoid";
    case LayerKind::dropout: return "dropout";
    }
    return "?";
}

int effective_kernel(int k, int dilation)
{
    return k + (k - 1) * (dilation - 1);
}

struct ConvGeometry {
    int out_h = 0;
    int out_w = 0;
    int pad_top = 0;
    int pad_left = 0;
};

ConvGeometry conv_geometry(int in_h, int in_w, int kernel_h, int kernel_w,
                           int stride, int dilation, Padding padding)
{
    const int keff_h = effective_kernel(kernel_h, dilation);
    const int keff_w = effective_kernel(kernel_w, dilation);
    ConvGeometry g;
    if (padding == Padding::same) {
        g.out_h = (in_h + stride - 1) / stride;
        g.out_w = (in_w + stride - 1) / stride;
        const int pad_h = std::max(0, (g.out_h - 1) * stride + keff_h - in_h);
        const int pad_w = std::max(0, (g.out_w - 1) * stride + keff_w - in_w);
        g.pad_top = pad_h / 2; // extra padding goes to bottom/right
        g.pad_left = pad_w / 2;
    } else {
        if (keff_h > in_h || keff_w > in_w)
            throw std::runtime_error(
                "conv2d: effective kernel " + std::to_string(keff_h) + "x" +
                std::to_string(keff_w) + " does not fit input " +
                std::to_string(in_h) + "x" + std::to_string(in_w) +
                " under valid padding");
        g.out_h = (in_h - keff_h) / stride + 1;
        g.out_w = (in_w - keff_w) / stride + 1;
    }
    return g;
}

void check_conv_args(const Tensor& input, int out_channels, int kernel_h,
                     int kernel_w, int stride, int dilation)
{
    if (kernel_h < 1 || kernel_w < 1 || stride < 1 || dilation < 1 ||
        out_channels < 1)
        throw std::runtime_error("conv2d: kernel, stride, dilation and "
                                 "out_channels must all be >= 1");
    if (input.height < 1 || input.width < 1 || input.channels < 1)
        throw std::runtime_error("conv2d: empty input tensor");
}

// Rows of the GEMM run in parallel; each output element accumulates its taps
// in (ky, kx, c) order, matching conv2d_reference term for term. Accumulation
// is in double, rounded to float once at the end.
void gemm_bias(const std::vector<float>& a, const float* b, const float* bias,
               std::size_t m, std::size_t k, std::size_t n, float* out)
{
#pragma omp parallel
    {
        std::vector<double> acc(n);
#pragma omp for schedule(static)
        for (long long i = 0; i < static_cast<long long>(m); ++i) {
            for (std::size_t j = 0; j < n; ++j)
                acc[j] = bias[j];
            const float* arow = a.data() + i * k;
            for (std::size_t kk = 0; kk < k; ++kk) {
                const double av = arow[kk];
                const float* brow = b + kk * n;
                for (std::size_t j = 0; j < n; ++j)
                    acc[j] += av * brow[j];
            }
            float* row = out + i * n;
            for (std::size_t j = 0; j < n; ++j)
                row[j] = static_cast<float>(acc[j]);
        }
    }
}

} // namespace

Tensor conv2d(const Tensor& input, const float* kernels, const float* bias,
              int out_channels, int kernel_h, int kernel_w, int stride,
              int dilation, Padding padding)
{
    check_conv_args(input, out_channels, kernel_h, kernel_w, stride, dilation);
    const ConvGeometry g = conv_geometry(input.height, input.width, kernel_h,
                                         kernel_w, stride, dilation, padding);
    const std::size_t m = static_cast<std::size_t>(g.out_h) * g.out_w;
    const std::size_t k =
        static_cast<std::size_t>(kernel_h) * kernel_w * input.channels;

    std::vector<float> columns(m * k, 0.0f);
#pragma omp parallel for schedule(static)
    for (long long oy = 0; oy < g.out_h; ++oy) {
        for (int ox = 0; ox < g.out_w; ++ox) {
            float* col = columns.data() +
                         (static_cast<std::size_t>(oy) * g.out_w + ox) * k;
            for (int ky = 0; ky < kernel_h; ++ky) {
                const int in_y = static_cast<int>(oy) * stride - g.pad_top +
                                 ky * dilation;
                for (int kx = 0; kx < kernel_w; ++kx) {
                    const int in_x =
                        ox * stride - g.pad_left + kx * dilation;
                    float* dst = col + (static_cast<std::size_t>(ky) * kernel_w +
                                        kx) * input.channels;
                    if (in_y < 0 || in_y >= input.height || in_x < 0 ||
                        in_x >= input.width)
                        continue; // stays zero
                    const float* src =
                        input.data.data() +
                        (static_cast<std::size_t>(in_y) * input.width + in_x) *
                            input.channels;
                    std::memcpy(dst, src, sizeof(float) * input.channels);
                }
            }
        }
    }

    Tensor out = Tensor::zeros(g.out_h, g.out_w, out_channels);
    gemm_bias(columns, kernels, bias, m, k,
              static_cast<std::size_t>(out_channels), out.data.data());
    return out;
}

Tensor conv2d_reference(const Tensor& input, const float* kernels,
                        const float* bias, int out_channels, int kernel_h,
                        int kernel_w, int stride, int dilation, Padding padding)
{
    check_conv_args(input, out_channels, kernel_h, kernel_w, stride, dilation);
    const ConvGeometry g = conv_geometry(input.height, input.width, kernel_h,
                                         kernel_w, stride, dilation, padding);
    Tensor out = Tensor::zeros(g.out_h, g.out_w, out_channels);
    for (int oy = 0; oy < g.out_h; ++oy) {
        for (int ox = 0; ox < g.out_w; ++ox) {
            for (int oc = 0; oc < out_channels; ++oc) {
                double acc = bias[oc];
                for (int ky = 0; ky < kernel_h; ++ky) {
                    const int in_y = oy * stride - g.pad_top + ky * dilation;
                    for (int kx = 0; kx < kernel_w; ++kx) {
                        const int in_x =
                            ox * stride - g.pad_left + kx * dilation;
                        for (int c = 0; c < input.channels; ++c) {
                            const double v =
                                (in_y < 0 || in_y >= input.height || in_x < 0 ||
                                 in_x >= input.width)
                                    ? 0.0f
                                    : input.at(in_y, in_x, c);
                            const float w =
                                kernels[((static_cast<std::size_t>(ky) *
                                              kernel_w + kx) * input.channels +
                                         c) * out_channels + oc];
                            acc += v * w;
                        }
                    }
                }
                out.at(oy, ox, oc) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

Tensor batchnorm_infer(const Tensor& input, const float* gamma,
                       const float* beta, const float* mean, const float* var,
                       float epsilon)
{
    Tensor out = input;
    std::vector<float> scale(static_cast<std::size_t>(input.channels));
    std::vector<float> shift(static_cast<std::size_t>(input.channels));
    for (int c = 0; c < input.channels; ++c) {
        scale[c] = gamma[c] / std::sqrt(var[c] + epsilon);
        shift[c] = beta[c] - mean[c] * scale[c];
    }
    const std::size_t pixels = static_cast<std::size_t>(input.height) * input.width;
    for (std::size_t p = 0; p < pixels; ++p) {
        float* px = out.data.data() + p * input.channels;
        for (int c = 0; c < input.channels; ++c)
            px[c] = px[c] * scale[c] + shift[c];
    }
    return out;
}

Tensor relu(const Tensor& input)
{
    Tensor out = input;
    for (float& v : out.data)
        v = std::max(v, 0.0f);
    return out;
}

Tensor maxpool(const Tensor& input, int pool, int stride)
{
    if (pool < 1 || stride < 1)
        throw std::runtime_error("maxpool: pool and stride must be >= 1");
    if (pool > input.height || pool > input.width)
        throw std::runtime_error("maxpool: window " + std::to_string(pool) +
                                 " exceeds input " +
                                 std::to_string(input.height) + "x" +
                                 std::to_string(input.width));
    const int out_h = (input.height - pool) / stride + 1;
    const int out_w = (input.width - pool) / stride + 1;
    Tensor out = Tensor::zeros(out_h, out_w, input.channels);
    for (int oy = 0; oy < out_h; ++oy)
        for (int ox = 0; ox < out_w; ++ox)
            for (int c = 0; c < input.channels; ++c) {
                float best = input.at(oy * stride, ox * stride, c);
                for (int ky = 0; ky < pool; ++ky)
                    for (int kx = 0; kx < pool; ++kx)
                        best = std::max(best, input.at(oy * stride + ky,
                                                       ox * stride + kx, c));
                out.at(oy, ox, c) = best;
            }
    return out;
}

Tensor global_avg_pool(const Tensor& input)
{
    Tensor out = Tensor::zeros(1, 1, input.channels);
    const std::size_t pixels = static_cast<std::size_t>(input.height) * input.width;
    for (int c = 0; c < input.channels; ++c) {
        double sum = 0.0;
        for (std::size_t p = 0; p < pixels; ++p)
            sum += input.data[p * input.channels + c];
        out.data[static_cast<std::size_t>(c)] =
            static_cast<float>(sum / static_cast<double>(pixels));
    }
    return out;
}

Tensor dense(const Tensor& input, const float* weights, const float* bias,
             int units)
{
    const std::size_t in_dim = input.size();
    Tensor out = Tensor::zeros(1, 1, units);
    for (int u = 0; u < units; ++u) {
        double acc = bias[u];
        for (std::size_t i = 0; i < in_dim; ++i)
            acc += static_cast<double>(input.data[i]) * weights[i * units + u];
        out.data[static_cast<std::size_t>(u)] = static_cast<float>(acc);
    }
    return out;
}

Tensor sigmoid(const Tensor& input)
{
    Tensor out = input;
    for (float& v : out.data)
        v = 1.0f / (1.0f + std::exp(-v));
    return out;
}

Shape3 layer_output_shape(const LayerSpec& layer, Shape3 in, int layer_index)
{
    const std::string kind = kind_name(layer.kind);
    if (in.h < 1 || in.w < 1 || in.c < 1)
        layer_error(layer_index, kind, "empty input shape");
    switch (layer.kind) {
    case LayerKind::conv2d: {
        if (layer.kernel_h < 1 || layer.kernel_w < 1 || layer.stride < 1 ||
            layer.dilation < 1 || layer.out_channels < 1)
            layer_error(layer_index, kind,
                        "kernel, stride, dilation and out_channels must be >= 1");
        try {
            const ConvGeometry g =
                conv_geometry(in.h, in.w, layer.kernel_h, layer.kernel_w,
                              layer.stride, layer.dilation, layer.padding);
            return {g.out_h, g.out_w, layer.out_channels};
        } catch (const std::exception& e) {
            layer_error(layer_index, kind, e.what());
        }
    }
    case LayerKind::batchnorm:
    case LayerKind::relu:
    case LayerKind::sigmoid:
        return in;
    case LayerKind::dropout:
        if (layer.rate < 0.0 || layer.rate >= 1.0)
            layer_error(layer_index, kind, "rate must be in [0,1)");
        return in;
    case LayerKind::maxpool: {
        const int stride = layer.pool_stride > 0 ? layer.pool_stride : layer.pool;
        if (layer.pool < 1 || stride < 1)
            layer_error(layer_index, kind, "pool and stride must be >= 1");
        if (layer.pool > in.h || layer.pool > in.w)
            layer_error(layer_index, kind,
                        "window " + std::to_string(layer.pool) +
                            " exceeds input " + std::to_string(in.h) + "x" +
                            std::to_string(in.w));
        return {(in.h - layer.pool) / stride + 1,
                (in.w - layer.pool) / stride + 1, in.c};
    }
    case LayerKind::global_avg_pool:
        return {1, 1, in.c};
    case LayerKind::dense:
        if (layer.units < 1)
            layer_error(layer_index, kind, "units must be >= 1");
        return {1, 1, layer.units};
    }
    layer_error(layer_index, kind, "unknown layer kind");
}

std::vector<Shape3> validate_shapes(const NetworkSpec& spec)
{
    if (spec.input_h < 1 || spec.input_w < 1 || spec.input_c < 1)
        throw std::runtime_error("network input shape must be positive");
    if (spec.layers.empty())
        throw std::runtime_error("network has no layers");
    std::vector<Shape3> shapes;
    Shape3 cur{spec.input_h, spec.input_w, spec.input_c};
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        cur = layer_output_shape(spec.layers[i], cur, static_cast<int>(i));
        shapes.push_back(cur);
    }
    if (spec.layers.back().kind != LayerKind::sigmoid ||
        shapes.back().elements() != 1)
        throw std::runtime_error(
            "network must end in a sigmoid over a single unit");
    return shapes;
}

std::size_t layer_param_count(const LayerSpec& layer, Shape3 in)
{
    switch (layer.kind) {
    case LayerKind::conv2d:
        return static_cast<std::size_t>(layer.kernel_h) * layer.kernel_w *
                   in.c * layer.out_channels +
               static_cast<std::size_t>(layer.out_channels);
    case LayerKind::batchnorm:
        return static_cast<std::size_t>(in.c) * 4;
    case LayerKind::dense:
        return in.elements() * layer.units + static_cast<std::size_t>(layer.units);
    default:
        return 0;
    }
}

namespace {

Tensor apply_layer(const LayerSpec& layer, const std::vector<float>& weights,
                   const Tensor& in)
{
    switch (layer.kind) {
    case LayerKind::conv2d: {
        const std::size_t kernel_count = static_cast<std::size_t>(layer.kernel_h) *
                                         layer.kernel_w * in.channels *
                                         layer.out_channels;
        return conv2d(in, weights.data(), weights.data() + kernel_count,
                      layer.out_channels, layer.kernel_h, layer.kernel_w,
                      layer.stride, layer.dilation, layer.padding);
    }
    case LayerKind::batchnorm: {
        const std::size_t c = static_cast<std::size_t>(in.channels);
        return batchnorm_infer(in, weights.data(), weights.data() + c,
                               weights.data() + 2 * c, weights.data() + 3 * c,
                               static_cast<float>(layer.epsilon));
    }
    case LayerKind::relu:
        return relu(in);
    case LayerKind::maxpool:
        return maxpool(in, layer.pool,
                       layer.pool_stride > 0 ? layer.pool_stride : layer.pool);
    case LayerKind::global_avg_pool:
        return global_avg_pool(in);
    case LayerKind::dense: {
        const std::size_t matrix = in.size() * static_cast<std::size_t>(layer.units);
        return dense(in, weights.data(), weights.data() + matrix, layer.units);
    }
    case LayerKind::sigmoid:
        return sigmoid(in);
    case LayerKind::dropout:
        return dropout_infer(in);
    }
    throw std::runtime_error("unknown layer kind");
}

} // namespace

std::vector<Tensor> forward_all_layers(const Network& network,
                                       const Tensor& image)
{
    const auto shapes = validate_shapes(network.spec);
    if (image.height != network.spec.input_h ||
        image.width != network.spec.input_w ||
        image.channels != network.spec.input_c)
        throw std::runtime_error(
            "forward: image shape " + std::to_string(image.height) + "x" +
            std::to_string(image.width) + "x" + std::to_string(image.channels) +
            " does not match network input " + std::to_string(network.spec.input_h) +
            "x" + std::to_string(network.spec.input_w) + "x" +
            std::to_string(network.spec.input_c));
    if (network.layer_weights.size() != network.spec.layers.size())
        throw std::runtime_error("forward: weights missing for some layers");

    std::vector<Tensor> outputs;
    outputs.reserve(network.spec.layers.size());
    Tensor cur = image;
    for (std::size_t i = 0; i < network.spec.layers.size(); ++i) {
        cur = apply_layer(network.spec.layers[i], network.layer_weights[i], cur);
        outputs.push_back(cur);
    }
    return outputs;
}

double forward(const Network& network, const Tensor& image)
{
    const auto outputs = forward_all_layers(network, image);
    return static_cast<double>(outputs.back().data.front());
}

std::vector<LayerRf> receptive_field(const NetworkSpec& spec)
{
    std::vector<LayerRf> out;
    out.reserve(spec.layers.size());
    LayerRf cur;
    for (const LayerSpec& layer : spec.layers) {
        int k_eff = 1;
        int stride = 1;
        if (layer.kind == LayerKind::conv2d) {
            k_eff = effective_kernel(std::max(layer.kernel_h, layer.kernel_w),
                                     layer.dilation);
            stride = layer.stride;
        } else if (layer.kind == LayerKind::maxpool) {
            k_eff = layer.pool;
            stride = layer.pool_stride > 0 ? layer.pool_stride : layer.pool;
        }
        cur.rf += (k_eff - 1) * cur.jump;
        cur.jump *= stride;
        out.push_back(cur);
    }
    return out;
}

namespace {

[[noreturn]] void spec_error(const std::filesystem::path& path, std::size_t line,
                             const std::string& message)
{
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                             message);
}

} // namespace

NetworkSpec parse_network_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());

    static const std::map<std::string, LayerKind> kinds = {
        {"conv2d", LayerKind::conv2d},
        {"batchnorm", LayerKind::batchnorm},
        {"relu", LayerKind::relu},
        {"maxpool", LayerKind::maxpool},
        {"global_avg_pool", LayerKind::global_avg_pool},
        {"dense", LayerKind::dense},
        {"sigmoid", LayerKind::sigmoid},
        {"dropout", LayerKind::dropout},
    };

    NetworkSpec spec;
    bool have_input = false;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::istringstream ss(line);
        std::string head;
        if (!(ss >> head) || head[0] == '#')
            continue;
        if (head == "name") {
            if (!(ss >> spec.name))
                spec_error(path, line_number, "expected a network name");
            static const char* allowed[] = {
                "mobilenet_head_reference", "roadcrossnet_reference",
                "dilated_roadcrossnet_reference", "custom"};
            if (std::find(std::begin(allowed), std::end(allowed), spec.name) ==
                std::end(allowed))
                spec_error(path, line_number, "unknown network name '" +
                                                  spec.name + "'");
            continue;
        }
        if (head == "input") {
            if (!(ss >> spec.input_h >> spec.input_w >> spec.input_c))
                spec_error(path, line_number, "expected 'input H W C'");
            have_input = true;
            continue;
        }
        const auto kind_it = kinds.find(head);
        if (kind_it == kinds.end())
            spec_error(path, line_number, "unknown layer kind '" + head + "'");
        LayerSpec layer;
        layer.kind = kind_it->second;
        std::string token;
        while (ss >> token) {
            const std::size_t eq = token.find('=');
            if (eq == std::string::npos)
                spec_error(path, line_number, "expected key=value, got '" +
                                                  token + "'");
            const std::string key = token.substr(0, eq);
            const std::string value = token.substr(eq + 1);
            try {
                if (key == "out")
                    layer.out_channels = std::stoi(value);
                else if (key == "kernel")
                    layer.kernel_h = layer.kernel_w = std::stoi(value);
                else if (key == "kernel_h")
                    layer.kernel_h = std::stoi(value);
                else if (key == "kernel_w")
                    layer.kernel_w = std::stoi(value);
                else if (key == "stride") {
                    layer.stride = std::stoi(value);
                    layer.pool_stride = layer.stride;
                } else if (key == "dilation")
                    layer.dilation = std::stoi(value);
                else if (key == "padding") {
                    if (value == "same")
                        layer.padding = Padding::same;
                    else if (value == "valid")
                        layer.padding = Padding::valid;
                    else
                        spec_error(path, line_number,
                                   "padding must be same or valid");
                } else if (key == "pool")
                    layer.pool = std::stoi(value);
                else if (key == "units")
                    layer.units = std::stoi(value);
                else if (key == "rate")
                    layer.rate = std::stod(value);
                else if (key == "epsilon")
                    layer.epsilon = std::stod(value);
                else
                    spec_error(path, line_number, "unknown key '" + key + "'");
            } catch (const std::invalid_argument&) {
                spec_error(path, line_number, "bad value for '" + key + "'");
            } catch (const std::out_of_range&) {
                spec_error(path, line_number, "bad value for '" + key + "'");
            }
        }
        spec.layers.push_back(layer);
    }
    if (!have_input)
        throw std::runtime_error(path.string() + ": missing 'input H W C' line");
    validate_shapes(spec);
    return spec;
}

Network load_network(const std::filesystem::path& spec_path,
                     const std::filesystem::path& weights_path)
{
    Network net;
    net.spec = parse_network_spec(spec_path);
    const auto shapes = validate_shapes(net.spec);

    std::ifstream in(weights_path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + weights_path.string());

    Shape3 cur{net.spec.input_h, net.spec.input_w, net.spec.input_c};
    for (std::size_t i = 0; i < net.spec.layers.size(); ++i) {
        const std::size_t expected = layer_param_count(net.spec.layers[i], cur);
        std::uint64_t count = 0;
        if (!in.read(reinterpret_cast<char*>(&count), sizeof(count)))
            throw std::runtime_error(weights_path.string() +
                                     ": truncated before layer " +
                                     std::to_string(i));
        if (count != expected)
            throw std::runtime_error(
                weights_path.string() + ": layer " + std::to_string(i) + " (" +
                kind_name(net.spec.layers[i].kind) + ") expects " +
                std::to_string(expected) + " values, file has " +
                std::to_string(count));
        std::vector<float> blob(static_cast<std::size_t>(count));
        if (count > 0 &&
            !in.read(reinterpret_cast<char*>(blob.data()),
                     static_cast<std::streamsize>(count * sizeof(float))))
            throw std::runtime_error(weights_path.string() +
                                     ": truncated inside layer " +
                                     std::to_string(i));
        net.layer_weights.push_back(std::move(blob));
        cur = shapes[i];
    }
    char extra = 0;
    if (in.read(&extra, 1))
        throw std::runtime_error(weights_path.string() +
                                 ": trailing bytes after last layer");
    return net;
}

void save_weights(const Network& network, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    for (const auto& blob : network.layer_weights) {
        const std::uint64_t count = blob.size();
        out.write(reinterpret_cast<const char*>(&count), sizeof(count));
        if (count > 0)
            out.write(reinterpret_cast<const char*>(blob.data()),
                      static_cast<std::streamsize>(count * sizeof(float)));
    }
}

Network random_network(const NetworkSpec& spec, std::uint64_t seed)
{
    const auto shapes = validate_shapes(spec);
    Network net;
    net.spec = spec;
    Rng rng(seed);
    Shape3 cur{spec.input_h, spec.input_w, spec.input_c};
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& layer = spec.layers[i];
        std::vector<float> blob(layer_param_count(layer, cur));
        if (layer.kind == LayerKind::conv2d || layer.kind == LayerKind::dense) {
            const std::size_t fan_in =
                layer.kind == LayerKind::conv2d
                    ? static_cast<std::size_t>(layer.kernel_h) * layer.kernel_w *
                          cur.c
                    : cur.elements();
            const std::size_t matrix =
                blob.size() - static_cast<std::size_t>(
                                  layer.kind == LayerKind::conv2d
                                      ? layer.out_channels
                                      : layer.units);
            const double scale = std::sqrt(1.0 / static_cast<double>(fan_in));
            for (std::size_t j = 0; j < matrix; ++j)
                blob[j] = static_cast<float>(rng.range(-scale, scale));
            // biases stay zero
        } else if (layer.kind == LayerKind::batchnorm) {
            const std::size_t c = blob.size() / 4;
            for (std::size_t j = 0; j < c; ++j) {
                blob[j] = 1.0f;         // gamma
                blob[c + j] = 0.0f;     // beta
                blob[2 * c + j] = 0.0f; // moving mean
                blob[3 * c + j] = 1.0f; // moving var
            }
        }
        net.layer_weights.push_back(std::move(blob));
        cur = shapes[i];
    }
    return net;
}

double compute_class_weight(long long n_unsafe, long long n_safe)
{
    if (n_unsafe <= 0)
        throw std::invalid_argument("compute_class_weight: unsafe count must be positive");
    if (n_safe <= 0)
        throw std::invalid_argument("compute_class_weight: safe count must be positive");
    return static_cast<double>(n_unsafe) / static_cast<double>(n_safe);
}

std::string format_class_weight(double weight)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", weight);
    return buf;
}

Tensor rasterize_boxes(const sim::FrameRecord& frame, int frame_width,
                       int frame_height)
{
    Tensor img = Tensor::zeros(frame_height, frame_width, 3);
    for (const sim::BoxObs& obs : frame.boxes) {
        const int x0 = std::clamp(obs.box.x_min, 0, frame_width);
        const int x1 = std::clamp(obs.box.x_max, 0, frame_width);
        const int y0 = std::clamp(obs.box.y_min, 0, frame_height);
        const int y1 = std::clamp(obs.box.y_max, 0, frame_height);
        for (int y = y0; y < y1; ++y) {
            float* row = img.data.data() +
                         (static_cast<std::size_t>(y) * frame_width + x0) * 3;
            for (int x = x0; x < x1; ++x) {
                row[0] = row[1] = row[2] = 1.0f;
                row += 3;
            }
        }
    }
    return img;
}

Tensor nearest_resize(const Tensor& input, int out_h, int out_w)
{
    if (out_h < 1 || out_w < 1)
        throw std::runtime_error("nearest_resize: output shape must be positive");
    Tensor out = Tensor::zeros(out_h, out_w, input.channels);
    for (int y = 0; y < out_h; ++y) {
        const int sy = std::min(input.height - 1,
                                static_cast<int>(static_cast<long long>(y) *
                                                 input.height / out_h));
        for (int x = 0; x < out_w; ++x) {
            const int sx = std::min(input.width - 1,
                                    static_cast<int>(static_cast<long long>(x) *
                                                     input.width / out_w));
            for (int c = 0; c < input.channels; ++c)
                out.at(y, x, c) = input.at(sy, sx, c);
        }
    }
    return out;
}

} // namespace roadcross::cnn
