#include "roadcross/svm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "roadcross/rng.hpp"

namespace roadcross::svm {

void SvmTrainConfig::validate() const
{
    if (regularization_lambda <= 0.0)
        throw std::invalid_argument("regularization_lambda must be positive");
    if (epochs < 1)
        throw std::invalid_argument("epochs must be >= 1");
}

namespace {

double dot(const std::vector<double>& w, const std::vector<double>& x)
{
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j)
        s += w[j] * x[j];
    return s;
}

std::vector<std::vector<double>>
scale_rows(const features::ScalerParams& scaler,
           const std::vector<std::vector<double>>& X)
{
    std::vector<std::vector<double>> out;
    out.reserve(X.size());
    for (const auto& row : X)
        out.push_back(features::apply_scaler(scaler, row));
    return out;
}

} // namespace

LinearSvmModel train(const std::vector<std::vector<double>>& X,
                     const std::vector<int>& y, ClassWeights class_weights,
                     const SvmTrainConfig& config, int scaled_columns)
{
    config.validate();
    if (X.size() != y.size())
        throw std::invalid_argument("train: X rows and y length differ");
    if (X.size() < 2)
        throw std::invalid_argument("train: need at least 2 samples");
    const std::size_t dim = X.front().size();
    if (dim == 0)
        throw std::invalid_argument("train: empty feature vectors");
    for (const auto& row : X)
        if (row.size() != dim)
            throw std::invalid_argument("train: ragged feature matrix");
    bool has_pos = false, has_neg = false;
    for (int label : y) {
        if (label != 0 && label != 1)
            throw std::invalid_argument("train: labels must be 0 or 1");
        (label == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument("train: both classes must be present");

    LinearSvmModel model;
    model.class_weights = class_weights;

    // Fit the scaler on the requested column prefix; remaining columns get
    // the identity mapping (min 0, max 1).
    const std::size_t prefix = scaled_columns < 0
                                   ? dim
                                   : std::min<std::size_t>(dim, scaled_columns);
    model.scaler = features::fit_scaler(X);
    for (std::size_t j = prefix; j < dim; ++j) {
        model.scaler.min[j] = 0.0;
        model.scaler.max[j] = 1.0;
    }
    const auto scaled = scale_rows(model.scaler, X);

    model.weights.assign(dim, 0.0);
    model.bias = 0.0;
    const double lambda = config.regularization_lambda;
    Rng rng(config.rng_seed);
    const std::uint64_t n = X.size();
    const std::uint64_t steps = static_cast<std::uint64_t>(config.epochs) * n;
    for (std::uint64_t t = 1; t <= steps; ++t) {
        const std::uint64_t i = rng.index(n);
        const std::vector<double>& x = scaled[i];
        const double yi = y[i] == 1 ? 1.0 : -1.0;
        const double ci = y[i] == 1 ? class_weights.safe_weight
                                    : class_weights.unsafe_weight;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double margin = yi * (dot(model.weights, x) + model.bias);
        const double decay = 1.0 - eta * lambda;
        for (std::size_t j = 0; j < dim; ++j)
            model.weights[j] *= decay;
        if (margin < 1.0) {
            const double step = eta * ci * yi;
            for (std::size_t j = 0; j < dim; ++j)
                model.weights[j] += step * x[j];
            model.bias += step; // bias is not regularized
        }
    }
    return model;
}

double training_loss(const LinearSvmModel& model,
                     const std::vector<std::vector<double>>& X,
                     const std::vector<int>& y, double lambda)
{
    if (X.size() != y.size())
        throw std::invalid_argument("training_loss: X rows and y length differ");
    double loss = 0.0;
    for (std::size_t j = 0; j < model.weights.size(); ++j)
        loss += model.weights[j] * model.weights[j];
    loss *= lambda / 2.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto x = features::apply_scaler(model.scaler, X[i]);
        const double yi = y[i] == 1 ? 1.0 : -1.0;
        const double ci = y[i] == 1 ? model.class_weights.safe_weight
                                    : model.class_weights.unsafe_weight;
        const double margin = yi * (dot(model.weights, x) + model.bias);
        loss += ci * std::max(0.0, 1.0 - margin);
    }
    return loss;
}

double score(const LinearSvmModel& model, const std::vector<double>& x)
{
    if (x.size() != model.dim())
        throw std::invalid_argument("score: expected dimension " +
                                    std::to_string(model.dim()) + ", got " +
                                    std::to_string(x.size()));
    const auto scaled = features::apply_scaler(model.scaler, x);
    const double margin = dot(model.weights, scaled) + model.bias;
    return 1.0 / (1.0 + std::exp(-margin));
}

int predict(const LinearSvmModel& model, const std::vector<double>& x)
{
    return score(model, x) > model.threshold ? 1 : 0;
}

std::vector<int>
predict_multiframe_video(const LinearSvmModel& single_frame_model,
                         const LinearSvmModel& multi_frame_model,
                         const std::vector<std::vector<double>>& raw_frames,
                         int k)
{
    if (k < 1)
        throw std::invalid_argument("predict_multiframe_video: k must be >= 1");

    std::vector<int> single_frame_preds;
    single_frame_preds.reserve(raw_frames.size());
    for (const auto& raw : raw_frames)
        single_frame_preds.push_back(predict(single_frame_model, raw));

    std::vector<int> out;
    out.reserve(raw_frames.size());
    for (std::size_t n = 0; n < raw_frames.size(); ++n) {
        std::vector<int> history(static_cast<std::size_t>(k - 1), 0);
        for (int j = 0; j < k - 1; ++j) {
            const long long m = static_cast<long long>(n) - (k - 1) + j;
            if (m >= 0)
                history[static_cast<std::size_t>(j)] =
                    single_frame_preds[static_cast<std::size_t>(m)];
        }
        // The multi-frame model scales internally, so hand it the raw vector
        // with the label suffix appended.
        std::vector<double> vec = raw_frames[n];
        for (int label : history)
            vec.push_back(static_cast<double>(label));
        out.push_back(predict(multi_frame_model, vec));
    }
    return out;
}

ClassWeights class_weights_from_counts(long long n_unsafe, long long n_safe)
{
    if (n_safe <= 0 || n_unsafe <= 0)
        throw std::invalid_argument("class weights need positive class counts");
    return {1.0, static_cast<double>(n_unsafe) / static_cast<double>(n_safe)};
}

namespace {

void write_vector(std::ofstream& out, const std::vector<double>& v)
{
    char buf[40];
    for (std::size_t j = 0; j < v.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", v[j]);
        out << (j ? " " : "") << buf;
    }
    out << '\n';
}

std::vector<double> read_vector(std::istream& in, std::size_t dim,
                                const std::filesystem::path& path)
{
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path.string() + ": truncated model file");
    std::istringstream ss(line);
    std::vector<double> v(dim);
    for (std::size_t j = 0; j < dim; ++j)
        if (!(ss >> v[j]))
            throw std::runtime_error(path.string() + ": malformed model vector");
    return v;
}

} // namespace

void save_model(const LinearSvmModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    char buf[40];
    out << model.dim();
    std::snprintf(buf, sizeof(buf), "%.17g", model.threshold);
    out << ' ' << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", model.class_weights.unsafe_weight);
    out << ' ' << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", model.class_weights.safe_weight);
    out << ' ' << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", model.bias);
    out << buf << '\n';
    write_vector(out, model.weights);
    write_vector(out, model.scaler.min);
    write_vector(out, model.scaler.max);
}

LinearSvmModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    LinearSvmModel model;
    std::size_t dim = 0;
    if (!(in >> dim >> model.threshold >> model.class_weights.unsafe_weight >>
          model.class_weights.safe_weight))
        throw std::runtime_error(path.string() + ": malformed model header");
    if (!(in >> model.bias))
        throw std::runtime_error(path.string() + ": malformed model bias");
    if (!(model.threshold > 0.0 && model.threshold < 1.0))
        throw std::runtime_error(path.string() + ": threshold must be in (0,1)");
    std::string rest;
    std::getline(in, rest);
    model.weights = read_vector(in, dim, path);
    model.scaler.min = read_vector(in, dim, path);
    model.scaler.max = read_vector(in, dim, path);
    for (std::size_t j = 0; j < dim; ++j)
        if (model.scaler.min[j] > model.scaler.max[j])
            throw std::runtime_error(path.string() +
                                     ": scaler min exceeds max at column " +
                                     std::to_string(j));
    return model;
}

} // namespace roadcross::svm
