#include "roadcross/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "roadcross/csv.hpp"
#include "roadcross/text.hpp"

namespace roadcross::features {

void RegionGrid::validate() const
{
    if (rows <= 0 || cols <= 0)
        throw std::invalid_argument("region grid must have positive rows and cols");
    if (frame_width <= 0 || frame_height <= 0)
        throw std::invalid_argument("region grid frame size must be positive");
}

int region_of(const Box& box, const RegionGrid& grid)
{
    const Point c = box.centroid();
    int col = static_cast<int>(std::floor(c.x * grid.cols / grid.frame_width));
    int row = static_cast<int>(std::floor(c.y * grid.rows / grid.frame_height));
    col = std::clamp(col, 0, grid.cols - 1);
    row = std::clamp(row, 0, grid.rows - 1);
    return row * grid.cols + col;
}

std::vector<double>
single_frame_features(const std::vector<tracking::TrackedBox>& boxes,
                      const RegionGrid& grid, Point origin)
{
    grid.validate();
    const int regions = grid.region_count();
    const double diag = frame_diagonal(grid.frame_width, grid.frame_height);

    std::vector<double> out(static_cast<std::size_t>(regions) * kFeaturesPerRegion);
    for (int r = 0; r < regions; ++r) {
        out[r * kFeaturesPerRegion + 0] = 0.0;  // count
        out[r * kFeaturesPerRegion + 1] = 0.0;  // total area
        out[r * kFeaturesPerRegion + 2] = diag; // min distance sentinel
        out[r * kFeaturesPerRegion + 3] = 0.0;  // max speed
    }
    for (const tracking::TrackedBox& tb : boxes) {
        const int r = region_of(tb.box, grid);
        double* slot = &out[static_cast<std::size_t>(r) * kFeaturesPerRegion];
        slot[0] += 1.0;
        slot[1] += tb.box.area();
        slot[2] = std::min(slot[2], distance(tb.box.centroid(), origin));
        slot[3] = std::max(slot[3], tb.speed);
    }
    return out;
}

ScalerParams fit_scaler(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty())
        throw std::invalid_argument("fit_scaler: empty training matrix");
    const std::size_t dim = rows.front().size();
    ScalerParams p;
    p.min.assign(dim, 0.0);
    p.max.assign(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
        p.min[j] = rows.front()[j];
        p.max[j] = rows.front()[j];
    }
    for (const auto& row : rows) {
        if (row.size() != dim)
            throw std::invalid_argument("fit_scaler: ragged training matrix");
        for (std::size_t j = 0; j < dim; ++j) {
            p.min[j] = std::min(p.min[j], row[j]);
            p.max[j] = std::max(p.max[j], row[j]);
        }
    }
    return p;
}

std::vector<double> apply_scaler(const ScalerParams& params,
                                 const std::vector<double>& values)
{
    if (values.size() != params.min.size())
        throw std::invalid_argument("apply_scaler: dimension mismatch");
    std::vector<double> out(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double range = params.max[j] - params.min[j];
        out[j] = range > 0.0 ? (values[j] - params.min[j]) / range : 0.0;
    }
    return out;
}

void WindowConfig::validate() const
{
    if (k < 1)
        throw std::invalid_argument("window size k must be >= 1");
}

std::vector<double> multi_frame_features(const std::vector<double>& scaled,
                                         const std::vector<int>& previous_predictions,
                                         const WindowConfig& window)
{
    window.validate();
    if (previous_predictions.size() != static_cast<std::size_t>(window.k - 1))
        throw std::invalid_argument(
            "multi_frame_features: expected " + std::to_string(window.k - 1) +
            " previous predictions, got " +
            std::to_string(previous_predictions.size()));
    std::vector<double> out = scaled;
    out.reserve(scaled.size() + previous_predictions.size());
    for (int label : previous_predictions) {
        if (label != 0 && label != 1)
            throw std::invalid_argument(
                "multi_frame_features: previous predictions must be 0 or 1");
        out.push_back(static_cast<double>(label));
    }
    return out;
}

void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<std::vector<double>>& rows,
                       const std::vector<int>& labels, int feature_columns)
{
    if (rows.size() != labels.size())
        throw std::invalid_argument("write_feature_csv: rows/labels mismatch");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    const int width = rows.empty() ? feature_columns
                                   : static_cast<int>(rows.front().size());
    for (int j = 0; j < feature_columns; ++j)
        out << (j ? "," : "") << 'f' << j;
    for (int j = 0; j < width - feature_columns; ++j)
        out << ",p" << j;
    out << ",label\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<int>(rows[i].size()) != width)
            throw std::invalid_argument("write_feature_csv: ragged rows");
        for (int j = 0; j < width; ++j)
            out << (j ? "," : "") << format_double(rows[i][static_cast<std::size_t>(j)]);
        out << ',' << labels[i] << '\n';
    }
}

FeatureCsv read_feature_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw csv::ParseError("cannot open " + path.string());
    std::string header;
    if (!std::getline(in, header))
        throw csv::ParseError(path.string() + ": empty file");
    if (!header.empty() && header.back() == '\r')
        header.pop_back();

    const auto names = csv::split_fields(header);
    FeatureCsv data;
    std::size_t pos = 0;
    while (pos < names.size() &&
           names[pos] == "f" + std::to_string(data.feature_columns)) {
        ++data.feature_columns;
        ++pos;
    }
    while (pos < names.size() &&
           names[pos] == "p" + std::to_string(data.prediction_columns)) {
        ++data.prediction_columns;
        ++pos;
    }
    if (data.feature_columns == 0 || pos + 1 != names.size() ||
        names[pos] != "label")
        throw csv::ParseError(path.string() +
                              ":1: header must be f0..fN[,p0..pM],label");

    const std::size_t width =
        static_cast<std::size_t>(data.feature_columns + data.prediction_columns);
    std::string line;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = csv::split_fields(line);
        if (fields.size() != width + 1)
            throw csv::ParseError(path.string() + ":" +
                                  std::to_string(line_number) +
                                  ": wrong field count");
        std::vector<double> row(width);
        for (std::size_t j = 0; j < width; ++j)
            row[j] = csv::parse_double(fields[j], path, line_number);
        const long long label = csv::parse_int(fields[width], path, line_number);
        if (label != 0 && label != 1)
            throw csv::ParseError(path.string() + ":" +
                                  std::to_string(line_number) +
                                  ": label must be 0 or 1");
        data.rows.push_back(std::move(row));
        data.labels.push_back(static_cast<int>(label));
    }
    return data;
}

} // namespace roadcross::features
