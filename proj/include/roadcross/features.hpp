#pragma once

#include <filesystem>
#include <vector>

#include "roadcross/geometry.hpp"
#include "roadcross/tracking.hpp"

namespace roadcross::features {

// Frame tiled into rows x cols cells; the paper-conformant grid is 2x3.
struct RegionGrid {
    int rows = 2;
    int cols = 3;
    int frame_width = 1920;
    int frame_height = 1080;

    int region_count() const { return rows * cols; }
    void validate() const;
};

constexpr int kFeaturesPerRegion = 4;

inline int single_frame_dim(const RegionGrid& grid)
{
    return grid.region_count() * kFeaturesPerRegion;
}

// Cell index (row-major) containing the box centroid. Centroids on an
// interior boundary belong to the right/bottom cell; centroids on the outer
// frame edge are clamped inward.
int region_of(const Box& box, const RegionGrid& grid);

// Per region, in row-major region order:
//   [count, total_area, min_centroid_distance_to_origin, max_speed]
// Empty regions contribute [0, 0, frame_diagonal, 0].
std::vector<double>
single_frame_features(const std::vector<tracking::TrackedBox>& boxes,
                      const RegionGrid& grid, Point origin);

struct ScalerParams {
    std::vector<double> min;
    std::vector<double> max;
};

// Column-wise min/max over the rows of a non-empty training matrix.
ScalerParams fit_scaler(const std::vector<std::vector<double>>& rows);

// x -> (x - min) / (max - min); constant columns map to 0; values outside the
// fitted range are not clipped.
std::vector<double> apply_scaler(const ScalerParams& params,
                                 const std::vector<double>& values);

struct WindowConfig {
    int k = 10; // sliding-window size in frames

    void validate() const;
};

// [scaled 24-vector || previous k-1 predicted labels]; throws when the label
// history does not hold exactly k-1 entries.
std::vector<double> multi_frame_features(const std::vector<double>& scaled,
                                         const std::vector<int>& previous_predictions,
                                         const WindowConfig& window);

// Feature matrix CSV, header f0..f{F-1}[,p0..p{P-1}],label, one row per frame.
struct FeatureCsv {
    int feature_columns = 0;
    int prediction_columns = 0;
    std::vector<std::vector<double>> rows; // width = feature + prediction cols
    std::vector<int> labels;
};

void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<std::vector<double>>& rows,
                       const std::vector<int>& labels, int feature_columns);
FeatureCsv read_feature_csv(const std::filesystem::path& path);

} // namespace roadcross::features
