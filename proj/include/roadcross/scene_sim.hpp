#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roadcross/geometry.hpp"

namespace roadcross::sim {

enum class Side { near_side, far_side };
enum class LaneDirection { approaching, receding };
enum class SafetyLabel : int { unsafe = 0, safe = 1 };

struct LaneSpec {
    int lane_id = 0;
    Side side = Side::near_side;
    LaneDirection direction = LaneDirection::approaching;
    int y_min = 0; // vertical band where this lane's boxes appear
    int y_max = 0;
    double speed_min = 0.0; // pixels/frame
    double speed_max = 0.0;
    int width_min = 0;
    int width_max = 0;
    int height_min = 0;
    int height_max = 0;
};

struct ScenarioConfig {
    int frame_width = 1920;
    int frame_height = 1080;
    double fps = 30.0;
    int num_frames = 0;
    std::optional<int> divider_x; // vertical divider; absent for undivided roads
    Point origin{960.0, 1060.0};  // pedestrian position, bottom-center area
    double crossing_time = 4.0;   // seconds the pedestrian needs to cross
    double corridor_half_width = 288.0; // pixels around origin.x
    double arrival_rate_per_lane = 0.22; // vehicles/second
    double box_growth = 0.5; // linear box-size growth as a vehicle nears origin
    std::vector<LaneSpec> lanes;
    std::uint64_t rng_seed = 0;

    // Divided two-side road with two lanes per side, moderate traffic.
    static ScenarioConfig default_config();
    // Single near-side lane tuned so that a frame is unsafe exactly when at
    // least one vehicle is on screen. With this geometry the truth label is a
    // linear function of the per-region count features.
    static ScenarioConfig linear_oracle_config();

    void validate() const; // throws std::invalid_argument naming the field
};

// Ground-truth motion of one vehicle: straight line, constant speed.
// Positions are in frame units; the vehicle exists from arrival_frame until
// its center leaves [range_lo, range_hi].
struct VehicleTrack {
    int vehicle_id = 0;
    int lane_id = 0;
    double arrival_frame = 0.0;
    double spawn_x = 0.0;    // center x at arrival
    double velocity_x = 0.0; // pixels/frame, signed
    double y_center = 0.0;
    double base_width = 0.0;
    double base_height = 0.0;
    double range_lo = 0.0;
    double range_hi = 0.0;
};

struct BoxObs {
    int vehicle_id = 0;
    Box box;
};

struct FrameRecord {
    int frame_index = 0;
    std::vector<BoxObs> boxes;
    SafetyLabel truth_label = SafetyLabel::unsafe;
};

struct Scenario {
    ScenarioConfig config;
    std::vector<FrameRecord> frames;
    // Hidden from downstream modules; only the safety oracle may look.
    std::vector<VehicleTrack> trajectories;
};

// Deterministic function of (config, rng_seed): Poisson arrivals per lane,
// constant per-vehicle speed, boxes clipped to frame bounds and dropped when
// fully outside. Frames carry truth labels from label_safety.
Scenario generate_scenario(const ScenarioConfig& config);

// Frame n is safe iff no near-side approaching vehicle's center enters the
// crossing corridor (the vertical strip of corridor_half_width around
// origin.x, clamped to the frame) within crossing_time seconds of n.
std::vector<SafetyLabel> label_safety(const Scenario& scenario);

// True center x of a vehicle at an integer frame (ignores existence).
double vehicle_center_x_at(const VehicleTrack& v, int frame);
bool vehicle_exists_at(const VehicleTrack& v, int frame);
// Rendered detector box: perspective growth, rounded, clipped; nullopt when
// the vehicle is absent or the clipped box is degenerate.
std::optional<Box> vehicle_box_at(const ScenarioConfig& config,
                                  const VehicleTrack& v, int frame);

// Corridor interval [lo, hi] on the x axis, clamped to the frame.
void corridor_bounds(const ScenarioConfig& config, double& lo, double& hi);

// Dataset files: <dir>/boxes.csv and <dir>/labels.csv.
//   boxes.csv:  frame_index,vehicle_id,x_min,y_min,x_max,y_max
//   labels.csv: frame_index,label        (label 1 = safe)
void export_dataset(const Scenario& scenario, const std::filesystem::path& dir);

struct ImportedDataset {
    std::vector<FrameRecord> frames; // truth labels filled from labels.csv
};
ImportedDataset import_dataset(const std::filesystem::path& dir);

// Flat key=value scenario config file (lanes as lane.N.field keys).
ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const ScenarioConfig& config, const std::filesystem::path& path);

const char* to_string(Side side);
const char* to_string(LaneDirection direction);

} // namespace roadcross::sim
