#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "roadcross/geometry.hpp"
#include "roadcross/scene_sim.hpp"

namespace roadcross::tracking {

enum class Direction { approaching, receding, stationary };

struct Observation {
    int frame_index = 0;
    Box box;
};

struct Track {
    int track_id = 0;
    std::vector<Observation> observations; // strictly increasing frame_index
    double speed = 0.0;                    // pixels/frame, whole-track estimate
    Direction direction = Direction::approaching;
};

struct TrackerConfig {
    double iou_match_threshold = 0.3;
    int max_frames_lost = 5;
    int speed_window = 5; // observations used for the speed estimate
    double stationary_speed_epsilon = 0.5; // pixels/frame

    void validate() const;
};

// Greedy IoU association over detector boxes. Per frame, candidate
// (track, box) pairs are sorted by IoU descending (ties: lower box index,
// then lower track id) and matched when IoU >= threshold; unmatched boxes
// start new tracks; tracks unseen for more than max_frames_lost are closed.
// Input vehicle ids are ignored. `origin` is only used to fill the per-track
// direction summary.
std::vector<Track> associate(const std::vector<sim::FrameRecord>& frames,
                             const TrackerConfig& config, Point origin);

// Mean centroid displacement magnitude per frame over the last `window`
// observations (all observations when fewer). Throws on fewer than 2.
double track_speed(const Track& track, int window);

// Sign of the average per-frame change of centroid-to-origin distance over
// the whole track: below -epsilon approaching, above +epsilon receding,
// else stationary. Throws on fewer than 2 observations.
Direction track_direction(const Track& track, Point origin, double epsilon);

struct TrackedBox {
    Box box;
    int track_id = 0;
    double speed = 0.0;
    Direction direction = Direction::approaching;
};

// Re-plays tracks into per-frame box lists with causal speed/direction
// estimates (only observations up to that frame are used). Single-observation
// prefixes get speed 0 and direction approaching.
std::vector<std::vector<TrackedBox>>
per_frame_tracked_boxes(const std::vector<Track>& tracks, int num_frames,
                        const TrackerConfig& config, Point origin);

// Removes boxes whose centroid lies strictly on the far side of the divider
// relative to origin; boxes spanning the divider (or with the centroid
// exactly on it) are kept. No divider: pass-through.
std::vector<TrackedBox> directional_filter(const std::vector<TrackedBox>& boxes,
                                           std::optional<int> divider_x,
                                           Point origin);

// tracks.csv: track_id,frame_index,x_min,y_min,x_max,y_max,speed,direction
// with direction in {A,R,S}; rows ordered by (frame_index, track_id).
void export_tracks_csv(const std::vector<Track>& tracks, int num_frames,
                       const TrackerConfig& config, Point origin,
                       const std::filesystem::path& path);
std::vector<std::vector<TrackedBox>>
import_tracks_csv(const std::filesystem::path& path, int num_frames);

char direction_code(Direction d);

} // namespace roadcross::tracking
