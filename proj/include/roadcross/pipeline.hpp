#pragma once

#include <vector>

#include "roadcross/features.hpp"
#include "roadcross/scene_sim.hpp"
#include "roadcross/tracking.hpp"

namespace roadcross::pipeline {

struct VideoFeatures {
    std::vector<std::vector<double>> raw; // one unscaled 24-vector per frame
    std::vector<int> labels;              // 1 = safe
};

// track -> per-frame causal annotations -> directional filter -> per-frame
// feature vectors, for one video. Ground-truth vehicle ids are ignored.
VideoFeatures extract_video_features(const std::vector<sim::FrameRecord>& frames,
                                     const sim::ScenarioConfig& config,
                                     const tracking::TrackerConfig& tracker_config);

} // namespace roadcross::pipeline
