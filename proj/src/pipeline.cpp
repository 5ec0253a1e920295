#include "roadcross/pipeline.hpp"

namespace roadcross::pipeline {

VideoFeatures extract_video_features(const std::vector<sim::FrameRecord>& frames,
                                     const sim::ScenarioConfig& config,
                                     const tracking::TrackerConfig& tracker_config)
{
    const auto tracks = tracking::associate(frames, tracker_config, config.origin);
    const auto per_frame = tracking::per_frame_tracked_boxes(
        tracks, static_cast<int>(frames.size()), tracker_config, config.origin);
    const features::RegionGrid grid{2, 3, config.frame_width, config.frame_height};

    VideoFeatures out;
    out.raw.reserve(frames.size());
    out.labels.reserve(frames.size());
    for (std::size_t n = 0; n < frames.size(); ++n) {
        const auto filtered = tracking::directional_filter(
            per_frame[n], config.divider_x, config.origin);
        out.raw.push_back(
            features::single_frame_features(filtered, grid, config.origin));
        out.labels.push_back(static_cast<int>(frames[n].truth_label));
    }
    return out;
}

} // namespace roadcross::pipeline
