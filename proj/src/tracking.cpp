#include "roadcross/tracking.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "roadcross/csv.hpp"

namespace roadcross::tracking {

void TrackerConfig::validate() const
{
    if (iou_match_threshold < 0.0 || iou_match_threshold > 1.0)
        throw std::invalid_argument("iou_match_threshold must be in [0,1]");
    if (speed_window < 2)
        throw std::invalid_argument("speed_window must be >= 2");
    if (max_frames_lost < 0)
        throw std::invalid_argument("max_frames_lost must be >= 0");
}

namespace {

double speed_over(const std::vector<Observation>& obs, std::size_t begin,
                  std::size_t end)
{
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = begin + 1; i < end; ++i) {
        const double df = obs[i].frame_index - obs[i - 1].frame_index;
        total += distance(obs[i].box.centroid(), obs[i - 1].box.centroid()) / df;
        ++pairs;
    }
    return total / static_cast<double>(pairs);
}

Direction direction_over(const std::vector<Observation>& obs, std::size_t begin,
                         std::size_t end, Point origin, double epsilon)
{
    const Observation& first = obs[begin];
    const Observation& last = obs[end - 1];
    const double d0 = distance(first.box.centroid(), origin);
    const double d1 = distance(last.box.centroid(), origin);
    const double per_frame =
        (d1 - d0) / static_cast<double>(last.frame_index - first.frame_index);
    if (per_frame < -epsilon)
        return Direction::approaching;
    if (per_frame > epsilon)
        return Direction::receding;
    return Direction::stationary;
}

// Causal estimates from the first prefix_len observations of a track.
void prefix_estimates(const Track& track, std::size_t prefix_len,
                      const TrackerConfig& cfg, Point origin, double& speed,
                      Direction& direction)
{
    if (prefix_len < 2) {
        speed = 0.0;
        direction = Direction::approaching; // conservative for new tracks
        return;
    }
    const std::size_t window =
        std::min<std::size_t>(prefix_len, static_cast<std::size_t>(cfg.speed_window));
    speed = speed_over(track.observations, prefix_len - window, prefix_len);
    direction = direction_over(track.observations, 0, prefix_len, origin,
                               cfg.stationary_speed_epsilon);
}

} // namespace

double track_speed(const Track& track, int window)
{
    if (track.observations.size() < 2)
        throw std::invalid_argument("track_speed: track has fewer than 2 observations");
    const std::size_t n = track.observations.size();
    const std::size_t w =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::max(window, 2)));
    return speed_over(track.observations, n - w, n);
}

Direction track_direction(const Track& track, Point origin, double epsilon)
{
    if (track.observations.size() < 2)
        throw std::invalid_argument(
            "track_direction: track has fewer than 2 observations");
    return direction_over(track.observations, 0, track.observations.size(),
                          origin, epsilon);
}

std::vector<Track> associate(const std::vector<sim::FrameRecord>& frames,
                             const TrackerConfig& cfg, Point origin)
{
    cfg.validate();

    struct Live {
        std::size_t track_index;
        int last_frame;
    };
    std::vector<Track> tracks;
    std::vector<Live> live;

    for (const sim::FrameRecord& frame : frames) {
        // Drop tracks lost for too long before matching.
        std::erase_if(live, [&](const Live& l) {
            return frame.frame_index - l.last_frame > cfg.max_frames_lost;
        });

        struct Candidate {
            double iou;
            std::size_t box_index;
            std::size_t live_index;
        };
        std::vector<Candidate> candidates;
        for (std::size_t b = 0; b < frame.boxes.size(); ++b) {
            for (std::size_t l = 0; l < live.size(); ++l) {
                const Box& last_box =
                    tracks[live[l].track_index].observations.back().box;
                const double v = iou(frame.boxes[b].box, last_box);
                if (v >= cfg.iou_match_threshold)
                    candidates.push_back({v, b, l});
            }
        }
        std::sort(candidates.begin(), candidates.end(),
                  [&](const Candidate& a, const Candidate& b) {
                      if (a.iou != b.iou)
                          return a.iou > b.iou;
                      if (a.box_index != b.box_index)
                          return a.box_index < b.box_index;
                      return tracks[live[a.live_index].track_index].track_id <
                             tracks[live[b.live_index].track_index].track_id;
                  });

        std::vector<bool> box_used(frame.boxes.size(), false);
        std::vector<bool> live_used(live.size(), false);
        for (const Candidate& c : candidates) {
            if (box_used[c.box_index] || live_used[c.live_index])
                continue;
            box_used[c.box_index] = true;
            live_used[c.live_index] = true;
            Live& l = live[c.live_index];
            tracks[l.track_index].observations.push_back(
                {frame.frame_index, frame.boxes[c.box_index].box});
            l.last_frame = frame.frame_index;
        }
        for (std::size_t b = 0; b < frame.boxes.size(); ++b) {
            if (box_used[b])
                continue;
            Track t;
            t.track_id = static_cast<int>(tracks.size());
            t.observations.push_back({frame.frame_index, frame.boxes[b].box});
            tracks.push_back(std::move(t));
            live.push_back({tracks.size() - 1, frame.frame_index});
        }
    }

    for (Track& t : tracks)
        prefix_estimates(t, t.observations.size(), cfg, origin, t.speed,
                         t.direction);
    return tracks;
}

std::vector<std::vector<TrackedBox>>
per_frame_tracked_boxes(const std::vector<Track>& tracks, int num_frames,
                        const TrackerConfig& cfg, Point origin)
{
    std::vector<std::vector<TrackedBox>> frames(
        static_cast<std::size_t>(std::max(num_frames, 0)));
    for (const Track& track : tracks) {
        for (std::size_t i = 0; i < track.observations.size(); ++i) {
            const Observation& obs = track.observations[i];
            if (obs.frame_index < 0 || obs.frame_index >= num_frames)
                continue;
            TrackedBox tb;
            tb.box = obs.box;
            tb.track_id = track.track_id;
            prefix_estimates(track, i + 1, cfg, origin, tb.speed, tb.direction);
            frames[static_cast<std::size_t>(obs.frame_index)].push_back(tb);
        }
    }
    // Stable order inside a frame: by track id.
    for (auto& boxes : frames)
        std::sort(boxes.begin(), boxes.end(),
                  [](const TrackedBox& a, const TrackedBox& b) {
                      return a.track_id < b.track_id;
                  });
    return frames;
}

std::vector<TrackedBox> directional_filter(const std::vector<TrackedBox>& boxes,
                                           std::optional<int> divider_x,
                                           Point origin)
{
    if (!divider_x)
        return boxes;
    const double d = *divider_x;
    std::vector<TrackedBox> kept;
    kept.reserve(boxes.size());
    for (const TrackedBox& tb : boxes) {
        const bool straddles = tb.box.x_min < d && tb.box.x_max > d;
        const double cx = tb.box.centroid().x;
        const bool far_side =
            origin.x < d ? cx > d : origin.x > d ? cx < d : false;
        if (straddles || !far_side)
            kept.push_back(tb);
    }
    return kept;
}

char direction_code(Direction d)
{
    switch (d) {
    case Direction::approaching: return 'A';
    case Direction::receding: return 'R';
    case Direction::stationary: return 'S';
    }
    return '?';
}

void export_tracks_csv(const std::vector<Track>& tracks, int num_frames,
                       const TrackerConfig& cfg, Point origin,
                       const std::filesystem::path& path)
{
    const auto frames = per_frame_tracked_boxes(tracks, num_frames, cfg, origin);
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "track_id,frame_index,x_min,y_min,x_max,y_max,speed,direction\n";
    char buf[64];
    for (int n = 0; n < num_frames; ++n) {
        for (const TrackedBox& tb : frames[static_cast<std::size_t>(n)]) {
            std::snprintf(buf, sizeof(buf), "%.6f", tb.speed);
            out << tb.track_id << ',' << n << ',' << tb.box.x_min << ','
                << tb.box.y_min << ',' << tb.box.x_max << ',' << tb.box.y_max
                << ',' << buf << ',' << direction_code(tb.direction) << '\n';
        }
    }
}

std::vector<std::vector<TrackedBox>>
import_tracks_csv(const std::filesystem::path& path, int num_frames)
{
    const auto rows = csv::read_rows(
        path, "track_id,frame_index,x_min,y_min,x_max,y_max,speed,direction");
    std::vector<std::vector<TrackedBox>> frames(
        static_cast<std::size_t>(std::max(num_frames, 0)));
    for (const csv::Row& row : rows) {
        TrackedBox tb;
        tb.track_id =
            static_cast<int>(csv::parse_int(row.fields[0], path, row.line_number));
        const long long frame =
            csv::parse_int(row.fields[1], path, row.line_number);
        tb.box.x_min =
            static_cast<int>(csv::parse_int(row.fields[2], path, row.line_number));
        tb.box.y_min =
            static_cast<int>(csv::parse_int(row.fields[3], path, row.line_number));
        tb.box.x_max =
            static_cast<int>(csv::parse_int(row.fields[4], path, row.line_number));
        tb.box.y_max =
            static_cast<int>(csv::parse_int(row.fields[5], path, row.line_number));
        tb.speed = csv::parse_double(row.fields[6], path, row.line_number);
        const std::string& dir = row.fields[7];
        if (dir == "A")
            tb.direction = Direction::approaching;
        else if (dir == "R")
            tb.direction = Direction::receding;
        else if (dir == "S")
            tb.direction = Direction::stationary;
        else
            throw csv::ParseError(path.string() + ":" +
                                  std::to_string(row.line_number) +
                                  ": direction must be A, R or S");
        if (frame < 0 || frame >= num_frames)
            throw csv::ParseError(path.string() + ":" +
                                  std::to_string(row.line_number) +
                                  ": frame_index out of range");
        frames[static_cast<std::size_t>(frame)].push_back(tb);
    }
    return frames;
}

} // namespace roadcross::tracking
