#include "roadcross/scene_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "roadcross/csv.hpp"
#include "roadcross/rng.hpp"
#include "roadcross/text.hpp"

namespace roadcross::sim {

namespace {

constexpr double kSpawnMargin = 12.0; // gap between a receding spawn and the corridor

void fail_field(const std::string& field, const std::string& why)
{
    throw std::invalid_argument("invalid scenario config: " + field + " " + why);
}

// x interval a lane's vehicles may occupy, derived from the divider side.
void lane_x_range(const ScenarioConfig& cfg, const LaneSpec& lane, double& lo,
                  double& hi)
{
    lo = 0.0;
    hi = static_cast<double>(cfg.frame_width);
    if (!cfg.divider_x)
        return;
    const double d = *cfg.divider_x;
    const bool origin_left = cfg.origin.x < d;
    const bool near = lane.side == Side::near_side;
    if (near == origin_left)
        hi = d;
    else
        lo = d;
}

} // namespace

void corridor_bounds(const ScenarioConfig& cfg, double& lo, double& hi)
{
    lo = std::max(0.0, cfg.origin.x - cfg.corridor_half_width);
    hi = std::min(static_cast<double>(cfg.frame_width),
                  cfg.origin.x + cfg.corridor_half_width);
}

void ScenarioConfig::validate() const
{
    if (frame_width <= 0)
        fail_field("frame_width", "must be positive");
    if (frame_height <= 0)
        fail_field("frame_height", "must be positive");
    if (fps <= 0.0)
        fail_field("fps", "must be positive");
    if (num_frames < 0)
        fail_field("num_frames", "must be non-negative");
    if (crossing_time <= 0.0)
        fail_field("crossing_time", "must be positive");
    if (corridor_half_width <= 0.0)
        fail_field("corridor_half_width", "must be positive");
    if (arrival_rate_per_lane < 0.0)
        fail_field("arrival_rate_per_lane", "must be non-negative");
    if (box_growth < 0.0)
        fail_field("box_growth", "must be non-negative");
    if (origin.x < 0.0 || origin.x > frame_width || origin.y < 0.0 ||
        origin.y > frame_height)
        fail_field("origin", "must lie within frame bounds");
    if (divider_x && (*divider_x <= 0 || *divider_x >= frame_width))
        fail_field("divider_x", "must lie strictly inside the frame");
    for (const LaneSpec& lane : lanes) {
        const std::string tag = "lane." + std::to_string(lane.lane_id);
        if (lane.y_min < 0 || lane.y_max > frame_height || lane.y_min >= lane.y_max)
            fail_field(tag + ".y_band", "must be a non-empty band inside the frame");
        if (lane.speed_min <= 0.0 || lane.speed_min > lane.speed_max)
            fail_field(tag + ".speed_range", "must satisfy 0 < min <= max");
        if (lane.width_min <= 0 || lane.width_min > lane.width_max)
            fail_field(tag + ".width_range", "must satisfy 0 < min <= max");
        if (lane.height_min <= 0 || lane.height_min > lane.height_max)
            fail_field(tag + ".height_range", "must satisfy 0 < min <= max");
    }
}

ScenarioConfig ScenarioConfig::default_config()
{
    ScenarioConfig cfg;
    cfg.num_frames = 600;
    cfg.divider_x = 1400;
    cfg.origin = {960.0, 1060.0};
    cfg.crossing_time = 4.0;
    cfg.corridor_half_width = 288.0;
    cfg.arrival_rate_per_lane = 0.22;
    cfg.box_growth = 0.5;
    cfg.rng_seed = 42;
    cfg.lanes = {
        {0, Side::near_side, LaneDirection::approaching, 620, 760, 5.0, 9.0, 90, 150, 55, 90},
        {1, Side::near_side, LaneDirection::receding, 830, 960, 5.0, 9.0, 90, 150, 55, 90},
        {2, Side::far_side, LaneDirection::approaching, 290, 380, 5.0, 9.0, 60, 100, 40, 65},
        {3, Side::far_side, LaneDirection::receding, 440, 520, 5.0, 9.0, 60, 100, 40, 65},
    };
    return cfg;
}

ScenarioConfig ScenarioConfig::linear_oracle_config()
{
    // Geometry tuned so that "unsafe" is exactly "some vehicle on screen":
    // spawn at x=1920 moving left at 7 px/frame, corridor [0, 450], horizon
    // 210 frames; a vehicle reaches the corridor 210 frames after arrival and
    // leaves the frame (and the corridor) at the same moment.
    ScenarioConfig cfg;
    cfg.num_frames = 400;
    cfg.divider_x.reset();
    cfg.origin = {200.0, 1060.0};
    cfg.crossing_time = 7.0;
    cfg.corridor_half_width = 250.0;
    cfg.arrival_rate_per_lane = 0.05;
    cfg.box_growth = 0.5;
    cfg.rng_seed = 1;
    cfg.lanes = {
        {0, Side::near_side, LaneDirection::approaching, 700, 860, 7.0, 7.0, 100, 100, 60, 60},
    };
    return cfg;
}

double vehicle_center_x_at(const VehicleTrack& v, int frame)
{
    return v.spawn_x + v.velocity_x * (frame - v.arrival_frame);
}

bool vehicle_exists_at(const VehicleTrack& v, int frame)
{
    if (frame < v.arrival_frame)
        return false;
    const double cx = vehicle_center_x_at(v, frame);
    return cx >= v.range_lo && cx <= v.range_hi;
}

std::optional<Box> vehicle_box_at(const ScenarioConfig& cfg,
                                  const VehicleTrack& v, int frame)
{
    if (!vehicle_exists_at(v, frame))
        return std::nullopt;
    const double cx = vehicle_center_x_at(v, frame);
    const double proximity = 1.0 - std::abs(cx - cfg.origin.x) / cfg.frame_width;
    const double scale = 1.0 + cfg.box_growth * proximity;
    const double w = v.base_width * scale;
    const double h = v.base_height * scale;
    Box box;
    box.x_min = static_cast<int>(std::llround(cx - w / 2.0));
    box.x_max = static_cast<int>(std::llround(cx + w / 2.0));
    box.y_min = static_cast<int>(std::llround(v.y_center - h / 2.0));
    box.y_max = static_cast<int>(std::llround(v.y_center + h / 2.0));
    box.x_min = std::clamp(box.x_min, 0, cfg.frame_width);
    box.x_max = std::clamp(box.x_max, 0, cfg.frame_width);
    box.y_min = std::clamp(box.y_min, 0, cfg.frame_height);
    box.y_max = std::clamp(box.y_max, 0, cfg.frame_height);
    if (!box.valid())
        return std::nullopt;
    return box;
}

namespace {

// Spawn position and signed velocity for a vehicle of the given lane.
void spawn_kinematics(const ScenarioConfig& cfg, const LaneSpec& lane,
                      double speed, double& spawn_x, double& velocity_x,
                      double& range_lo, double& range_hi)
{
    lane_x_range(cfg, lane, range_lo, range_hi);
    if (lane.direction == LaneDirection::approaching) {
        // Enter at the range boundary farther from the pedestrian and drive
        // through; ties go to the right boundary.
        const bool from_right = std::abs(range_hi - cfg.origin.x) >=
                                std::abs(cfg.origin.x - range_lo);
        spawn_x = from_right ? range_hi : range_lo;
        velocity_x = from_right ? -speed : speed;
        return;
    }
    // Receding: start just outside the corridor (or at the near range edge
    // when the corridor is outside the lane range) and move away from origin.
    double corr_lo = 0.0, corr_hi = 0.0;
    corridor_bounds(cfg, corr_lo, corr_hi);
    if (cfg.origin.x < range_lo) {
        spawn_x = range_lo + kSpawnMargin;
        velocity_x = speed;
    } else if (cfg.origin.x > range_hi) {
        spawn_x = range_hi - kSpawnMargin;
        velocity_x = -speed;
    } else {
        const double room_left = (corr_lo - kSpawnMargin) - range_lo;
        const double room_right = range_hi - (corr_hi + kSpawnMargin);
        if (room_left >= room_right) {
            spawn_x = std::max(range_lo, corr_lo - kSpawnMargin);
            velocity_x = -speed;
        } else {
            spawn_x = std::min(range_hi, corr_hi + kSpawnMargin);
            velocity_x = speed;
        }
    }
}

} // namespace

Scenario generate_scenario(const ScenarioConfig& cfg)
{
    cfg.validate();
    Scenario scenario;
    scenario.config = cfg;

    // Per-lane Poisson arrivals on an independent, seed-split RNG stream.
    // Draw order per vehicle is fixed: gap, speed, width, height, y_center.
    std::vector<VehicleTrack> vehicles;
    for (const LaneSpec& lane : cfg.lanes) {
        if (cfg.arrival_rate_per_lane <= 0.0)
            continue;
        Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(lane.lane_id)));
        const double rate_per_frame = cfg.arrival_rate_per_lane / cfg.fps;
        double t = 0.0;
        while (true) {
            t += rng.exponential(rate_per_frame);
            if (!(t < cfg.num_frames))
                break;
            VehicleTrack v;
            v.lane_id = lane.lane_id;
            v.arrival_frame = t;
            const double speed = rng.range(lane.speed_min, lane.speed_max);
            v.base_width = rng.range(lane.width_min, lane.width_max);
            v.base_height = rng.range(lane.height_min, lane.height_max);
            const double half_h = v.base_height / 2.0;
            const double y_lo = lane.y_min + half_h;
            const double y_hi = lane.y_max - half_h;
            v.y_center = y_lo <= y_hi ? rng.range(y_lo, y_hi)
                                      : (lane.y_min + lane.y_max) / 2.0;
            spawn_kinematics(cfg, lane, speed, v.spawn_x, v.velocity_x,
                             v.range_lo, v.range_hi);
            vehicles.push_back(v);
        }
    }
    std::stable_sort(vehicles.begin(), vehicles.end(),
                     [](const VehicleTrack& a, const VehicleTrack& b) {
                         if (a.arrival_frame != b.arrival_frame)
                             return a.arrival_frame < b.arrival_frame;
                         return a.lane_id < b.lane_id;
                     });
    for (std::size_t i = 0; i < vehicles.size(); ++i)
        vehicles[i].vehicle_id = static_cast<int>(i);
    scenario.trajectories = std::move(vehicles);

    scenario.frames.resize(cfg.num_frames);
    for (int n = 0; n < cfg.num_frames; ++n) {
        FrameRecord& rec = scenario.frames[n];
        rec.frame_index = n;
        for (const VehicleTrack& v : scenario.trajectories) {
            if (auto box = vehicle_box_at(cfg, v, n))
                rec.boxes.push_back({v.vehicle_id, *box});
        }
    }

    const std::vector<SafetyLabel> labels = label_safety(scenario);
    for (int n = 0; n < cfg.num_frames; ++n)
        scenario.frames[n].truth_label = labels[n];
    return scenario;
}

std::vector<SafetyLabel> label_safety(const Scenario& scenario)
{
    const ScenarioConfig& cfg = scenario.config;
    std::vector<SafetyLabel> labels(cfg.num_frames, SafetyLabel::safe);
    const long long horizon = std::llround(cfg.crossing_time * cfg.fps);
    double corr_lo = 0.0, corr_hi = 0.0;
    corridor_bounds(cfg, corr_lo, corr_hi);

    std::map<int, const LaneSpec*> lane_by_id;
    for (const LaneSpec& lane : cfg.lanes)
        lane_by_id[lane.lane_id] = &lane;

    for (const VehicleTrack& v : scenario.trajectories) {
        const LaneSpec* lane = lane_by_id.at(v.lane_id);
        if (lane->side != Side::near_side ||
            lane->direction != LaneDirection::approaching)
            continue;
        // In-corridor frames form one contiguous integer interval because
        // motion is linear; scan from arrival until the vehicle leaves its
        // range (extrapolating past the recorded scenario end).
        long long first_in = -1, last_in = -1;
        for (long long m = static_cast<long long>(std::ceil(v.arrival_frame));;
             ++m) {
            if (!vehicle_exists_at(v, static_cast<int>(m)))
                break;
            const double cx = vehicle_center_x_at(v, static_cast<int>(m));
            if (cx >= corr_lo && cx <= corr_hi) {
                if (first_in < 0)
                    first_in = m;
                last_in = m;
            } else if (first_in >= 0) {
                break;
            }
        }
        if (first_in < 0)
            continue;
        const long long n_lo = std::max(0LL, first_in - horizon);
        const long long n_hi = std::min<long long>(cfg.num_frames - 1, last_in);
        for (long long n = n_lo; n <= n_hi; ++n)
            labels[static_cast<std::size_t>(n)] = SafetyLabel::unsafe;
    }
    return labels;
}

void export_dataset(const Scenario& scenario, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "boxes.csv");
        if (!out)
            throw std::runtime_error("cannot write " + (dir / "boxes.csv").string());
        out << "frame_index,vehicle_id,x_min,y_min,x_max,y_max\n";
        for (const FrameRecord& rec : scenario.frames)
            for (const BoxObs& obs : rec.boxes)
                out << rec.frame_index << ',' << obs.vehicle_id << ','
                    << obs.box.x_min << ',' << obs.box.y_min << ','
                    << obs.box.x_max << ',' << obs.box.y_max << '\n';
    }
    {
        std::ofstream out(dir / "labels.csv");
        if (!out)
            throw std::runtime_error("cannot write " + (dir / "labels.csv").string());
        out << "frame_index,label\n";
        for (const FrameRecord& rec : scenario.frames)
            out << rec.frame_index << ','
                << static_cast<int>(rec.truth_label) << '\n';
    }
}

ImportedDataset import_dataset(const std::filesystem::path& dir)
{
    const auto labels_path = dir / "labels.csv";
    const auto boxes_path = dir / "boxes.csv";
    ImportedDataset data;

    const auto label_rows = csv::read_rows(labels_path, "frame_index,label");
    data.frames.resize(label_rows.size());
    for (std::size_t i = 0; i < label_rows.size(); ++i) {
        const csv::Row& row = label_rows[i];
        const long long frame =
            csv::parse_int(row.fields[0], labels_path, row.line_number);
        const long long label =
            csv::parse_int(row.fields[1], labels_path, row.line_number);
        if (frame != static_cast<long long>(i))
            throw csv::ParseError(labels_path.string() + ":" +
                                  std::to_string(row.line_number) +
                                  ": frame indices must be 0..N-1 in order");
        if (label != 0 && label != 1)
            throw csv::ParseError(labels_path.string() + ":" +
                                  std::to_string(row.line_number) +
                                  ": label must be 0 or 1");
        data.frames[i].frame_index = static_cast<int>(frame);
        data.frames[i].truth_label = static_cast<SafetyLabel>(label);
    }

    const auto box_rows =
        csv::read_rows(boxes_path, "frame_index,vehicle_id,x_min,y_min,x_max,y_max");
    for (const csv::Row& row : box_rows) {
        const long long frame =
            csv::parse_int(row.fields[0], boxes_path, row.line_number);
        if (frame < 0 || frame >= static_cast<long long>(data.frames.size()))
            throw csv::ParseError(boxes_path.string() + ":" +
                                  std::to_string(row.line_number) +
                                  ": frame_index out of range");
        BoxObs obs;
        obs.vehicle_id = static_cast<int>(
            csv::parse_int(row.fields[1], boxes_path, row.line_number));
        obs.box.x_min = static_cast<int>(
            csv::parse_int(row.fields[2], boxes_path, row.line_number));
        obs.box.y_min = static_cast<int>(
            csv::parse_int(row.fields[3], boxes_path, row.line_number));
        obs.box.x_max = static_cast<int>(
            csv::parse_int(row.fields[4], boxes_path, row.line_number));
        obs.box.y_max = static_cast<int>(
            csv::parse_int(row.fields[5], boxes_path, row.line_number));
        if (!obs.box.valid())
            throw csv::ParseError(boxes_path.string() + ":" +
                                  std::to_string(row.line_number) +
                                  ": degenerate box");
        data.frames[static_cast<std::size_t>(frame)].boxes.push_back(obs);
    }
    return data;
}

const char* to_string(Side side)
{
    return side == Side::near_side ? "near" : "far";
}

const char* to_string(LaneDirection direction)
{
    return direction == LaneDirection::approaching ? "approaching" : "receding";
}

namespace {

Side parse_side(const std::string& s, const std::filesystem::path& path)
{
    if (s == "near")
        return Side::near_side;
    if (s == "far")
        return Side::far_side;
    throw std::runtime_error(path.string() + ": bad lane side '" + s + "'");
}

LaneDirection parse_direction(const std::string& s,
                              const std::filesystem::path& path)
{
    if (s == "approaching")
        return LaneDirection::approaching;
    if (s == "receding")
        return LaneDirection::receding;
    throw std::runtime_error(path.string() + ": bad lane direction '" + s + "'");
}

} // namespace

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());

    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" +
                                     std::to_string(line_number) +
                                     ": expected key=value");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }

    ScenarioConfig cfg;
    cfg.lanes.clear();
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end())
            return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_int = [&](const char* key, int& dst) {
        if (auto v = take(key))
            dst = static_cast<int>(csv::parse_int(*v, path, 0));
    };
    auto take_double = [&](const char* key, double& dst) {
        if (auto v = take(key))
            dst = csv::parse_double(*v, path, 0);
    };

    take_int("frame_width", cfg.frame_width);
    take_int("frame_height", cfg.frame_height);
    take_double("fps", cfg.fps);
    take_int("num_frames", cfg.num_frames);
    take_double("origin_x", cfg.origin.x);
    take_double("origin_y", cfg.origin.y);
    take_double("crossing_time", cfg.crossing_time);
    take_double("corridor_half_width", cfg.corridor_half_width);
    take_double("arrival_rate_per_lane", cfg.arrival_rate_per_lane);
    take_double("box_growth", cfg.box_growth);
    if (auto v = take("divider_x"))
        cfg.divider_x = static_cast<int>(csv::parse_int(*v, path, 0));
    if (auto v = take("rng_seed"))
        cfg.rng_seed = static_cast<std::uint64_t>(csv::parse_int(*v, path, 0));

    for (int i = 0;; ++i) {
        const std::string prefix = "lane." + std::to_string(i) + ".";
        if (kv.find(prefix + "side") == kv.end())
            break;
        LaneSpec lane;
        lane.lane_id = i;
        lane.side = parse_side(*take((prefix + "side").c_str()), path);
        lane.direction = parse_direction(*take((prefix + "direction").c_str()), path);
        take_int((prefix + "y_min").c_str(), lane.y_min);
        take_int((prefix + "y_max").c_str(), lane.y_max);
        take_double((prefix + "speed_min").c_str(), lane.speed_min);
        take_double((prefix + "speed_max").c_str(), lane.speed_max);
        take_int((prefix + "width_min").c_str(), lane.width_min);
        take_int((prefix + "width_max").c_str(), lane.width_max);
        take_int((prefix + "height_min").c_str(), lane.height_min);
        take_int((prefix + "height_max").c_str(), lane.height_max);
        cfg.lanes.push_back(lane);
    }
    if (!kv.empty())
        throw std::runtime_error(path.string() + ": unknown config key '" +
                                 kv.begin()->first + "'");
    cfg.validate();
    return cfg;
}

void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "frame_width=" << cfg.frame_width << '\n'
        << "frame_height=" << cfg.frame_height << '\n'
        << "fps=" << format_double(cfg.fps) << '\n'
        << "num_frames=" << cfg.num_frames << '\n';
    if (cfg.divider_x)
        out << "divider_x=" << *cfg.divider_x << '\n';
    out << "origin_x=" << format_double(cfg.origin.x) << '\n'
        << "origin_y=" << format_double(cfg.origin.y) << '\n'
        << "crossing_time=" << format_double(cfg.crossing_time) << '\n'
        << "corridor_half_width=" << format_double(cfg.corridor_half_width) << '\n'
        << "arrival_rate_per_lane=" << format_double(cfg.arrival_rate_per_lane) << '\n'
        << "box_growth=" << format_double(cfg.box_growth) << '\n'
        << "rng_seed=" << cfg.rng_seed << '\n';
    for (std::size_t i = 0; i < cfg.lanes.size(); ++i) {
        const LaneSpec& lane = cfg.lanes[i];
        const std::string p = "lane." + std::to_string(i) + ".";
        out << p << "side=" << to_string(lane.side) << '\n'
            << p << "direction=" << to_string(lane.direction) << '\n'
            << p << "y_min=" << lane.y_min << '\n'
            << p << "y_max=" << lane.y_max << '\n'
            << p << "speed_min=" << format_double(lane.speed_min) << '\n'
            << p << "speed_max=" << format_double(lane.speed_max) << '\n'
            << p << "width_min=" << lane.width_min << '\n'
            << p << "width_max=" << lane.width_max << '\n'
            << p << "height_min=" << lane.height_min << '\n'
            << p << "height_max=" << lane.height_max << '\n';
    }
}

} // namespace roadcross::sim
