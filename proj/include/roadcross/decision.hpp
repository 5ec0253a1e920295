#pragma once

#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

namespace roadcross::decision {

enum class RearmPolicy { rearm_on_unsafe };

struct DecisionConfig {
    double probability_threshold = 0.85;
    int required_consecutive_safe = 5;
    RearmPolicy rearm_policy = RearmPolicy::rearm_on_unsafe;

    void validate() const;
};

enum class EventKind { activated, orient_to_traffic, safe_to_cross, none };

struct AssistantEvent {
    EventKind kind = EventKind::none;
    long long frame_index = 0;
};

struct DecisionState {
    int consecutive_safe_count = 0;
    bool announced = false;
    // Recent (frame_index, probability) pairs, bounded by the streak length.
    std::deque<std::pair<long long, double>> history;
};

struct SessionStart {
    DecisionState state;
    std::vector<AssistantEvent> events; // [activated, orient_to_traffic]
};

// Fresh session; the two startup events carry frame_index -1 (pre-stream).
SessionStart start_session(const DecisionConfig& config);

// Probability strictly above the threshold extends the safe streak; anything
// at or below it resets the streak and re-arms the announcement. The
// safe_to_cross event fires exactly once per streak, on the update that
// completes it. Throws when probability is outside [0,1].
AssistantEvent update(DecisionState& state, const DecisionConfig& config,
                      double probability, long long frame_index);

// Full replay: startup events followed by every non-none update event.
std::vector<AssistantEvent> run_session(const DecisionConfig& config,
                                        const std::vector<std::pair<long long, double>>& probabilities);

const char* to_string(EventKind kind);

} // namespace roadcross::decision
