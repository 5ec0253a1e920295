#include "roadcross/decision.hpp"

#include <stdexcept>

namespace roadcross::decision {

void DecisionConfig::validate() const
{
    if (probability_threshold <= 0.0 || probability_threshold >= 1.0)
        throw std::invalid_argument("probability_threshold must be in (0,1)");
    if (required_consecutive_safe < 1)
        throw std::invalid_argument("required_consecutive_safe must be >= 1");
}

SessionStart start_session(const DecisionConfig& config)
{
    config.validate();
    SessionStart s;
    s.events = {{EventKind::activated, -1}, {EventKind::orient_to_traffic, -1}};
    return s;
}

AssistantEvent update(DecisionState& state, const DecisionConfig& config,
                      double probability, long long frame_index)
{
    if (!(probability >= 0.0 && probability <= 1.0))
        throw std::invalid_argument("probability must be in [0,1]");

    state.history.emplace_back(frame_index, probability);
    while (state.history.size() >
           static_cast<std::size_t>(config.required_consecutive_safe))
        state.history.pop_front();

    if (probability > config.probability_threshold) {
        ++state.consecutive_safe_count;
        if (state.consecutive_safe_count >= config.required_consecutive_safe &&
            !state.announced) {
            state.announced = true;
            return {EventKind::safe_to_cross, frame_index};
        }
    } else {
        // rearm_on_unsafe: the streak restarts and a new announcement becomes
        // possible once the streak completes again.
        state.consecutive_safe_count = 0;
        state.announced = false;
    }
    return {EventKind::none, frame_index};
}

std::vector<AssistantEvent> run_session(
    const DecisionConfig& config,
    const std::vector<std::pair<long long, double>>& probabilities)
{
    SessionStart s = start_session(config);
    std::vector<AssistantEvent> events = s.events;
    for (const auto& [frame, prob] : probabilities) {
        const AssistantEvent e = update(s.state, config, prob, frame);
        if (e.kind != EventKind::none)
            events.push_back(e);
    }
    return events;
}

const char* to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::activated: return "activated";
    case EventKind::orient_to_traffic: return "orient_to_traffic";
    case EventKind::safe_to_cross: return "safe_to_cross";
    case EventKind::none: return "none";
    }
    return "?";
}

} // namespace roadcross::decision
