#include <doctest.h>

#include <stdexcept>

#include "roadcross/decision.hpp"
#include "roadcross/rng.hpp"

using namespace roadcross;

namespace {

std::vector<decision::AssistantEvent>
feed(decision::DecisionState& state, const decision::DecisionConfig& cfg,
     const std::vector<double>& probs, long long first_frame = 0)
{
    std::vector<decision::AssistantEvent> events;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const auto e = decision::update(state, cfg, probs[i],
                                        first_frame + static_cast<long long>(i));
        if (e.kind != decision::EventKind::none)
            events.push_back(e);
    }
    return events;
}

} // namespace

TEST_CASE("session start emits activation then orientation")
{
    const decision::DecisionConfig cfg;
    const auto s = decision::start_session(cfg);
    REQUIRE(s.events.size() == 2);
    CHECK(s.events[0].kind == decision::EventKind::activated);
    CHECK(s.events[1].kind == decision::EventKind::orient_to_traffic);
    CHECK(s.state.consecutive_safe_count == 0);
    CHECK_FALSE(s.state.announced);

    auto s2 = decision::start_session(cfg);
    decision::update(s2.state, cfg, 0.99, 0);
    CHECK(s2.state.consecutive_safe_count == 1);
    CHECK(s.state.consecutive_safe_count == 0); // sessions are independent
}

TEST_CASE("five consecutive safe frames announce exactly on the fifth")
{
    const decision::DecisionConfig cfg; // 0.85 / 5
    auto s = decision::start_session(cfg);
    for (int i = 0; i < 4; ++i) {
        const auto e = decision::update(s.state, cfg, 0.9, i);
        CHECK(e.kind == decision::EventKind::none);
    }
    const auto e = decision::update(s.state, cfg, 0.9, 4);
    CHECK(e.kind == decision::EventKind::safe_to_cross);
    CHECK(e.frame_index == 4);
    // streak continues without re-announcing
    CHECK(decision::update(s.state, cfg, 0.9, 5).kind ==
          decision::EventKind::none);
}

TEST_CASE("a sub-threshold frame inside the streak blocks the announcement")
{
    const decision::DecisionConfig cfg;
    auto s = decision::start_session(cfg);
    const auto events = feed(s.state, cfg, {0.9, 0.9, 0.9, 0.9, 0.8});
    CHECK(events.empty());
}

TEST_CASE("broken streak re-announces after five fresh safe frames")
{
    const decision::DecisionConfig cfg;
    auto s = decision::start_session(cfg);
    // hand-traced: counts 1,2,3,4 -> reset -> 1,2,3,4,5(announce)
    const std::vector<double> probs{0.9, 0.9, 0.9, 0.9, 0.1,
                                    0.9, 0.9, 0.9, 0.9, 0.9};
    std::vector<int> expected_counts{1, 2, 3, 4, 0, 1, 2, 3, 4, 5};
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const auto e = decision::update(s.state, cfg, probs[i],
                                        static_cast<long long>(i));
        CHECK(s.state.consecutive_safe_count ==
              expected_counts[i]);
        if (i + 1 == probs.size()) {
            CHECK(e.kind == decision::EventKind::safe_to_cross);
            CHECK(e.frame_index == 9);
        } else {
            CHECK(e.kind == decision::EventKind::none);
        }
    }
}

TEST_CASE("probability equal to the threshold counts as unsafe")
{
    const decision::DecisionConfig cfg;
    auto s = decision::start_session(cfg);
    const auto events = feed(s.state, cfg, {0.9, 0.9, 0.9, 0.9, 0.85, 0.9});
    CHECK(events.empty());
    CHECK(s.state.consecutive_safe_count == 1);
}

TEST_CASE("probabilities outside [0,1] are rejected")
{
    const decision::DecisionConfig cfg;
    auto s = decision::start_session(cfg);
    CHECK_THROWS_AS(decision::update(s.state, cfg, 1.2, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(decision::update(s.state, cfg, -0.1, 0),
                    std::invalid_argument);
}

TEST_CASE("config validation")
{
    decision::DecisionConfig cfg;
    cfg.probability_threshold = 1.0;
    CHECK_THROWS_AS(decision::start_session(cfg), std::invalid_argument);
    cfg = {};
    cfg.required_consecutive_safe = 0;
    CHECK_THROWS_AS(decision::start_session(cfg), std::invalid_argument);
}

TEST_CASE("random streams: exactly-once per streak and replay determinism")
{
    const decision::DecisionConfig cfg;
    Rng rng(40);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> probs;
        for (int i = 0; i < 200; ++i)
            probs.push_back(rng.range(0.0, 1.0) < 0.3 ? rng.range(0.86, 1.0)
                                                      : rng.range(0.0, 0.86));
        std::vector<std::pair<long long, double>> stream;
        for (std::size_t i = 0; i < probs.size(); ++i)
            stream.emplace_back(static_cast<long long>(i), probs[i]);

        const auto events = decision::run_session(cfg, stream);
        REQUIRE(events.size() >= 2);
        CHECK(events[0].kind == decision::EventKind::activated);
        CHECK(events[1].kind == decision::EventKind::orient_to_traffic);

        // between two announcements there is at least one sub-threshold frame
        long long prev_announce = -1;
        for (std::size_t e = 2; e < events.size(); ++e) {
            REQUIRE(events[e].kind == decision::EventKind::safe_to_cross);
            const long long frame = events[e].frame_index;
            // the five frames ending here are all strictly above threshold
            for (long long m = frame - cfg.required_consecutive_safe + 1;
                 m <= frame; ++m)
                REQUIRE(probs[static_cast<std::size_t>(m)] >
                        cfg.probability_threshold);
            if (prev_announce >= 0) {
                bool has_unsafe_between = false;
                for (long long m = prev_announce + 1; m <= frame; ++m)
                    has_unsafe_between |=
                        probs[static_cast<std::size_t>(m)] <=
                        cfg.probability_threshold;
                REQUIRE(has_unsafe_between);
            }
            prev_announce = frame;
        }

        // pure fold: replaying the same stream yields the same events
        const auto replay = decision::run_session(cfg, stream);
        REQUIRE(replay.size() == events.size());
        for (std::size_t e = 0; e < events.size(); ++e) {
            CHECK(replay[e].kind == events[e].kind);
            CHECK(replay[e].frame_index == events[e].frame_index);
        }
    }
}
