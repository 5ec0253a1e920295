#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "roadcross/eval.hpp"
#include "roadcross/rng.hpp"

using namespace roadcross;

namespace {

std::vector<int> iota_ids(int count)
{
    std::vector<int> ids(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        ids[static_cast<std::size_t>(i)] = i;
    return ids;
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("104 videos split 80/24 by video")
{
    const auto splits = eval::split_videos(iota_ids(104),
                                           {eval::SplitMode::two_way, 80, 24, 0, 5});
    CHECK(splits.train.size() == 80);
    CHECK(splits.test.size() == 24);
    CHECK(splits.validation.empty());

    std::set<int> seen;
    for (int id : splits.train)
        CHECK(seen.insert(id).second);
    for (int id : splits.test)
        CHECK(seen.insert(id).second);
    CHECK(seen.size() == 104);
}

TEST_CASE("104 videos split 66/22/16 three ways")
{
    const auto splits = eval::split_videos(
        iota_ids(104), {eval::SplitMode::three_way, 66, 22, 16, 9});
    CHECK(splits.train.size() == 66);
    CHECK(splits.test.size() == 22);
    CHECK(splits.validation.size() == 16);

    std::set<int> seen;
    for (const auto* part : {&splits.train, &splits.test, &splits.validation})
        for (int id : *part)
            CHECK(seen.insert(id).second);
    CHECK(seen.size() == 104);
}

TEST_CASE("splits are deterministic in the seed")
{
    const eval::SplitSpec spec{eval::SplitMode::two_way, 80, 24, 0, 123};
    const auto a = eval::split_videos(iota_ids(104), spec);
    const auto b = eval::split_videos(iota_ids(104), spec);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);

    auto other = spec;
    other.rng_seed = 124;
    const auto c = eval::split_videos(iota_ids(104), other);
    CHECK(a.train != c.train);
}

TEST_CASE("inconsistent split counts are rejected")
{
    CHECK_THROWS_AS(
        eval::split_videos(iota_ids(104), {eval::SplitMode::two_way, 80, 23, 0, 0}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        eval::split_videos(iota_ids(10), {eval::SplitMode::three_way, 9, 1, 0, 0}),
        std::invalid_argument);
}

TEST_CASE("metrics from confusion counts")
{
    SUBCASE("precision 0.9 from TP=9 FP=1")
    {
        std::vector<int> preds, truths;
        for (int i = 0; i < 9; ++i) {
            preds.push_back(1);
            truths.push_back(1);
        }
        preds.push_back(1);
        truths.push_back(0);
        const auto m = eval::compute_metrics(preds, truths);
        CHECK(m.true_positives == 9);
        CHECK(m.false_positives == 1);
        REQUIRE(m.precision.has_value());
        CHECK(*m.precision == doctest::Approx(0.9));
    }
    SUBCASE("recall 0.87 from TP=87 FN=13")
    {
        std::vector<int> preds, truths;
        for (int i = 0; i < 87; ++i) {
            preds.push_back(1);
            truths.push_back(1);
        }
        for (int i = 0; i < 13; ++i) {
            preds.push_back(0);
            truths.push_back(1);
        }
        const auto m = eval::compute_metrics(preds, truths);
        REQUIRE(m.recall.has_value());
        CHECK(*m.recall == doctest::Approx(0.87));
    }
    SUBCASE("all-unsafe predictions leave precision undefined, recall 0")
    {
        const auto m = eval::compute_metrics({0, 0, 0}, {1, 0, 1});
        CHECK_FALSE(m.precision.has_value());
        REQUIRE(m.recall.has_value());
        CHECK(*m.recall == 0.0);
    }
    SUBCASE("length mismatch is an error")
    {
        CHECK_THROWS_AS(eval::compute_metrics({1}, {1, 0}), std::invalid_argument);
        CHECK_THROWS_AS(eval::compute_metrics({}, {}), std::invalid_argument);
    }
}

TEST_CASE("pr curve at strict thresholds")
{
    SUBCASE("perfect scorer is perfect at every interior threshold")
    {
        const std::vector<int> truths{1, 0, 1, 1, 0, 0, 1};
        std::vector<double> scores;
        for (int t : truths)
            scores.push_back(static_cast<double>(t));
        const auto points =
            eval::pr_curve(scores, truths, {0.1, 0.25, 0.5, 0.75, 0.9});
        for (const auto& p : points) {
            REQUIRE(p.precision.has_value());
            REQUIRE(p.recall.has_value());
            CHECK(*p.precision == 1.0);
            CHECK(*p.recall == 1.0);
        }
    }
    SUBCASE("constant scorer steps once")
    {
        const std::vector<int> truths{1, 0, 1, 0};
        const std::vector<double> scores(4, 0.5);
        const auto points = eval::pr_curve(scores, truths, {0.25, 0.5, 0.75});
        // below 0.5: everything positive
        REQUIRE(points[0].recall.has_value());
        CHECK(*points[0].recall == 1.0);
        CHECK(*points[0].precision == 0.5);
        // at and above 0.5 (strict >): nothing positive
        CHECK_FALSE(points[1].precision.has_value());
        CHECK(*points[1].recall == 0.0);
        CHECK_FALSE(points[2].precision.has_value());
        CHECK(*points[2].recall == 0.0);
    }
    SUBCASE("recall never increases with the threshold")
    {
        Rng rng(51);
        std::vector<double> scores;
        std::vector<int> truths;
        for (int i = 0; i < 300; ++i) {
            scores.push_back(rng.unit());
            truths.push_back(static_cast<int>(rng.index(2)));
        }
        const auto points =
            eval::pr_curve(scores, truths, eval::uniform_thresholds(101));
        for (std::size_t i = 1; i < points.size(); ++i)
            CHECK(*points[i].recall <= *points[i - 1].recall + 1e-15);
    }
}

TEST_CASE("report files are stable and shaped as expected")
{
    const auto dir = std::filesystem::temp_directory_path() / "roadcross_report";
    std::filesystem::create_directories(dir);

    std::vector<eval::MethodResult> results;
    results.push_back({"single_frame_svm", 0.68, 0.87, std::nullopt});
    results.push_back({"multi_frame_svm", 0.79, 0.84, 15.0});

    eval::write_report_csv(results, dir / "report.csv");
    const std::string first = slurp(dir / "report.csv");
    CHECK(first == "method,precision,recall,throughput_fps\n"
                   "single_frame_svm,0.6800,0.8700,\n"
                   "multi_frame_svm,0.7900,0.8400,15.000\n");

    eval::write_report_csv(results, dir / "report.csv");
    CHECK(slurp(dir / "report.csv") == first);

    eval::write_report_csv({}, dir / "empty.csv");
    CHECK(slurp(dir / "empty.csv") == "method,precision,recall,throughput_fps\n");

    results.push_back({"degenerate", std::nullopt, 0.0, std::nullopt});
    const std::string table = eval::format_report_table(results);
    CHECK(table.find("single_frame_svm") != std::string::npos);
    CHECK(table.find("undefined") != std::string::npos);
    CHECK(table.find("local wall clock") != std::string::npos);

    std::filesystem::remove_all(dir);
}
