#include <cmath>
#include <vector>

#include <doctest.h>

#include "adl/errors.hpp"
#include "adl/segmentation.hpp"

using namespace adl;

namespace {

std::vector<AffineMotion> constant_translation(int frames, double dx, double dy = 0.0) {
    return std::vector<AffineMotion>(frames, AffineMotion{dx, 0.0, 0.0, dy, 0.0, 0.0});
}

}  // namespace

TEST_CASE("constant 8px/frame translation cuts every 20 frames at s=0.5") {
    // 0.5 * 320 = 160 px; at 8 px/frame all four corners hit the threshold
    // on the 20th applied model, triggering-frame inclusive.
    const auto models = constant_translation(100, 8.0);
    const auto segments = segment_stream(models, 320, 240, 0.5);
    REQUIRE(segments.size() == 5);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        CHECK(segments[i].t_min == static_cast<int>(i) * 20);
        CHECK(segments[i].t_max == static_cast<int>(i) * 20 + 19);
        CHECK(segments[i].length() == 20);
    }
}

TEST_CASE("zero motion splits only at the 1000-frame cap") {
    const auto segments = segment_stream(constant_translation(2500, 0.0), 320, 240, 0.5);
    REQUIRE(segments.size() == 3);
    CHECK(segments[0].t_min == 0);
    CHECK(segments[0].t_max == 999);
    CHECK(segments[1].t_min == 1000);
    CHECK(segments[1].t_max == 1999);
    CHECK(segments[2].t_min == 2000);
    CHECK(segments[2].t_max == 2499);
    CHECK(segments[2].length() == 500);
}

TEST_CASE("segments never close before 5 frames") {
    // 100 px/frame crosses the threshold in 2 frames, but the minimum holds.
    const auto segments = segment_stream(constant_translation(20, 100.0), 320, 240, 0.5);
    for (const Segment& s : segments) CHECK(s.length() >= kMinSegmentFrames);
    int covered = 0;
    for (const Segment& s : segments) covered += s.length();
    CHECK(covered == 20);
}

TEST_CASE("a short tail merges into the previous segment") {
    // 23 frames at 8 px/frame: first cut at frame 19, remaining 3 frames are
    // below the minimum and merge backward.
    const auto segments = segment_stream(constant_translation(23, 8.0), 320, 240, 0.5);
    REQUIRE(segments.size() == 1);
    CHECK(segments[0].t_min == 0);
    CHECK(segments[0].t_max == 22);
}

TEST_CASE("segments tile the stream exactly") {
    std::vector<AffineMotion> models;
    for (int t = 0; t < 137; ++t) {
        models.push_back({t % 7 == 0 ? 12.0 : 1.0, 0.0, 0.0, -2.0, 0.0, 0.0});
    }
    const auto segments = segment_stream(models, 320, 240, 0.5);
    REQUIRE(!segments.empty());
    CHECK(segments.front().t_min == 0);
    CHECK(segments.back().t_max == 136);
    for (std::size_t i = 1; i < segments.size(); ++i) {
        CHECK(segments[i].t_min == segments[i - 1].t_max + 1);
    }
    for (const Segment& s : segments) {
        CHECK(s.length() >= kMinSegmentFrames);
        CHECK(s.length() <= kMaxSegmentFrames);
        CHECK(s.key_frame == (s.t_min + s.t_max) / 2);
    }
}

TEST_CASE("key frame is the temporal center, floor on even lengths") {
    CHECK(key_frame({0, 19, 0}) == 9);
    CHECK(key_frame({0, 20, 0}) == 10);
    CHECK(key_frame({10, 14, 0}) == 12);
    CHECK(key_frame({7, 7, 0}) == 7);
}

TEST_CASE("corner tracker flags stay set and count correctly") {
    CornerTracker tracker = CornerTracker::start(0, 320, 240);
    CHECK(tracker.outbound_count() == 0);
    CHECK(tracker.corner_positions[0].x == doctest::Approx(0.0));
    CHECK(tracker.corner_positions[3].x == doctest::Approx(319.0));
    CHECK(tracker.corner_positions[3].y == doctest::Approx(239.0));

    const AffineMotion shift{160.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    tracker = advance_tracker(tracker, shift, 320, 0.5);
    // Distance test is inclusive: exactly s*w counts as outbound.
    CHECK(tracker.outbound_count() == 4);

    // Flags persist even if later motion walks the corners back.
    const AffineMotion reverse{-160.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    tracker = advance_tracker(tracker, reverse, 320, 0.5);
    CHECK(tracker.outbound_count() == 4);
}

TEST_CASE("divergent zoom moves corners without a net translation") {
    // Pure scaling: dx = 0.002x, dy = 0.002y pushes all corners outward from
    // the origin corner, which itself never moves.
    CornerTracker tracker = CornerTracker::start(0, 320, 240);
    const AffineMotion zoom{0.0, 0.3, 0.0, 0.0, 0.0, 0.3};
    for (int t = 0; t < 3; ++t) tracker = advance_tracker(tracker, zoom, 320, 0.5);
    CHECK(tracker.outbound_flags[0] == false);  // (0,0) is a fixed point
    CHECK(tracker.outbound_count() == 3);
}

TEST_CASE("segment_stream rejects an empty model sequence") {
    CHECK_THROWS_AS(segment_stream(std::vector<AffineMotion>{}, 320, 240, 0.5), EmptyStream);
}
