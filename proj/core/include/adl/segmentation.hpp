#pragma once

#include <array>
#include <span>
#include <vector>

#include "adl/motion.hpp"

namespace adl {

inline constexpr int kMinSegmentFrames = 5;
inline constexpr int kMaxSegmentFrames = 1000;

// Tracks the four image corners under cumulative ego-motion within the
// current segment. A corner that has drifted at least s*w from its position
// at segment start is flagged outbound; flags never reset within a segment.
struct CornerTracker {
    int segment_start_frame = 0;
    std::array<Vec2, 4> corner_positions{};
    std::array<Vec2, 4> corner_origins{};
    std::array<bool, 4> outbound_flags{};

    static CornerTracker start(int frame, int width, int height);

    int outbound_count() const;
};

// Temporal "viewpoint" interval [t_min, t_max] with its key frame.
struct Segment {
    int t_min = 0;
    int t_max = 0;
    int key_frame = 0;

    int length() const { return t_max - t_min + 1; }
};

// Applies one frame's motion model to the corner positions (p <- p + A(p))
// and updates outbound flags. The distance test is inclusive: >= s*w.
CornerTracker advance_tracker(CornerTracker tracker, const AffineMotion& model,
                              int width, double s);

// Partitions [0, models.size()-1] into segments. A segment closes at the
// first frame where at least 3 corners are outbound (never before 5 frames)
// or when it reaches 1000 frames. A tail shorter than 5 frames merges into
// its predecessor. Throws EmptyStream on an empty model sequence.
std::vector<Segment> segment_stream(std::span<const AffineMotion> models,
                                    int width, int height, double s);

// Temporal center, even lengths tie-break toward the earlier frame.
int key_frame(const Segment& segment);

}  // namespace adl
