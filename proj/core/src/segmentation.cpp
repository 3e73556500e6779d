#include "adl/segmentation.hpp"

#include <cmath>

#include "adl/errors.hpp"

namespace adl {

CornerTracker CornerTracker::start(int frame, int width, int height) {
    CornerTracker t;
    t.segment_start_frame = frame;
    const double w = static_cast<double>(width - 1);
    const double h = static_cast<double>(height - 1);
    t.corner_origins = {Vec2{0.0, 0.0}, Vec2{w, 0.0}, Vec2{0.0, h}, Vec2{w, h}};
    t.corner_positions = t.corner_origins;
    t.outbound_flags = {false, false, false, false};
    return t;
}

int CornerTracker::outbound_count() const {
    int n = 0;
    for (bool f : outbound_flags) n += f ? 1 : 0;
    return n;
}

CornerTracker advance_tracker(CornerTracker tracker, const AffineMotion& model,
                              int width, double s) {
    const double threshold = s * static_cast<double>(width);
    for (int c = 0; c < 4; ++c) {
        Vec2& p = tracker.corner_positions[c];
        const Vec2 d = model.apply(p);
        p.x += d.x;
        p.y += d.y;
        const double dist = std::hypot(p.x - tracker.corner_origins[c].x,
                                       p.y - tracker.corner_origins[c].y);
        if (dist >= threshold) {
            tracker.outbound_flags[c] = true;
        }
    }
    return tracker;
}

int key_frame(const Segment& segment) {
    return (segment.t_min + segment.t_max) / 2;
}

std::vector<Segment> segment_stream(std::span<const AffineMotion> models,
                                    int width, int height, double s) {
    if (models.empty()) {
        throw EmptyStream("segment_stream requires a nonempty model sequence");
    }

    std::vector<Segment> segments;
    int start = 0;
    CornerTracker tracker = CornerTracker::start(0, width, height);

    for (int t = 0; t < static_cast<int>(models.size()); ++t) {
        tracker = advance_tracker(tracker, models[static_cast<std::size_t>(t)], width, s);
        const int length = t - start + 1;
        const bool cut = (length >= kMinSegmentFrames && tracker.outbound_count() >= 3) ||
                         length >= kMaxSegmentFrames;
        if (cut) {
            Segment seg{start, t, 0};
            seg.key_frame = key_frame(seg);
            segments.push_back(seg);
            start = t + 1;
            tracker = CornerTracker::start(start, width, height);
        }
    }

    const int last = static_cast<int>(models.size()) - 1;
    if (start <= last) {
        Segment tail{start, last, 0};
        if (tail.length() < kMinSegmentFrames && !segments.empty()) {
            segments.back().t_max = last;
            segments.back().key_frame = key_frame(segments.back());
        } else {
            tail.key_frame = key_frame(tail);
            segments.push_back(tail);
        }
    }
    return segments;
}

}  // namespace adl
