#include "adl/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adl/errors.hpp"

namespace adl {

namespace {

constexpr double kLogEpsilon = 1e-12;

std::array<double, 5> one_hot_log_energy(double a, int extent) {
    const double energy = std::log(a * a + kLogEpsilon);
    const double step = std::log(static_cast<double>(extent) * extent) /
                        (kMotionHistBins - 1);
    int bin;
    if (energy < step) {
        bin = 0;
    } else if (energy >= (kMotionHistBins - 1) * step) {
        bin = kMotionHistBins - 1;
    } else {
        bin = static_cast<int>(energy / step);
    }
    std::array<double, 5> h{};
    h[static_cast<std::size_t>(bin)] = 1.0;
    return h;
}

// 8x8 zigzag scan order (row-major source indices).
constexpr std::array<int, 64> kZigzag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

// JPEG-convention 2-D DCT-II on an 8x8 block.
std::array<double, 64> dct8x8(const std::array<double, 64>& block) {
    std::array<double, 64> out{};
    constexpr double pi = std::numbers::pi;
    for (int u = 0; u < 8; ++u) {
        for (int v = 0; v < 8; ++v) {
            double sum = 0.0;
            for (int y = 0; y < 8; ++y) {
                for (int x = 0; x < 8; ++x) {
                    sum += block[static_cast<std::size_t>(y * 8 + x)] *
                           std::cos((2 * x + 1) * v * pi / 16.0) *
                           std::cos((2 * y + 1) * u * pi / 16.0);
                }
            }
            const double cu = (u == 0) ? 1.0 / std::sqrt(2.0) : 1.0;
            const double cv = (v == 0) ? 1.0 / std::sqrt(2.0) : 1.0;
            out[static_cast<std::size_t>(u * 8 + v)] = 0.25 * cu * cv * sum;
        }
    }
    return out;
}

}  // namespace

MotionHistograms instant_motion_histogram(const AffineMotion& model, int width, int height) {
    MotionHistograms h;
    h.x = one_hot_log_energy(model.a1, width);
    h.y = one_hot_log_energy(model.a4, height);
    return h;
}

std::array<double, 8> cut_histogram(std::span<const int> cut_frames, int t) {
    std::array<double, 8> bins{};
    for (int c : cut_frames) {
        const int age = t - c;
        for (int i = 0; i < kCutHistBins; ++i) {
            if (age <= (1 << (i + 1))) {
                bins[static_cast<std::size_t>(i)] += 1.0;
            }
        }
    }
    return bins;
}

std::array<double, 16> residual_motion_descriptor(const ResidualField& res,
                                                  int width, int height) {
    std::array<double, 16> sum{};
    std::array<int, 16> count{};
    const double cell_w = static_cast<double>(width) / kResidualGrid;
    const double cell_h = static_cast<double>(height) / kResidualGrid;

    for (std::size_t i = 0; i < res.residuals.size(); ++i) {
        const Vec2& c = res.block_centers[i];
        int cx = std::clamp(static_cast<int>(c.x / cell_w), 0, kResidualGrid - 1);
        int cy = std::clamp(static_cast<int>(c.y / cell_h), 0, kResidualGrid - 1);
        const std::size_t cell = static_cast<std::size_t>(cy * kResidualGrid + cx);
        const Vec2& r = res.residuals[i];
        sum[cell] += r.x * r.x + r.y * r.y;
        count[cell] += 1;
    }

    std::array<double, 16> rm{};
    for (std::size_t b = 0; b < rm.size(); ++b) {
        rm[b] = count[b] > 0 ? std::sqrt(sum[b] / count[b]) : 0.0;
    }
    return rm;
}

std::array<double, 12> color_layout(const KeyFrameImage& image) {
    if (image.width <= 0 || image.height <= 0 ||
        image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
        throw InvalidSpec("color_layout: malformed image");
    }

    // Cell-average colors on an 8x8 grid.
    std::array<double, 64> r_sum{}, g_sum{}, b_sum{};
    std::array<int, 64> n{};
    for (int y = 0; y < image.height; ++y) {
        const int gy = std::min(y * 8 / image.height, 7);
        for (int x = 0; x < image.width; ++x) {
            const int gx = std::min(x * 8 / image.width, 7);
            const std::size_t cell = static_cast<std::size_t>(gy * 8 + gx);
            const std::size_t px = (static_cast<std::size_t>(y) * image.width + x) * 3;
            r_sum[cell] += image.rgb[px];
            g_sum[cell] += image.rgb[px + 1];
            b_sum[cell] += image.rgb[px + 2];
            n[cell] += 1;
        }
    }

    std::array<double, 64> Y{}, Cb{}, Cr{};
    for (std::size_t c = 0; c < 64; ++c) {
        const double cnt = n[c] > 0 ? static_cast<double>(n[c]) : 1.0;
        const double r = r_sum[c] / cnt;
        const double g = g_sum[c] / cnt;
        const double b = b_sum[c] / cnt;
        // BT.601 full-range.
        Y[c] = 0.299 * r + 0.587 * g + 0.114 * b;
        Cb[c] = -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0;
        Cr[c] = 0.5 * r - 0.418688 * g - 0.081312 * b + 128.0;
    }

    const auto dy = dct8x8(Y);
    const auto dcb = dct8x8(Cb);
    const auto dcr = dct8x8(Cr);

    std::array<double, 12> out{};
    for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = dy[static_cast<std::size_t>(kZigzag[i])];
    for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(6 + i)] = dcb[static_cast<std::size_t>(kZigzag[i])];
    for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(9 + i)] = dcr[static_cast<std::size_t>(kZigzag[i])];
    return out;
}

namespace {

FrameDescriptors mean_frames(std::span<const FrameDescriptors> frames) {
    FrameDescriptors m;
    const double inv = 1.0 / static_cast<double>(frames.size());
    for (const FrameDescriptors& f : frames) {
        for (std::size_t i = 0; i < 5; ++i) {
            m.h_tpe_x[i] += f.h_tpe_x[i] * inv;
            m.h_tpe_y[i] += f.h_tpe_y[i] * inv;
        }
        for (std::size_t i = 0; i < 8; ++i) m.h_c[i] += f.h_c[i] * inv;
        for (std::size_t i = 0; i < 16; ++i) m.rm[i] += f.rm[i] * inv;
        for (std::size_t i = 0; i < 7; ++i) {
            m.audio[i] += f.audio[i] * inv;
            m.location[i] += f.location[i] * inv;
        }
    }
    return m;
}

}  // namespace

SegmentDescriptors aggregate_segment(std::span<const FrameDescriptors> frames,
                                     const KeyFrameImage& key_image) {
    if (frames.empty()) {
        throw EmptySegment("aggregate_segment: empty frame list");
    }
    SegmentDescriptors s;
    s.base = mean_frames(frames);
    s.cld = color_layout(key_image);
    return s;
}

std::vector<std::vector<FrameDescriptors>> smooth_and_decimate(
    std::span<const FrameDescriptors> frames) {
    const int n = static_cast<int>(frames.size());
    if (n < 10) {
        throw TooShort("smooth_and_decimate needs at least 10 frames, got " +
                       std::to_string(n));
    }

    std::vector<FrameDescriptors> smoothed;
    smoothed.reserve(frames.size());
    for (int t = 0; t < n; ++t) {
        const int lo = std::max(0, t - 5);
        const int hi = std::min(n - 1, t + 4);
        smoothed.push_back(mean_frames(frames.subspan(
            static_cast<std::size_t>(lo), static_cast<std::size_t>(hi - lo + 1))));
    }

    std::vector<std::vector<FrameDescriptors>> out(10);
    for (int phase = 0; phase < 10; ++phase) {
        for (int t = phase; t < n; t += 10) {
            out[static_cast<std::size_t>(phase)].push_back(
                smoothed[static_cast<std::size_t>(t)]);
        }
    }
    return out;
}

}  // namespace adl
