#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "adl/motion.hpp"
#include "adl/segmentation.hpp"

namespace adl {

inline constexpr int kMotionHistBins = 5;   // N_e
inline constexpr int kCutHistBins = 8;      // N_c
inline constexpr int kResidualGrid = 4;     // 4x4 grid -> 16 values
inline constexpr int kCldCoeffs = 12;       // 6 Y + 3 Cb + 3 Cr
inline constexpr int kAudioDims = 7;
inline constexpr int kLocationDims = 7;

struct FrameDescriptors {
    std::array<double, 5> h_tpe_x{};
    std::array<double, 5> h_tpe_y{};
    std::array<double, 8> h_c{};
    std::array<double, 16> rm{};
    std::array<double, 7> audio{};
    std::array<double, 7> location{};
};

struct SegmentDescriptors {
    FrameDescriptors base;
    std::array<double, 12> cld{};
};

// Row-major RGB, 3 bytes per pixel.
struct KeyFrameImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;
};

struct MotionHistograms {
    std::array<double, 5> x{};
    std::array<double, 5> y{};
};

// One-hot log-energy histogram of the translation parameters a1 (x) and
// a4 (y). The bin step puts the image-width (resp. height) translation
// energy at the lower edge of the last bin.
MotionHistograms instant_motion_histogram(const AffineMotion& model, int width, int height);

// bin i (1-based) counts cuts c with t - c <= 2^i.
std::array<double, 8> cut_histogram(std::span<const int> cut_frames, int t);

// Per-cell RMS of residual magnitudes over a 4x4 partition of the image.
// Cells without blocks yield 0.
std::array<double, 16> residual_motion_descriptor(const ResidualField& res,
                                                  int width, int height);

// MPEG-7 style Color Layout: 8x8 cell-average colors, RGB -> YCbCr (BT.601
// full range), 2-D DCT per channel, zigzag scan, keep 6 Y + 3 Cb + 3 Cr.
std::array<double, 12> color_layout(const KeyFrameImage& image);

// Arithmetic mean of all per-frame fields; CLD computed on the key frame.
SegmentDescriptors aggregate_segment(std::span<const FrameDescriptors> frames,
                                     const KeyFrameImage& key_image);

// Moving-average smoothing over a 10-frame window (5 before, 4 after, the
// frame itself, clipped at sequence boundaries) followed by 10-phase
// decimation. Throws TooShort for sequences under 10 frames.
std::vector<std::vector<FrameDescriptors>> smooth_and_decimate(
    std::span<const FrameDescriptors> frames);

}  // namespace adl
