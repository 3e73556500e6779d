#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adl/motion.hpp"

namespace adl {

struct VideoRecord {
    std::string id;
    int width = 0;
    int height = 0;
    double fps = 0.0;
    int frame_count = 0;
    std::filesystem::path dir;

    std::filesystem::path motion_path() const { return dir / "motion.csv"; }
    std::filesystem::path audio_path() const { return dir / "audio.csv"; }
    std::filesystem::path loc_path() const { return dir / "loc.csv"; }
    std::filesystem::path labels_path() const { return dir / "labels.csv"; }
    std::filesystem::path keyframes_dir() const { return dir / "keyframes"; }
    std::filesystem::path keyframe_path(int frame) const;
};

struct LabeledInterval {
    int start_frame = 0;
    int end_frame = 0;  // inclusive
    std::string activity;
};

// Sorted, non-overlapping activity intervals; gaps are filled with "None"
// at load time so every frame carries a label.
struct GroundTruth {
    std::vector<LabeledInterval> intervals;

    std::vector<std::string> frame_labels(int frame_count) const;
};

struct VideoData {
    VideoRecord record;
    std::vector<MotionVectorField> motion;              // one field per frame
    std::vector<std::array<double, 7>> audio;           // per frame
    std::vector<std::array<double, 7>> location;        // per frame
    GroundTruth truth;
};

// Scans <root>/<video-id>/ directories, validating meta.csv. Throws
// MissingFile / ParseError; an empty directory yields an empty corpus.
std::vector<VideoRecord> load_corpus(const std::filesystem::path& root);

// Loads and validates all per-frame tracks of one video. Audio/location
// rows may skip frames: gaps carry the last known value, a leading gap
// carries zeros.
VideoData load_video(const VideoRecord& record);

// Synthetic-corpus generation. Each activity emits motion fields, audio and
// location rows and key-frame images concentrated around activity-specific
// means, so the full pipeline can be exercised end to end at desk scale.
struct SynthActivity {
    std::string name;
    double translation_x = 0.0;
    double translation_y = 0.0;
    double block_noise = 0.5;      // residual-motion level, pixels
    double outlier_fraction = 0.0;
    std::array<double, 7> audio_mean{};
    std::array<double, 7> loc_mean{};
    std::array<std::uint8_t, 3> base_color{};
};

struct SynthSpec {
    int width = 320;
    int height = 240;
    double fps = 30.0;
    int video_count = 5;
    int frames_per_video = 3000;
    int min_interval = 150;
    int max_interval = 400;
    double motion_jitter = 0.0;    // sigma on the scripted translation
    double track_sigma = 0.0;      // sigma on audio/location entries
    double image_noise = 0.0;      // sigma on pixel values
    std::vector<SynthActivity> activities;  // activities[0] must be "None"
};

// Canonical spec with n1 activities (including "None") with well-separated
// audio/location patterns, distinct translation speeds and colors.
// `spread` scales all noise terms; 0 puts every descriptor exactly at its
// class mean.
SynthSpec default_synth_spec(int n1, double spread);

// Deterministic for a fixed seed (byte-identical files). Throws InvalidSpec.
void generate_synthetic(std::uint64_t seed, const SynthSpec& spec,
                        const std::filesystem::path& root);

}  // namespace adl
