#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "adl/corpus.hpp"
#include "adl/descriptors.hpp"
#include "adl/evaluation.hpp"
#include "adl/fusion.hpp"
#include "adl/hhmm.hpp"
#include "adl/segmentation.hpp"

namespace adl {

struct RunConfig {
    std::filesystem::path corpus_root;
    std::string mask = "htpe+hc+rm+audio+cld+loc";
    Granularity granularity = Granularity::segment;
    int m_activities = 3;
    int m_none = 1;
    int gaussians = 5;
    double loop = 0.6;
    double beam = 200.0;
    double prune = 1e-3;
    InitMode init = InitMode::flat_start;
    double overlap_threshold = 0.5;  // segmentation s
    int bw_iterations = 15;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";
    bool f1_conventional = false;

    SpaceMask space_mask() const { return parse_mask(mask); }
    // The single-state "None" variant gets one Gaussian.
    int gaussians_for(const std::string& activity) const {
        return (activity == "None" && m_none == 1) ? 1 : gaussians;
    }
    int states_for(const std::string& activity) const {
        return activity == "None" ? m_none : m_activities;
    }
};

// All derived per-video features needed by any description-space mask.
struct VideoFeatures {
    std::string video_id;
    std::vector<AffineMotion> models;            // per frame
    std::vector<Segment> segments;
    std::vector<FrameDescriptors> frames;        // per frame (no CLD)
    std::vector<SegmentDescriptors> segment_descriptors;
    std::vector<std::string> frame_truth;        // per-frame activity label
    std::vector<std::string> segment_truth;      // per-segment majority label
};

// Runs motion estimation, segmentation and descriptor extraction on one
// loaded video. Key-frame images are read only when with_keyframes is set
// (CLD needs them).
VideoFeatures featurize_video(const VideoData& data, double overlap_threshold,
                              bool with_keyframes);

// Activity taxonomy present in a feature set (union of truth labels,
// "None" first, rest sorted).
std::vector<std::string> taxonomy(std::span<const VideoFeatures> features);

// Per-activity training sequences at the configured granularity. Frame
// granularity applies the 10-frame smoothing and 10-phase decimation of the
// learning protocol; segment granularity uses segment runs directly.
std::map<std::string, std::vector<Sequence>> training_sequences(
    std::span<const VideoFeatures> features, const SpaceMask& mask,
    Granularity granularity);

HhmmModel train_model(std::span<const VideoFeatures> features,
                      const RunConfig& config);

ObservationSequence video_observations(const VideoFeatures& features,
                                       const SpaceMask& mask,
                                       Granularity granularity);

DecodedTimeline decode_video(const HhmmModel& model, const VideoFeatures& features,
                             const RunConfig& config);

struct LoocvResult {
    std::vector<EvalReport> folds;
    double median_accuracy = 0.0;
};

// Leave-one-video-out cross-validation over a loaded, featurized corpus.
// Throws InsufficientCorpus for fewer than 2 videos.
LoocvResult loocv(std::span<const VideoFeatures> features, const RunConfig& config);

// Convenience: load + featurize every video under the corpus root.
std::vector<VideoFeatures> featurize_corpus(const std::filesystem::path& root,
                                            const RunConfig& config);

// Report/file writers (fixed formats, deterministic output).
void write_segments_csv(const std::filesystem::path& path,
                        std::span<const Segment> segments);
void write_descriptor_dump(const std::filesystem::path& path,
                           const VideoFeatures& features, Granularity granularity);
void write_timeline_csv(const std::filesystem::path& path,
                        const DecodedTimeline& timeline);
void write_fold_report(const std::filesystem::path& path, const EvalReport& report);
void write_loocv_summary(const std::filesystem::path& path, const LoocvResult& result);

}  // namespace adl
