#include "adl/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "adl/csv.hpp"
#include "adl/errors.hpp"
#include "adl/ppm.hpp"

namespace adl {

namespace {

std::array<double, 7> to_array7(const std::array<double, 7>& a) { return a; }

std::string majority_label(std::span<const std::string> labels) {
    std::map<std::string, int> counts;
    for (const std::string& l : labels) ++counts[l];
    std::string best;
    int best_count = -1;
    for (const auto& [label, count] : counts) {
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

}  // namespace

VideoFeatures featurize_video(const VideoData& data, double overlap_threshold,
                              bool with_keyframes) {
    VideoFeatures out;
    out.video_id = data.record.id;
    const int w = data.record.width;
    const int h = data.record.height;
    const int frame_count = data.record.frame_count;

    out.models.reserve(static_cast<std::size_t>(frame_count));
    std::vector<ResidualField> residuals;
    residuals.reserve(static_cast<std::size_t>(frame_count));
    for (const MotionVectorField& field : data.motion) {
        if (field.block_centers.size() >= 3) {
            const AffineMotion model = estimate_affine(field);
            out.models.push_back(model);
            residuals.push_back(residual_field(field, model));
        } else {
            // Frames without enough blocks carry zero ego-motion.
            out.models.push_back(AffineMotion{});
            residuals.push_back(ResidualField{field.frame_index, {}, {}});
        }
    }

    out.segments = segment_stream(out.models, w, h, overlap_threshold);

    std::vector<int> cuts;
    cuts.reserve(out.segments.size());
    for (const Segment& s : out.segments) cuts.push_back(s.t_max);

    out.frames.resize(static_cast<std::size_t>(frame_count));
    for (int t = 0; t < frame_count; ++t) {
        FrameDescriptors& f = out.frames[static_cast<std::size_t>(t)];
        const MotionHistograms mh = instant_motion_histogram(out.models[static_cast<std::size_t>(t)], w, h);
        f.h_tpe_x = mh.x;
        f.h_tpe_y = mh.y;
        const auto past = std::upper_bound(cuts.begin(), cuts.end(), t) - cuts.begin();
        f.h_c = cut_histogram(std::span<const int>(cuts.data(), static_cast<std::size_t>(past)), t);
        f.rm = residual_motion_descriptor(residuals[static_cast<std::size_t>(t)], w, h);
        f.audio = to_array7(data.audio[static_cast<std::size_t>(t)]);
        f.location = to_array7(data.location[static_cast<std::size_t>(t)]);
    }

    out.frame_truth = data.truth.frame_labels(frame_count);

    out.segment_descriptors.reserve(out.segments.size());
    out.segment_truth.reserve(out.segments.size());
    for (const Segment& seg : out.segments) {
        const std::span<const FrameDescriptors> frames(
            out.frames.data() + seg.t_min, static_cast<std::size_t>(seg.length()));
        SegmentDescriptors sd;
        if (with_keyframes) {
            sd = aggregate_segment(frames, read_ppm(data.record.keyframe_path(seg.key_frame)));
        } else {
            KeyFrameImage dummy{1, 1, {0, 0, 0}};
            sd = aggregate_segment(frames, dummy);
            sd.cld = {};
        }
        out.segment_descriptors.push_back(std::move(sd));
        out.segment_truth.push_back(majority_label(std::span<const std::string>(
            out.frame_truth.data() + seg.t_min, static_cast<std::size_t>(seg.length()))));
    }
    return out;
}

std::vector<std::string> taxonomy(std::span<const VideoFeatures> features) {
    std::map<std::string, int> seen;
    for (const VideoFeatures& v : features) {
        for (const std::string& l : v.frame_truth) seen[l] = 1;
    }
    std::vector<std::string> names;
    if (seen.count("None")) names.push_back("None");
    for (const auto& [name, _] : seen) {
        if (name != "None") names.push_back(name);
    }
    return names;
}

namespace {

template <typename Descriptor>
std::vector<std::pair<std::string, std::span<const Descriptor>>> label_runs(
    std::span<const Descriptor> items, std::span<const std::string> labels) {
    std::vector<std::pair<std::string, std::span<const Descriptor>>> runs;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= items.size(); ++i) {
        if (i == items.size() || labels[i] != labels[start]) {
            runs.emplace_back(labels[start], items.subspan(start, i - start));
            start = i;
        }
    }
    return runs;
}

}  // namespace

std::map<std::string, std::vector<Sequence>> training_sequences(
    std::span<const VideoFeatures> features, const SpaceMask& mask,
    Granularity granularity) {
    std::map<std::string, std::vector<Sequence>> out;
    for (const VideoFeatures& video : features) {
        if (granularity == Granularity::frame) {
            for (const auto& [label, run] :
                 label_runs<FrameDescriptors>(video.frames, video.frame_truth)) {
                if (run.size() >= 10) {
                    for (const auto& phase : smooth_and_decimate(run)) {
                        if (phase.empty()) continue;
                        out[label].push_back(assemble(mask, phase, video.video_id).vectors);
                    }
                } else {
                    out[label].push_back(assemble(mask, run, video.video_id).vectors);
                }
            }
        } else {
            for (const auto& [label, run] : label_runs<SegmentDescriptors>(
                     video.segment_descriptors, video.segment_truth)) {
                out[label].push_back(assemble(mask, run, video.video_id).vectors);
            }
        }
    }
    return out;
}

HhmmModel train_model(std::span<const VideoFeatures> features,
                      const RunConfig& config) {
    const SpaceMask mask = config.space_mask();
    const auto sequences = training_sequences(features, mask, config.granularity);
    if (sequences.empty()) throw NoData("no training data in the corpus");

    BaumWelchOptions bw;
    bw.max_iterations = config.bw_iterations;
    bw.prune_threshold = config.prune;

    std::vector<ActivityHmm> activities;
    for (const std::string& name : taxonomy(features)) {
        auto it = sequences.find(name);
        if (it == sequences.end() || it->second.empty()) {
            throw NoData("no training sequences for activity '" + name + "'");
        }
        InitConfig init;
        init.activity = name;
        init.num_states = config.states_for(name);
        init.num_components = config.gaussians_for(name);
        init.loop = config.loop;
        init.mode = config.init;
        ActivityHmm model = init_activity_hmm(init, it->second);
        activities.push_back(baum_welch(std::move(model), it->second, bw).model);
    }
    return make_hhmm(std::move(activities));
}

ObservationSequence video_observations(const VideoFeatures& features,
                                       const SpaceMask& mask,
                                       Granularity granularity) {
    if (granularity == Granularity::frame) {
        return assemble(mask, std::span<const FrameDescriptors>(features.frames),
                        features.video_id);
    }
    return assemble(mask,
                    std::span<const SegmentDescriptors>(features.segment_descriptors),
                    features.video_id);
}

DecodedTimeline decode_video(const HhmmModel& model, const VideoFeatures& features,
                             const RunConfig& config) {
    const ObservationSequence obs =
        video_observations(features, config.space_mask(), config.granularity);
    const DecodingNetwork network = flatten(model);
    return viterbi_decode(network, obs.vectors, config.beam);
}

LoocvResult loocv(std::span<const VideoFeatures> features, const RunConfig& config) {
    if (features.size() < 2) {
        throw InsufficientCorpus("leave-one-out needs at least 2 videos, got " +
                                 std::to_string(features.size()));
    }
    const std::vector<std::string> names = taxonomy(features);

    LoocvResult result;
    std::vector<double> accuracies;
    for (std::size_t held = 0; held < features.size(); ++held) {
        std::vector<VideoFeatures> training;
        for (std::size_t i = 0; i < features.size(); ++i) {
            if (i != held) training.push_back(features[i]);
        }
        const HhmmModel model = train_model(training, config);
        const DecodedTimeline timeline = decode_video(model, features[held], config);
        const std::vector<std::string> pred = timeline.labels();
        const std::vector<std::string>& truth = config.granularity == Granularity::frame
                                                    ? features[held].frame_truth
                                                    : features[held].segment_truth;
        EvalReport report = evaluate_timelines(pred, truth, names, config.f1_conventional);
        report.fold = static_cast<int>(held);
        report.held_out_video = features[held].video_id;
        accuracies.push_back(report.global_accuracy);
        result.folds.push_back(std::move(report));
    }
    result.median_accuracy = median(accuracies);
    return result;
}

std::vector<VideoFeatures> featurize_corpus(const std::filesystem::path& root,
                                            const RunConfig& config) {
    const bool with_keyframes =
        config.granularity == Granularity::segment && config.space_mask().cld;
    std::vector<VideoFeatures> features;
    for (const VideoRecord& record : load_corpus(root)) {
        features.push_back(
            featurize_video(load_video(record), config.overlap_threshold, with_keyframes));
    }
    return features;
}

void write_segments_csv(const std::filesystem::path& path,
                        std::span<const Segment> segments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + path.string());
    out << "segment_id,t_min,t_max,key_frame\n";
    for (std::size_t i = 0; i < segments.size(); ++i) {
        out << i << "," << segments[i].t_min << "," << segments[i].t_max << ","
            << segments[i].key_frame << "\n";
    }
}

namespace {

void write_descriptor_row(std::ofstream& out, const FrameDescriptors& f,
                          const std::array<double, 12>& cld) {
    for (double v : f.h_tpe_x) out << "," << format_double(v);
    for (double v : f.h_tpe_y) out << "," << format_double(v);
    for (double v : f.h_c) out << "," << format_double(v);
    for (double v : f.rm) out << "," << format_double(v);
    for (double v : f.audio) out << "," << format_double(v);
    for (double v : cld) out << "," << format_double(v);
    for (double v : f.location) out << "," << format_double(v);
    out << "\n";
}

}  // namespace

void write_descriptor_dump(const std::filesystem::path& path,
                           const VideoFeatures& features, Granularity granularity) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + path.string());
    out << (granularity == Granularity::frame ? "frame" : "segment_id");
    for (int i = 1; i <= 5; ++i) out << ",htpe_x" << i;
    for (int i = 1; i <= 5; ++i) out << ",htpe_y" << i;
    for (int i = 1; i <= 8; ++i) out << ",hc" << i;
    for (int i = 1; i <= 16; ++i) out << ",rm" << i;
    for (int i = 1; i <= 7; ++i) out << ",audio" << i;
    for (int i = 1; i <= 12; ++i) out << ",cld" << i;
    for (int i = 1; i <= 7; ++i) out << ",loc" << i;
    out << "\n";

    if (granularity == Granularity::frame) {
        const std::array<double, 12> no_cld{};
        for (std::size_t t = 0; t < features.frames.size(); ++t) {
            out << t;
            write_descriptor_row(out, features.frames[t], no_cld);
        }
    } else {
        for (std::size_t i = 0; i < features.segment_descriptors.size(); ++i) {
            out << i;
            write_descriptor_row(out, features.segment_descriptors[i].base,
                                 features.segment_descriptors[i].cld);
        }
    }
}

void write_timeline_csv(const std::filesystem::path& path,
                        const DecodedTimeline& timeline) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + path.string());
    out << "start,end,activity,log_score\n";
    for (const DecodedInterval& iv : timeline.intervals) {
        out << iv.start << "," << iv.end << "," << iv.activity << ","
            << format_double(iv.log_score) << "\n";
    }
}

void write_fold_report(const std::filesystem::path& path, const EvalReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + path.string());
    auto cell = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("n/a");
    };
    out << "activity,precision,recall,fscore,accuracy\n";
    for (const ActivityMetrics& am : report.per_activity) {
        out << am.activity << "," << cell(am.metrics.precision) << ","
            << cell(am.metrics.recall) << "," << cell(am.metrics.f_score) << ","
            << cell(am.metrics.accuracy) << "\n";
    }
}

void write_loocv_summary(const std::filesystem::path& path, const LoocvResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + path.string());
    out << "fold,global_accuracy\n";
    for (const EvalReport& r : result.folds) {
        out << r.fold << "," << format_double(r.global_accuracy) << "\n";
    }
    out << "median_accuracy," << format_double(result.median_accuracy) << "\n";
}

}  // namespace adl
