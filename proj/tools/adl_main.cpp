// Command-line front end for the wearable-camera activity-indexing pipeline:
// synthetic corpus generation, viewpoint segmentation, descriptor extraction,
// HHMM training, decoding, evaluation and description-space sweeps.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adl/corpus.hpp"
#include "adl/csv.hpp"
#include "adl/errors.hpp"
#include "adl/model_io.hpp"
#include "adl/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct CliOptions {
    adl::RunConfig run;
    std::string granularity = "segment";
    std::string init = "flat";
    std::string model_path;
    // synth
    int videos = 5;
    int frames = 3000;
    int activities = 8;
    double spread = 1.0;
    // sweep topology lists
    std::vector<int> m_list{3};
    std::vector<int> m_none_list{1};
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
    const char* env_corpus = std::getenv("ADL_CORPUS");
    if (env_corpus != nullptr) opt.run.corpus_root = env_corpus;

    cmd->set_config("--config", "", "Flat key=value config file (CLI flags win)");
    cmd->add_option("--corpus", opt.run.corpus_root, "Corpus root directory (env ADL_CORPUS)")
        ->capture_default_str();
    cmd->add_option("--mask", opt.run.mask, "Description-space mask, '+'-joined tokens from htpe,hc,rm,audio,cld,loc")
        ->capture_default_str();
    cmd->add_option("--granularity", opt.granularity, "Observation granularity: frame|segment")
        ->capture_default_str();
    cmd->add_option("--m", opt.run.m_activities, "Bottom-level states per activity")
        ->capture_default_str();
    cmd->add_option("--m-none", opt.run.m_none, "Bottom-level states for the reject class")
        ->capture_default_str();
    cmd->add_option("--gaussians", opt.run.gaussians, "Mixture components per state")
        ->capture_default_str();
    cmd->add_option("--loop", opt.run.loop, "Initial self-transition probability")
        ->capture_default_str();
    cmd->add_option("--beam", opt.run.beam, "Viterbi beam log-width")
        ->capture_default_str();
    cmd->add_option("--prune", opt.run.prune, "Mixture-weight pruning threshold")
        ->capture_default_str();
    cmd->add_option("--init", opt.init, "HMM initialization: flat|viterbi-align")
        ->capture_default_str();
    cmd->add_option("--overlap", opt.run.overlap_threshold, "Segmentation overlap threshold s")
        ->capture_default_str();
    cmd->add_option("--iters", opt.run.bw_iterations, "Baum-Welch iterations")
        ->capture_default_str();
    cmd->add_option("--seed", opt.run.seed, "Random seed for synthetic generation")
        ->capture_default_str();
    cmd->add_option("--out", opt.run.out_dir, "Output directory")->capture_default_str();
    cmd->add_flag("--f1-conventional", opt.run.f1_conventional,
                  "Report the conventional F1 instead of 1/(1/p+1/r)");
}

void finalize(CliOptions& opt) {
    opt.run.granularity = adl::parse_granularity(opt.granularity);
    opt.run.init = adl::parse_init_mode(opt.init);
    (void)opt.run.space_mask();  // validate mask tokens up front
}

fs::path video_out_dir(const adl::RunConfig& run, const std::string& video_id) {
    const fs::path dir = run.out_dir / video_id;
    fs::create_directories(dir);
    return dir;
}

int cmd_synth(CliOptions& opt) {
    adl::SynthSpec spec = adl::default_synth_spec(opt.activities, opt.spread);
    spec.video_count = opt.videos;
    spec.frames_per_video = opt.frames;
    adl::generate_synthetic(opt.run.seed, spec, opt.run.corpus_root);
    std::cout << "generated " << opt.videos << " videos under " << opt.run.corpus_root.string()
              << "\n";
    return 0;
}

int cmd_segment(CliOptions& opt) {
    for (const adl::VideoRecord& rec : adl::load_corpus(opt.run.corpus_root)) {
        const adl::VideoFeatures features =
            adl::featurize_video(adl::load_video(rec), opt.run.overlap_threshold, false);
        adl::write_segments_csv(video_out_dir(opt.run, rec.id) / "segments.csv",
                                features.segments);
    }
    return 0;
}

int cmd_featurize(CliOptions& opt) {
    const bool with_keyframes = opt.run.granularity == adl::Granularity::segment;
    for (const adl::VideoRecord& rec : adl::load_corpus(opt.run.corpus_root)) {
        const adl::VideoFeatures features = adl::featurize_video(
            adl::load_video(rec), opt.run.overlap_threshold, with_keyframes);
        const fs::path dir = video_out_dir(opt.run, rec.id);
        adl::write_segments_csv(dir / "segments.csv", features.segments);
        adl::write_descriptor_dump(dir / "descriptors.csv", features, opt.run.granularity);
    }
    return 0;
}

int cmd_train(CliOptions& opt) {
    const auto features = adl::featurize_corpus(opt.run.corpus_root, opt.run);
    const adl::HhmmModel model = adl::train_model(features, opt.run);
    fs::create_directories(opt.run.out_dir);
    const fs::path path =
        opt.model_path.empty() ? opt.run.out_dir / "model.json" : fs::path(opt.model_path);
    adl::save_model(path, model);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_decode(CliOptions& opt) {
    const fs::path path =
        opt.model_path.empty() ? opt.run.out_dir / "model.json" : fs::path(opt.model_path);
    const adl::HhmmModel model = adl::load_model(path);
    const auto features = adl::featurize_corpus(opt.run.corpus_root, opt.run);
    for (const adl::VideoFeatures& video : features) {
        const adl::DecodedTimeline timeline = adl::decode_video(model, video, opt.run);
        adl::write_timeline_csv(video_out_dir(opt.run, video.video_id) / "timeline.csv",
                                timeline);
    }
    return 0;
}

int cmd_evaluate(CliOptions& opt) {
    const auto features = adl::featurize_corpus(opt.run.corpus_root, opt.run);
    adl::LoocvResult result;
    if (opt.model_path.empty()) {
        // Leave-one-video-out protocol.
        result = adl::loocv(features, opt.run);
    } else {
        const adl::HhmmModel model = adl::load_model(opt.model_path);
        const auto names = adl::taxonomy(features);
        std::vector<double> accuracies;
        for (std::size_t i = 0; i < features.size(); ++i) {
            const adl::DecodedTimeline timeline =
                adl::decode_video(model, features[i], opt.run);
            const auto& truth = opt.run.granularity == adl::Granularity::frame
                                    ? features[i].frame_truth
                                    : features[i].segment_truth;
            adl::EvalReport report = adl::evaluate_timelines(timeline.labels(), truth, names,
                                                             opt.run.f1_conventional);
            report.fold = static_cast<int>(i);
            report.held_out_video = features[i].video_id;
            accuracies.push_back(report.global_accuracy);
            result.folds.push_back(std::move(report));
        }
        result.median_accuracy = adl::median(accuracies);
    }
    fs::create_directories(opt.run.out_dir);
    for (const adl::EvalReport& report : result.folds) {
        adl::write_fold_report(
            video_out_dir(opt.run, report.held_out_video) / "report.csv", report);
    }
    adl::write_loocv_summary(opt.run.out_dir / "summary.csv", result);
    std::cout << "median_accuracy " << adl::format_double(result.median_accuracy) << "\n";
    return 0;
}

int cmd_sweep(CliOptions& opt) {
    // Key-frame images are needed whenever any swept mask can contain CLD.
    const bool with_keyframes = opt.run.granularity == adl::Granularity::segment;
    std::vector<adl::VideoFeatures> features;
    for (const adl::VideoRecord& rec : adl::load_corpus(opt.run.corpus_root)) {
        features.push_back(adl::featurize_video(adl::load_video(rec),
                                                opt.run.overlap_threshold, with_keyframes));
    }

    struct Row {
        std::string mask;
        int m;
        int m_none;
        double median_accuracy;
    };
    std::vector<Row> rows;
    for (int m : opt.m_list) {
        for (int m_none : opt.m_none_list) {
            for (const adl::SpaceMask& mask : adl::enumerate_spaces()) {
                if (mask.cld && opt.run.granularity == adl::Granularity::frame) continue;
                adl::RunConfig cell = opt.run;
                cell.mask = adl::mask_to_string(mask);
                cell.m_activities = m;
                cell.m_none = m_none;
                const adl::LoocvResult result = adl::loocv(features, cell);
                rows.push_back({cell.mask, m, m_none, result.median_accuracy});
            }
        }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) {
                         return a.median_accuracy > b.median_accuracy;
                     });

    fs::create_directories(opt.run.out_dir);
    std::ofstream out(opt.run.out_dir / "sweep.csv", std::ios::binary);
    out << "mask,m,m_none,median_accuracy\n";
    for (const Row& r : rows) {
        out << r.mask << "," << r.m << "," << r.m_none << ","
            << adl::format_double(r.median_accuracy) << "\n";
    }
    std::cout << "wrote " << (opt.run.out_dir / "sweep.csv").string() << " (" << rows.size()
              << " rows)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wearable-camera activity indexing pipeline"};
    app.require_subcommand(1);

    CliOptions opt;

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    synth->add_option("--videos", opt.videos, "Number of videos")->capture_default_str();
    synth->add_option("--frames", opt.frames, "Frames per video")->capture_default_str();
    synth->add_option("--activities", opt.activities, "Activity count incl. None")
        ->capture_default_str();
    synth->add_option("--spread", opt.spread, "Class-noise scale (0 = exact class means)")
        ->capture_default_str();

    CLI::App* segment = app.add_subcommand("segment", "Write viewpoint segments per video");
    CLI::App* featurize =
        app.add_subcommand("featurize", "Write segments and the 60-column descriptor dump");
    CLI::App* train = app.add_subcommand("train", "Train the two-level model on the corpus");
    CLI::App* decode = app.add_subcommand("decode", "Decode activity timelines per video");
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Leave-one-out evaluation (or fixed-model with --model)");
    CLI::App* sweep =
        app.add_subcommand("sweep", "Evaluate all 63 description spaces x topologies");

    for (CLI::App* cmd : {synth, segment, featurize, train, decode, evaluate, sweep}) {
        add_common_options(cmd, opt);
    }
    for (CLI::App* cmd : {train, decode, evaluate}) {
        cmd->add_option("--model", opt.model_path, "Model JSON path");
    }
    sweep->add_option("--m-list", opt.m_list, "Comma-separated state counts to sweep")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--m-none-list", opt.m_none_list,
                      "Comma-separated reject-class state counts to sweep")
        ->delimiter(',')
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        finalize(opt);
        if (synth->parsed()) return cmd_synth(opt);
        if (segment->parsed()) return cmd_segment(opt);
        if (featurize->parsed()) return cmd_featurize(opt);
        if (train->parsed()) return cmd_train(opt);
        if (decode->parsed()) return cmd_decode(opt);
        if (evaluate->parsed()) return cmd_evaluate(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const adl::InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const adl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
