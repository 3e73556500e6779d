#include "adl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "adl/csv.hpp"
#include "adl/errors.hpp"
#include "adl/ppm.hpp"

namespace adl {

namespace fs = std::filesystem;

std::filesystem::path VideoRecord::keyframe_path(int frame) const {
    char name[16];
    std::snprintf(name, sizeof(name), "%06d.ppm", frame);
    return keyframes_dir() / name;
}

std::vector<std::string> GroundTruth::frame_labels(int frame_count) const {
    std::vector<std::string> labels(static_cast<std::size_t>(frame_count), "None");
    for (const LabeledInterval& iv : intervals) {
        for (int t = std::max(0, iv.start_frame);
             t <= std::min(frame_count - 1, iv.end_frame); ++t) {
            labels[static_cast<std::size_t>(t)] = iv.activity;
        }
    }
    return labels;
}

std::vector<VideoRecord> load_corpus(const std::filesystem::path& root) {
    if (!fs::is_directory(root)) {
        throw MissingFile("corpus root " + root.string() + " is not a directory");
    }
    std::vector<VideoRecord> records;
    std::vector<std::string> errors;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());

    for (const fs::path& dir : dirs) {
        const fs::path meta = dir / "meta.csv";
        if (!fs::exists(meta)) continue;  // not a video directory
        try {
            const CsvTable table = read_csv(meta);
            if (table.rows.size() != 1) {
                throw ParseError(meta.string() + ": expected exactly one data row");
            }
            const int cw = table.column("width");
            const int ch = table.column("height");
            const int cf = table.column("fps");
            const int cn = table.column("frame_count");
            if (cw < 0 || ch < 0 || cf < 0 || cn < 0) {
                throw ParseError(meta.string() + ": header must be width,height,fps,frame_count");
            }
            VideoRecord rec;
            rec.id = dir.filename().string();
            rec.dir = dir;
            const auto& row = table.rows[0];
            rec.width = static_cast<int>(parse_long(row[static_cast<std::size_t>(cw)], meta.string()));
            rec.height = static_cast<int>(parse_long(row[static_cast<std::size_t>(ch)], meta.string()));
            rec.fps = parse_double(row[static_cast<std::size_t>(cf)], meta.string());
            rec.frame_count = static_cast<int>(parse_long(row[static_cast<std::size_t>(cn)], meta.string()));
            if (rec.frame_count <= 0 || rec.width <= 0 || rec.height <= 0) {
                throw ParseError(meta.string() + ": invalid geometry or frame_count");
            }
            for (const fs::path& p :
                 {rec.motion_path(), rec.audio_path(), rec.loc_path(), rec.labels_path()}) {
                if (!fs::exists(p)) {
                    throw MissingFile(p.string() + " is missing");
                }
            }
            records.push_back(std::move(rec));
        } catch (const Error& e) {
            errors.push_back(e.what());
        }
    }
    if (!errors.empty()) {
        std::string joined;
        for (const std::string& e : errors) {
            if (!joined.empty()) joined += "; ";
            joined += e;
        }
        throw ParseError(joined);
    }
    return records;
}

namespace {

template <typename Fill>
std::vector<std::array<double, 7>> load_track(const fs::path& path, int frame_count,
                                              const char* prefix, Fill) {
    const CsvTable table = read_csv(path);
    const int cframe = table.column("frame");
    if (cframe < 0) throw ParseError(path.string() + ": missing 'frame' column");
    std::vector<int> cols;
    for (int i = 1; i <= 7; ++i) {
        const int c = table.column(std::string(prefix) + std::to_string(i));
        if (c < 0) {
            throw ParseError(path.string() + ": missing column " + prefix + std::to_string(i));
        }
        cols.push_back(c);
    }

    std::vector<std::array<double, 7>> track(static_cast<std::size_t>(frame_count));
    std::vector<bool> seen(static_cast<std::size_t>(frame_count), false);
    for (const auto& row : table.rows) {
        const long f = parse_long(row[static_cast<std::size_t>(cframe)], path.string());
        if (f < 0 || f >= frame_count) {
            throw ParseError(path.string() + ": frame " + std::to_string(f) + " out of range");
        }
        for (int i = 0; i < 7; ++i) {
            track[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)] =
                parse_double(row[static_cast<std::size_t>(cols[static_cast<std::size_t>(i)])],
                             path.string());
        }
        seen[static_cast<std::size_t>(f)] = true;
    }
    // Missing frames carry the last known value; a leading gap carries zeros.
    for (int t = 1; t < frame_count; ++t) {
        if (!seen[static_cast<std::size_t>(t)]) {
            track[static_cast<std::size_t>(t)] = track[static_cast<std::size_t>(t - 1)];
        }
    }
    return track;
}

}  // namespace

VideoData load_video(const VideoRecord& record) {
    VideoData data;
    data.record = record;

    const CsvTable motion = read_csv(record.motion_path());
    const int cf = motion.column("frame");
    const int ccx = motion.column("cx");
    const int ccy = motion.column("cy");
    const int cdx = motion.column("dx");
    const int cdy = motion.column("dy");
    if (cf < 0 || ccx < 0 || ccy < 0 || cdx < 0 || cdy < 0) {
        throw ParseError(record.motion_path().string() +
                         ": header must be frame,cx,cy,dx,dy");
    }
    data.motion.resize(static_cast<std::size_t>(record.frame_count));
    for (int t = 0; t < record.frame_count; ++t) {
        data.motion[static_cast<std::size_t>(t)].frame_index = t;
        data.motion[static_cast<std::size_t>(t)].width = record.width;
        data.motion[static_cast<std::size_t>(t)].height = record.height;
    }
    const std::string ctx = record.motion_path().string();
    for (const auto& row : motion.rows) {
        const long f = parse_long(row[static_cast<std::size_t>(cf)], ctx);
        if (f < 0 || f >= record.frame_count) {
            throw ParseError(ctx + ": frame " + std::to_string(f) + " out of range");
        }
        MotionVectorField& field = data.motion[static_cast<std::size_t>(f)];
        field.block_centers.push_back({parse_double(row[static_cast<std::size_t>(ccx)], ctx),
                                       parse_double(row[static_cast<std::size_t>(ccy)], ctx)});
        field.displacements.push_back({parse_double(row[static_cast<std::size_t>(cdx)], ctx),
                                       parse_double(row[static_cast<std::size_t>(cdy)], ctx)});
    }

    data.audio = load_track(record.audio_path(), record.frame_count, "p", 0);
    data.location = load_track(record.loc_path(), record.frame_count, "l", 0);

    const CsvTable labels = read_csv(record.labels_path());
    const int cs = labels.column("start_frame");
    const int ce = labels.column("end_frame");
    const int ca = labels.column("activity");
    if (cs < 0 || ce < 0 || ca < 0) {
        throw ParseError(record.labels_path().string() +
                         ": header must be start_frame,end_frame,activity");
    }
    const std::string lctx = record.labels_path().string();
    for (const auto& row : labels.rows) {
        LabeledInterval iv;
        iv.start_frame = static_cast<int>(parse_long(row[static_cast<std::size_t>(cs)], lctx));
        iv.end_frame = static_cast<int>(parse_long(row[static_cast<std::size_t>(ce)], lctx));
        iv.activity = row[static_cast<std::size_t>(ca)];
        if (iv.start_frame > iv.end_frame) {
            throw ParseError(lctx + ": interval [" + std::to_string(iv.start_frame) + "," +
                             std::to_string(iv.end_frame) + "] is inverted");
        }
        data.truth.intervals.push_back(std::move(iv));
    }
    std::sort(data.truth.intervals.begin(), data.truth.intervals.end(),
              [](const LabeledInterval& a, const LabeledInterval& b) {
                  return a.start_frame < b.start_frame;
              });
    for (std::size_t i = 1; i < data.truth.intervals.size(); ++i) {
        const LabeledInterval& prev = data.truth.intervals[i - 1];
        const LabeledInterval& cur = data.truth.intervals[i];
        if (cur.start_frame <= prev.end_frame) {
            throw ParseError(lctx + ": intervals [" + std::to_string(prev.start_frame) + "," +
                             std::to_string(prev.end_frame) + "] and [" +
                             std::to_string(cur.start_frame) + "," +
                             std::to_string(cur.end_frame) + "] overlap");
        }
    }
    return data;
}

SynthSpec default_synth_spec(int n1, double spread) {
    if (n1 < 2) {
        throw InvalidSpec("synthetic corpus needs at least 2 activities including None");
    }
    SynthSpec spec;
    spec.motion_jitter = 0.15 * spread;
    spec.track_sigma = 0.05 * spread;
    spec.image_noise = 6.0 * spread;

    // Translation magnitudes centered in distinct log-energy bins.
    const double speeds[] = {0.0, 2.0, 8.7, 36.0, 0.0, 8.7, 2.0, 36.0};
    for (int k = 0; k < n1; ++k) {
        SynthActivity act;
        act.name = k == 0 ? "None" : "activity" + std::to_string(k);
        act.translation_x = speeds[k % 8];
        act.translation_y = 0.5 * speeds[(k + 3) % 8];
        act.block_noise = 0.3 + 0.35 * (k % 5);
        act.outlier_fraction = 0.1 * std::min(spread, 1.0);
        act.audio_mean.fill(0.05);
        act.audio_mean[static_cast<std::size_t>(k % 7)] = 0.9;
        act.loc_mean.fill(0.05);
        act.loc_mean[static_cast<std::size_t>(k % 5)] = 0.9;
        act.base_color = {static_cast<std::uint8_t>(40 + (k * 97) % 200),
                          static_cast<std::uint8_t>(30 + (k * 57) % 210),
                          static_cast<std::uint8_t>(60 + (k * 143) % 180)};
        spec.activities.push_back(std::move(act));
    }
    return spec;
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void generate_synthetic(std::uint64_t seed, const SynthSpec& spec,
                        const std::filesystem::path& root) {
    if (spec.activities.size() < 2 || spec.activities.front().name != "None") {
        throw InvalidSpec("spec.activities must start with \"None\" and hold >= 2 entries");
    }
    if (spec.frames_per_video < spec.min_interval || spec.min_interval < 1 ||
        spec.max_interval < spec.min_interval) {
        throw InvalidSpec("inconsistent interval/frame counts");
    }
    const int n1 = static_cast<int>(spec.activities.size());
    fs::create_directories(root);

    for (int vid = 0; vid < spec.video_count; ++vid) {
        char vname[16];
        std::snprintf(vname, sizeof(vname), "video%02d", vid);
        const fs::path dir = root / vname;
        fs::create_directories(dir / "keyframes");

        std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(vid) + 1);
        std::uniform_int_distribution<int> length_dist(spec.min_interval, spec.max_interval);
        std::uniform_int_distribution<int> act_dist(0, n1 - 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_real_distribution<double> outlier_disp(-40.0, 40.0);

        // Schedule: one shuffled pass over all activities, then random picks.
        std::vector<int> order(static_cast<std::size_t>(n1));
        for (int k = 0; k < n1; ++k) order[static_cast<std::size_t>(k)] = k;
        std::shuffle(order.begin(), order.end(), rng);

        std::vector<LabeledInterval> schedule;
        std::vector<int> frame_activity;
        int t = 0;
        std::size_t pass = 0;
        while (t < spec.frames_per_video) {
            int act = pass < order.size() ? order[pass] : act_dist(rng);
            ++pass;
            if (!schedule.empty() &&
                spec.activities[static_cast<std::size_t>(act)].name == schedule.back().activity) {
                act = (act + 1) % n1;
            }
            const int len = std::min(length_dist(rng), spec.frames_per_video - t);
            schedule.push_back({t, t + len - 1, spec.activities[static_cast<std::size_t>(act)].name});
            for (int i = 0; i < len; ++i) frame_activity.push_back(act);
            t += len;
        }

        std::ofstream meta(dir / "meta.csv");
        meta << "width,height,fps,frame_count\n"
             << spec.width << "," << spec.height << "," << format_double(spec.fps) << ","
             << spec.frames_per_video << "\n";

        std::ofstream labels(dir / "labels.csv");
        labels << "start_frame,end_frame,activity\n";
        for (const LabeledInterval& iv : schedule) {
            labels << iv.start_frame << "," << iv.end_frame << "," << iv.activity << "\n";
        }

        std::ofstream motion(dir / "motion.csv");
        motion << "frame,cx,cy,dx,dy\n";
        std::ofstream audio(dir / "audio.csv");
        audio << "frame,p1,p2,p3,p4,p5,p6,p7\n";
        std::ofstream loc(dir / "loc.csv");
        loc << "frame,l1,l2,l3,l4,l5,l6,l7\n";

        constexpr int kBlocksX = 8;
        constexpr int kBlocksY = 6;
        constexpr int kImgW = 32;
        constexpr int kImgH = 24;

        for (int f = 0; f < spec.frames_per_video; ++f) {
            const SynthActivity& act =
                spec.activities[static_cast<std::size_t>(frame_activity[static_cast<std::size_t>(f)])];

            AffineMotion model;
            model.a1 = act.translation_x + spec.motion_jitter * gauss(rng);
            model.a4 = act.translation_y + spec.motion_jitter * gauss(rng);

            for (int by = 0; by < kBlocksY; ++by) {
                for (int bx = 0; bx < kBlocksX; ++bx) {
                    const Vec2 c{(bx + 0.5) * spec.width / kBlocksX,
                                 (by + 0.5) * spec.height / kBlocksY};
                    Vec2 d = model.apply(c);
                    if (unit(rng) < act.outlier_fraction) {
                        d = {outlier_disp(rng), outlier_disp(rng)};
                    } else {
                        d.x += act.block_noise * gauss(rng);
                        d.y += act.block_noise * gauss(rng);
                    }
                    motion << f << "," << format_double(c.x) << "," << format_double(c.y) << ","
                           << format_double(d.x) << "," << format_double(d.y) << "\n";
                }
            }

            audio << f;
            for (double m : act.audio_mean) {
                audio << "," << format_double(clamp01(m + spec.track_sigma * gauss(rng)));
            }
            audio << "\n";
            loc << f;
            for (double m : act.loc_mean) {
                loc << "," << format_double(clamp01(m + spec.track_sigma * gauss(rng)));
            }
            loc << "\n";

            KeyFrameImage img;
            img.width = kImgW;
            img.height = kImgH;
            img.rgb.resize(static_cast<std::size_t>(kImgW) * kImgH * 3);
            for (int y = 0; y < kImgH; ++y) {
                for (int x = 0; x < kImgW; ++x) {
                    const std::size_t px = (static_cast<std::size_t>(y) * kImgW + x) * 3;
                    for (int ch = 0; ch < 3; ++ch) {
                        // Activity color plus a per-activity gradient pattern.
                        double v = act.base_color[static_cast<std::size_t>(ch)] +
                                   20.0 * std::sin((x + 3.0 * ch) * (1 + ch) * 0.4) *
                                       std::cos(y * 0.3) +
                                   spec.image_noise * gauss(rng);
                        img.rgb[px + static_cast<std::size_t>(ch)] = static_cast<std::uint8_t>(
                            std::clamp(v, 0.0, 255.0));
                    }
                }
            }
            char iname[16];
            std::snprintf(iname, sizeof(iname), "%06d.ppm", f);
            write_ppm(dir / "keyframes" / iname, img);
        }
    }
}

}  // namespace adl
