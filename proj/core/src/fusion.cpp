#include "adl/fusion.hpp"

#include <sstream>

#include "adl/errors.hpp"

namespace adl {

Granularity parse_granularity(const std::string& name) {
    if (name == "frame") return Granularity::frame;
    if (name == "segment") return Granularity::segment;
    throw InvalidConfig("unknown granularity '" + name + "' (expected frame|segment)");
}

std::string granularity_name(Granularity g) {
    return g == Granularity::frame ? "frame" : "segment";
}

namespace {

SpaceMask from_bits(unsigned bits) {
    SpaceMask m;
    m.h_tpe = bits & 1u;
    m.h_c = bits & 2u;
    m.rm = bits & 4u;
    m.audio = bits & 8u;
    m.cld = bits & 16u;
    m.loc = bits & 32u;
    return m;
}

}  // namespace

std::vector<SpaceMask> enumerate_spaces() {
    std::vector<SpaceMask> masks;
    masks.reserve(63);
    for (unsigned bits = 1; bits < 64; ++bits) {
        masks.push_back(from_bits(bits));
    }
    return masks;
}

int mask_dimension(const SpaceMask& mask, Granularity granularity) {
    if (!mask.any()) {
        throw InvalidConfig("empty description-space mask");
    }
    if (mask.cld && granularity == Granularity::frame) {
        throw CldAtFrameGranularity("CLD requires segment granularity (key frames)");
    }
    int n = 0;
    if (mask.h_tpe) n += 10;
    if (mask.h_c) n += 8;
    if (mask.rm) n += 16;
    if (mask.audio) n += 7;
    if (mask.cld) n += 12;
    if (mask.loc) n += 7;
    return n;
}

SpaceMask parse_mask(const std::string& text) {
    SpaceMask m;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, '+')) {
        if (token == "htpe") m.h_tpe = true;
        else if (token == "hc") m.h_c = true;
        else if (token == "rm") m.rm = true;
        else if (token == "audio") m.audio = true;
        else if (token == "cld") m.cld = true;
        else if (token == "loc") m.loc = true;
        else throw InvalidConfig("unknown mask token '" + token + "'");
    }
    if (!m.any()) {
        throw InvalidConfig("mask '" + text + "' selects no descriptors");
    }
    return m;
}

std::string mask_to_string(const SpaceMask& mask) {
    std::string out;
    auto add = [&out](const char* token) {
        if (!out.empty()) out += '+';
        out += token;
    };
    if (mask.h_tpe) add("htpe");
    if (mask.h_c) add("hc");
    if (mask.rm) add("rm");
    if (mask.audio) add("audio");
    if (mask.cld) add("cld");
    if (mask.loc) add("loc");
    return out;
}

namespace {

void append_frame_parts(const SpaceMask& mask, const FrameDescriptors& f,
                        std::vector<double>& out) {
    if (mask.h_tpe) {
        out.insert(out.end(), f.h_tpe_x.begin(), f.h_tpe_x.end());
        out.insert(out.end(), f.h_tpe_y.begin(), f.h_tpe_y.end());
    }
    if (mask.h_c) out.insert(out.end(), f.h_c.begin(), f.h_c.end());
    if (mask.rm) out.insert(out.end(), f.rm.begin(), f.rm.end());
    if (mask.audio) out.insert(out.end(), f.audio.begin(), f.audio.end());
}

}  // namespace

ObservationSequence assemble(const SpaceMask& mask,
                             std::span<const FrameDescriptors> frames,
                             const std::string& source_video) {
    if (frames.empty()) {
        throw MissingPart("assemble: empty frame descriptor sequence");
    }
    const int dim = mask_dimension(mask, Granularity::frame);
    ObservationSequence seq;
    seq.granularity = Granularity::frame;
    seq.mask = mask;
    seq.source_video = source_video;
    seq.vectors.reserve(frames.size());
    for (const FrameDescriptors& f : frames) {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(dim));
        append_frame_parts(mask, f, v);
        if (mask.loc) v.insert(v.end(), f.location.begin(), f.location.end());
        seq.vectors.push_back(std::move(v));
    }
    return seq;
}

ObservationSequence assemble(const SpaceMask& mask,
                             std::span<const SegmentDescriptors> segments,
                             const std::string& source_video) {
    if (segments.empty()) {
        throw MissingPart("assemble: empty segment descriptor sequence");
    }
    const int dim = mask_dimension(mask, Granularity::segment);
    ObservationSequence seq;
    seq.granularity = Granularity::segment;
    seq.mask = mask;
    seq.source_video = source_video;
    seq.vectors.reserve(segments.size());
    for (const SegmentDescriptors& s : segments) {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(dim));
        append_frame_parts(mask, s.base, v);
        if (mask.cld) v.insert(v.end(), s.cld.begin(), s.cld.end());
        if (mask.loc) v.insert(v.end(), s.base.location.begin(), s.base.location.end());
        seq.vectors.push_back(std::move(v));
    }
    return seq;
}

}  // namespace adl
