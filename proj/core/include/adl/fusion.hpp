#pragma once

#include <span>
#include <string>
#include <vector>

#include "adl/descriptors.hpp"

namespace adl {

enum class Granularity { frame, segment };

Granularity parse_granularity(const std::string& name);
std::string granularity_name(Granularity g);

// Selection of descriptor families for early fusion. Token names (CLI/config)
// are htpe, hc, rm, audio, cld, loc, joined with '+'.
struct SpaceMask {
    bool h_tpe = false;
    bool h_c = false;
    bool rm = false;
    bool audio = false;
    bool cld = false;
    bool loc = false;

    bool any() const { return h_tpe || h_c || rm || audio || cld || loc; }
    bool operator==(const SpaceMask&) const = default;
};

// All 63 non-empty masks in binary-counting order
// (bit 0 = htpe, 1 = hc, 2 = rm, 3 = audio, 4 = cld, 5 = loc).
std::vector<SpaceMask> enumerate_spaces();

// Fused dimensionality: H_tpe 10, H_c 8, RM 16, Audio 7, CLD 12, Loc 7.
// Throws CldAtFrameGranularity when the mask selects CLD at frame rate.
int mask_dimension(const SpaceMask& mask, Granularity granularity);

SpaceMask parse_mask(const std::string& text);
std::string mask_to_string(const SpaceMask& mask);

struct ObservationSequence {
    Granularity granularity = Granularity::frame;
    SpaceMask mask;
    std::vector<std::vector<double>> vectors;
    std::string source_video;
};

// Concatenates the selected parts per time step in the fixed order
// H_tpe(x), H_tpe(y), H_c, RM, Audio, CLD, Loc.
ObservationSequence assemble(const SpaceMask& mask,
                             std::span<const FrameDescriptors> frames,
                             const std::string& source_video = {});
ObservationSequence assemble(const SpaceMask& mask,
                             std::span<const SegmentDescriptors> segments,
                             const std::string& source_video = {});

}  // namespace adl
