#pragma once

#include "cvs/label_map.hpp"

namespace cvs {

// How fat pixels from the second stream are merged into the anatomy stream.
enum class FusionMode {
    // Fat only fills pixels the anatomy stream left as background; anatomy
    // labels always win. Default.
    BackgroundFill,
    // Fat replaces whatever the anatomy stream predicted.
    FatOverwrite,
};

const char* fusion_mode_name(FusionMode mode) noexcept;

// Merges a stream1 anatomy map with a stream2 map carrying a "fat" class
// into one map under the fused palette. Non-fat pixels always copy stream1.
// Throws DimensionMismatch for size disagreement and PaletteMismatch when
// p1 is not stream1-tagged or p2 has no fat class.
LabelMap fuse_streams(const LabelMap& p1, const LabelMap& p2,
                      FusionMode mode = FusionMode::BackgroundFill);

} // namespace cvs
