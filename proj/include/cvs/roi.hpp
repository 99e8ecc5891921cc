#pragma once

#include "cvs/geometry.hpp"
#include "cvs/label_map.hpp"

#include <optional>

namespace cvs {

// Knobs for estimate_roi. k_edge is the number of gallbladder-edge pixels
// used to estimate the local edge direction near the duct; the sweep
// parameters feed rotate_ray_to_target; quads below min_area are rejected.
struct RoiConfig {
    int k_edge = 25;
    double step_deg = 1.0;
    double max_sweep_deg = 180.0;
    double min_area = 25.0;
};

// Why a frame could not produce a region of interest.
enum class RoiFailure {
    DuctMissing,
    GallbladderMissing,
    CNotFound,
    LiverMissing,
    DegenerateRoi,
};

const char* roi_failure_name(RoiFailure failure) noexcept;

struct RoiEstimate {
    RoiQuad quad;
    // True when vertex C came from the liver edge because no fat cluster
    // was hit within the sweep budget.
    bool c_from_liver_fallback = false;
    // Degrees the ray swept before hitting the C target.
    double c_swept_deg = 0.0;
    // Duct-axis endpoints after orientation: p1 is the gallbladder-side end.
    Vec2 p1{};
    Vec2 p2{};
};

struct RoiResult {
    std::optional<RoiEstimate> estimate;
    std::optional<RoiFailure> failure;

    bool ok() const noexcept { return estimate.has_value(); }
};

// Four-point region-of-interest estimation on a fused label map:
//   A — duct end fused to the gallbladder (midpoint of the duct-axis
//       endpoint nearest the gallbladder edge and that edge pixel),
//   B — the other duct-axis endpoint,
//   C — clockwise ray sweep from B (starting toward A) until the largest
//       fat cluster's boundary is hit, falling back to the liver edge,
//   D — midpoint of the closest gallbladder-edge/liver-edge pixel pair.
// Anatomy-dependent problems come back as RoiResult failures; config or
// palette problems throw.
RoiResult estimate_roi(const LabelMap& map, const RoiConfig& cfg = {});

} // namespace cvs
