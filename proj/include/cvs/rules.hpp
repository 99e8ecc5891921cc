#pragma once

#include "cvs/geometry.hpp"
#include "cvs/label_map.hpp"
#include "cvs/roi.hpp"

#include <cstddef>
#include <optional>

namespace cvs {

// Rule knobs. The liver and plate cluster thresholds are strict ("more
// than"); min_cluster is the noise floor below which duct/artery clusters
// are ignored when counting for the third criterion (0 disables it).
struct RuleThresholds {
    int t_liver = 100;
    int t_cp = 100;
    int min_cluster = 5;
};

// Pixel/cluster counts each criterion was decided on. Counts are always
// re-derivable from the map and region.
struct RuleEvidence {
    std::size_t fat_in_roi = 0;
    std::size_t liver_largest_in_roi = 0;
    std::size_t cystic_plate_largest_in_roi = 0;
    std::size_t duct_clusters_in_roi = 0;
    std::size_t artery_clusters_in_roi = 0;
};

// First criterion: the region is cleared of fat (zero fat pixels) and shows
// substantial liver (largest liver cluster strictly above t_liver).
bool assess_c1(const LabelMap& map, const RoiQuad& roi, const RuleThresholds& th,
               RuleEvidence& evidence);

// Second criterion: the exposed cystic plate is substantial (largest plate
// cluster strictly above t_cp).
bool assess_c2(const LabelMap& map, const RoiQuad& roi, const RuleThresholds& th,
               RuleEvidence& evidence);

// Third criterion: exactly one duct cluster and exactly one artery cluster
// (each at least min_cluster pixels) inside the region.
bool assess_c3(const LabelMap& map, const RoiQuad& roi, const RuleThresholds& th,
               RuleEvidence& evidence);

struct CvsAssessment {
    bool c1 = false;
    bool c2 = false;
    bool c3 = false;
    bool cvs = false;  // always c1 && c2 && c3
    RuleEvidence evidence;
    std::optional<RoiQuad> roi;           // set when a region was available
    std::optional<RoiFailure> roi_failure; // set when estimation failed
};

struct AssessConfig {
    RoiConfig roi;
    RuleThresholds rules;
};

// Full per-frame assessment: estimates the region of interest and evaluates
// the three criteria. When estimation fails, all criteria are false, the
// evidence is zero, and the failure reason is recorded — never an exception.
CvsAssessment assess_cvs(const LabelMap& map, const AssessConfig& cfg = {});

// Same evaluation against a caller-supplied region (e.g. a ground-truth
// quad) instead of an estimated one.
CvsAssessment assess_with_quad(const LabelMap& map, const RoiQuad& quad,
                               const RuleThresholds& th = {});

} // namespace cvs
