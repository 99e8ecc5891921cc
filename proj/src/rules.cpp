#include "cvs/rules.hpp"

#include "cvs/error.hpp"
#include "cvs/regions.hpp"

#include <algorithm>

namespace cvs {

namespace {

void check_fused(const LabelMap& map, const char* op) {
    if (map.palette().tag() != StreamTag::Fused) {
        fail(Errc::PaletteMismatch, std::string(op) + ": map must carry the fused palette, got " +
                                        stream_tag_name(map.palette().tag()));
    }
}

void check_thresholds(const RuleThresholds& th) {
    if (th.t_liver < 0 || th.t_cp < 0 || th.min_cluster < 0) {
        fail(Errc::InvalidArgument, "rule thresholds must be >= 0");
    }
}

std::size_t largest_in_region(const LabelMap& map, ClassId cls, const RoiQuad& roi) {
    const auto clusters = clusters_in_region(map, cls, roi);
    return clusters.empty() ? 0 : clusters.front().size();
}

std::size_t count_in_region(const LabelMap& map, ClassId cls, const RoiQuad& roi,
                            int min_cluster) {
    const auto clusters = clusters_in_region(map, cls, roi);
    return std::count_if(clusters.begin(), clusters.end(), [min_cluster](const Cluster& c) {
        return c.size() >= std::size_t(min_cluster);
    });
}

} // namespace

bool assess_c1(const LabelMap& map, const RoiQuad& roi, const RuleThresholds& th,
               RuleEvidence& evidence) {
    check_fused(map, "assess_c1");
    check_thresholds(th);
    std::size_t fat = 0;
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            if (map.at(x, y) == cls::fat && point_in_quad(roi, {double(x), double(y)})) ++fat;
        }
    }
    evidence.fat_in_roi = fat;
    evidence.liver_largest_in_roi = largest_in_region(map, cls::liver, roi);
    return fat == 0 && evidence.liver_largest_in_roi > std::size_t(th.t_liver);
}

bool assess_c2(const LabelMap& map, const RoiQuad& roi, const RuleThresholds& th,
               RuleEvidence& evidence) {
    check_fused(map, "assess_c2");
    check_thresholds(th);
    evidence.cystic_plate_largest_in_roi = largest_in_region(map, cls::cystic_plate, roi);
    return evidence.cystic_plate_largest_in_roi > std::size_t(th.t_cp);
}

bool assess_c3(const LabelMap& map, const RoiQuad& roi, const RuleThresholds& th,
               RuleEvidence& evidence) {
    check_fused(map, "assess_c3");
    check_thresholds(th);
    evidence.duct_clusters_in_roi = count_in_region(map, cls::cystic_duct, roi, th.min_cluster);
    evidence.artery_clusters_in_roi =
        count_in_region(map, cls::cystic_artery, roi, th.min_cluster);
    return evidence.duct_clusters_in_roi == 1 && evidence.artery_clusters_in_roi == 1;
}

CvsAssessment assess_with_quad(const LabelMap& map, const RoiQuad& quad,
                               const RuleThresholds& th) {
    CvsAssessment out;
    out.roi = quad;
    out.c1 = assess_c1(map, quad, th, out.evidence);
    out.c2 = assess_c2(map, quad, th, out.evidence);
    out.c3 = assess_c3(map, quad, th, out.evidence);
    out.cvs = out.c1 && out.c2 && out.c3;
    return out;
}

CvsAssessment assess_cvs(const LabelMap& map, const AssessConfig& cfg) {
    check_fused(map, "assess_cvs");
    check_thresholds(cfg.rules);
    const RoiResult roi = estimate_roi(map, cfg.roi);
    if (!roi.ok()) {
        CvsAssessment out;
        out.roi_failure = roi.failure;
        return out;
    }
    return assess_with_quad(map, roi.estimate->quad, cfg.rules);
}

} // namespace cvs
