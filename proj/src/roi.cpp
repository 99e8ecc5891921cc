#include "cvs/roi.hpp"

#include "cvs/error.hpp"
#include "cvs/regions.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace cvs {

namespace {

RoiResult fail_roi(RoiFailure f) {
    RoiResult r;
    r.failure = f;
    return r;
}

std::vector<Vec2> pixel_centers(const EdgeSet& pixels) {
    std::vector<Vec2> out;
    out.reserve(pixels.size());
    for (const PixelCoord& p : pixels) out.push_back({double(p.x), double(p.y)});
    return out;
}

// Direction of the gallbladder edge near `at`: major PCA axis of the k edge
// pixels closest to it. Ties on distance resolve row-major so the subset is
// input-order independent. Returns nullopt when the subset is degenerate
// (e.g. a single edge pixel).
std::optional<Vec2> local_edge_direction(const EdgeSet& edge, const Vec2& at, int k) {
    std::vector<PixelCoord> nearest(edge.begin(), edge.end());
    auto closer = [&at](const PixelCoord& l, const PixelCoord& r) {
        const double dl = (double(l.x) - at.x) * (double(l.x) - at.x) +
                          (double(l.y) - at.y) * (double(l.y) - at.y);
        const double dr = (double(r.x) - at.x) * (double(r.x) - at.x) +
                          (double(r.y) - at.y) * (double(r.y) - at.y);
        if (dl != dr) return dl < dr;
        return yx_less(l, r);
    };
    const std::size_t take = std::min<std::size_t>(nearest.size(), std::size_t(k));
    std::partial_sort(nearest.begin(), nearest.begin() + take, nearest.end(), closer);
    nearest.resize(take);
    if (nearest.size() < 2) return std::nullopt;
    try {
        return pca_axes(nearest).dir1;
    } catch (const Error& e) {
        if (e.code() == Errc::DegenerateCluster) return std::nullopt;
        throw;
    }
}

} // namespace

const char* roi_failure_name(RoiFailure failure) noexcept {
    switch (failure) {
    case RoiFailure::DuctMissing: return "DuctMissing";
    case RoiFailure::GallbladderMissing: return "GallbladderMissing";
    case RoiFailure::CNotFound: return "CNotFound";
    case RoiFailure::LiverMissing: return "LiverMissing";
    case RoiFailure::DegenerateRoi: return "DegenerateRoi";
    }
    return "unknown";
}

RoiResult estimate_roi(const LabelMap& map, const RoiConfig& cfg) {
    if (map.palette().tag() != StreamTag::Fused) {
        fail(Errc::PaletteMismatch,
             std::string("estimate_roi: map must carry the fused palette, got ") +
                 stream_tag_name(map.palette().tag()));
    }
    if (cfg.k_edge < 2) fail(Errc::InvalidArgument, "estimate_roi: k_edge must be >= 2");
    if (!(cfg.min_area >= 0.0)) fail(Errc::InvalidArgument, "estimate_roi: min_area must be >= 0");
    if (!(cfg.step_deg > 0.0 && cfg.step_deg <= 5.0)) {
        fail(Errc::InvalidArgument, "estimate_roi: step_deg must be in (0, 5]");
    }
    if (!(cfg.max_sweep_deg > 0.0 && cfg.max_sweep_deg <= 360.0)) {
        fail(Errc::InvalidArgument, "estimate_roi: max_sweep_deg must be in (0, 360]");
    }

    const GridExtent extent{map.width(), map.height()};

    const auto duct = largest_cluster(map, cls::cystic_duct);
    if (!duct) return fail_roi(RoiFailure::DuctMissing);

    PcaAxes duct_axes;
    try {
        duct_axes = pca_axes(duct->pixels);
    } catch (const Error& e) {
        // A duct too small or thin to orient is as unusable as no duct.
        if (e.code() == Errc::DegenerateCluster) return fail_roi(RoiFailure::DuctMissing);
        throw;
    }

    const EdgeSet gb_edge = class_edge(map, cls::gallbladder);
    if (gb_edge.empty()) return fail_roi(RoiFailure::GallbladderMissing);

    // X1 = duct axis most perpendicular to the local gallbladder edge, i.e.
    // the one with the smaller |cos| against it; the major axis wins ties
    // and stands in when the edge direction is unavailable.
    Vec2 x1 = duct_axes.dir1;
    if (const auto edge_dir = local_edge_direction(gb_edge, duct_axes.center, cfg.k_edge)) {
        if (std::abs(dot(duct_axes.dir2, *edge_dir)) < std::abs(dot(duct_axes.dir1, *edge_dir)))
            x1 = duct_axes.dir2;
    }

    AxisEndpoints ends;
    try {
        ends = extend_axis_to_outline(duct->pixels, duct_axes.center, x1);
    } catch (const Error& e) {
        if (e.code() == Errc::RayMiss) return fail_roi(RoiFailure::DuctMissing);
        throw;
    }

    const std::vector<Vec2> gb_centers = pixel_centers(gb_edge);
    const KdTree2d gb_tree(gb_centers);
    const auto hit1 = gb_tree.nearest(ends.p1);
    const auto hit2 = gb_tree.nearest(ends.p2);
    Vec2 p1 = ends.p1;
    Vec2 p2 = ends.p2;
    Vec2 p1_gb = hit1.point;
    if (hit2.dist2 < hit1.dist2 || (hit2.dist2 == hit1.dist2 && yx_less(ends.p2, ends.p1))) {
        std::swap(p1, p2);
        p1_gb = hit2.point;
    }

    const Vec2 a = (p1 + p1_gb) * 0.5;
    const Vec2 b = p2;

    const Vec2 toward_a = a - b;
    if (norm(toward_a) < 1e-9) return fail_roi(RoiFailure::CNotFound);
    const Vec2 start_dir = toward_a * (1.0 / norm(toward_a));

    std::optional<RayHit> c_hit;
    if (const auto fat = largest_cluster(map, cls::fat)) {
        const EdgeSet fat_boundary = cluster_boundary(*fat, extent);
        c_hit = rotate_ray_to_target(b, start_dir, fat_boundary, extent, cfg.max_sweep_deg,
                                     cfg.step_deg);
    }
    bool c_from_liver = false;
    EdgeSet liver_edge;
    bool liver_edge_ready = false;
    if (!c_hit) {
        liver_edge = class_edge(map, cls::liver);
        liver_edge_ready = true;
        c_hit = rotate_ray_to_target(b, start_dir, liver_edge, extent, cfg.max_sweep_deg,
                                     cfg.step_deg);
        c_from_liver = true;
    }
    if (!c_hit) return fail_roi(RoiFailure::CNotFound);
    const Vec2 c = c_hit->point;

    if (!liver_edge_ready) liver_edge = class_edge(map, cls::liver);
    if (liver_edge.empty()) return fail_roi(RoiFailure::LiverMissing);
    const auto pair = nearest_pair(gb_centers, pixel_centers(liver_edge));
    const Vec2 d = (pair.a + pair.b) * 0.5;

    const RoiQuad quad = make_roi_quad(a, b, c, d);
    if (quad_area(quad) < cfg.min_area) return fail_roi(RoiFailure::DegenerateRoi);

    RoiResult result;
    result.estimate = RoiEstimate{quad, c_from_liver, c_hit->swept_deg, p1, p2};
    return result;
}

} // namespace cvs
