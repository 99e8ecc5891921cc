#include "cvs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace cvs {
namespace {

constexpr double kPi = 3.14159265358979323846;

long long pixel_key(const PixelCoord& p) {
    return (static_cast<long long>(p.y) << 32) ^ static_cast<unsigned int>(p.x);
}

std::unordered_set<long long> pixel_set(std::span<const PixelCoord> pixels) {
    std::unordered_set<long long> set;
    set.reserve(pixels.size() * 2);
    for (const auto& p : pixels) set.insert(pixel_key(p));
    return set;
}

// Axis signs: prefer non-negative x; for a (near-)vertical direction prefer
// non-negative y.
Vec2 normalize_sign(Vec2 v) {
    if (v.x < 0.0) v = -v;
    if (std::abs(v.x) <= 1e-12 && v.y < 0.0) v = -v;
    return v;
}

Vec2 unit_or_throw(const Vec2& v, const char* what) {
    double n = norm(v);
    if (n < 1e-12) fail(Errc::InvalidArgument, std::string(what) + ": zero direction");
    return {v.x / n, v.y / n};
}

double dist2(const Vec2& a, const Vec2& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Ray-hit samples snap to a 2^-16 sub-pixel grid. Integer shifts preserve
// the grid, so translating a scene by whole pixels moves the returned point
// by exactly that shift; full-precision sums would double-round when a
// shift crosses a power-of-two binade.
Vec2 snap_subpixel(const Vec2& v) {
    return {std::ldexp(std::nearbyint(std::ldexp(v.x, 16)), -16),
            std::ldexp(std::nearbyint(std::ldexp(v.y, 16)), -16)};
}

bool on_segment_collinear(const Vec2& u, const Vec2& v, const Vec2& p) {
    return std::min(u.x, v.x) <= p.x && p.x <= std::max(u.x, v.x) &&
           std::min(u.y, v.y) <= p.y && p.y <= std::max(u.y, v.y);
}

// Segment intersection including endpoint touches and collinear overlap; any
// contact between non-adjacent quad edges makes the boundary non-simple.
bool segments_intersect(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s) {
    double d1 = cross(s - r, p - r);
    double d2 = cross(s - r, q - r);
    double d3 = cross(q - p, r - p);
    double d4 = cross(q - p, s - p);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment_collinear(r, s, p)) return true;
    if (d2 == 0 && on_segment_collinear(r, s, q)) return true;
    if (d3 == 0 && on_segment_collinear(p, q, r)) return true;
    if (d4 == 0 && on_segment_collinear(p, q, s)) return true;
    return false;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) { return a == b; }),
              pts.end());
    size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Vec2> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (size_t i = n - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

} // namespace

PcaAxes pca_axes(std::span<const PixelCoord> pixels) {
    size_t n = pixels.size();
    if (n < 2) fail(Errc::DegenerateCluster, "pca_axes: need at least two pixels");

    double sx = 0, sy = 0;
    for (const auto& p : pixels) {
        sx += p.x;
        sy += p.y;
    }
    Vec2 mean{sx / static_cast<double>(n), sy / static_cast<double>(n)};

    double a = 0, b = 0, c = 0;
    bool distinct = false;
    for (const auto& p : pixels) {
        if (!(p == pixels[0])) distinct = true;
        double dx = p.x - mean.x, dy = p.y - mean.y;
        a += dx * dx;
        b += dx * dy;
        c += dy * dy;
    }
    if (!distinct) fail(Errc::DegenerateCluster, "pca_axes: all pixels identical");
    a /= static_cast<double>(n);
    b /= static_cast<double>(n);
    c /= static_cast<double>(n);

    PcaAxes axes;
    axes.center = mean;
    if (std::abs(b) <= 1e-12 * std::max({a, c, 1.0})) {
        if (a >= c) {
            axes.dir1 = {1, 0};
            axes.var1 = a;
            axes.var2 = c;
        } else {
            axes.dir1 = {0, 1};
            axes.var1 = c;
            axes.var2 = a;
        }
    } else {
        double half = 0.5 * (a - c);
        double disc = std::sqrt(half * half + b * b);
        axes.var1 = 0.5 * (a + c) + disc;
        axes.var2 = std::max(0.0, 0.5 * (a + c) - disc);
        Vec2 v{b, axes.var1 - a};
        double vn = norm(v);
        axes.dir1 = {v.x / vn, v.y / vn};
    }
    axes.dir1 = normalize_sign(axes.dir1);
    axes.dir2 = normalize_sign(Vec2{-axes.dir1.y, axes.dir1.x});
    return axes;
}

AxisEndpoints extend_axis_to_outline(std::span<const PixelCoord> cluster_pixels,
                                     const Vec2& centroid, const Vec2& axis) {
    if (cluster_pixels.empty()) fail(Errc::DegenerateCluster, "extend_axis: empty cluster");
    Vec2 dir = unit_or_throw(axis, "extend_axis");
    auto members = pixel_set(cluster_pixels);

    int xmin = cluster_pixels[0].x, xmax = xmin;
    int ymin = cluster_pixels[0].y, ymax = ymin;
    for (const auto& p : cluster_pixels) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    double reach = std::hypot(static_cast<double>(xmax - xmin + 2),
                              static_cast<double>(ymax - ymin + 2));
    // The centroid lies inside the bounding box, so +/-reach covers every
    // sample whose containing pixel could be a member.
    long kmax = std::lround(std::ceil(reach / 0.5)) + 1;

    bool found = false;
    long kfirst = 0, klast = 0;
    for (long k = -kmax; k <= kmax; ++k) {
        Vec2 sample = centroid + dir * (0.5 * static_cast<double>(k));
        if (members.count(pixel_key(containing_pixel(sample))) == 0) continue;
        if (!found) {
            kfirst = k;
            found = true;
        }
        klast = k;
    }
    if (!found) fail(Errc::RayMiss, "extend_axis: ray never enters the cluster");

    auto sample_center = [&](long k) {
        PixelCoord px = containing_pixel(centroid + dir * (0.5 * static_cast<double>(k)));
        return Vec2{static_cast<double>(px.x), static_cast<double>(px.y)};
    };
    return {sample_center(kfirst), sample_center(klast)};
}

KdTree2d::KdTree2d(std::span<const Vec2> points)
    : points_(points.begin(), points.end()) {
    if (!points_.empty()) {
        nodes_.reserve(points_.size());
        root_ = build(0, static_cast<int>(points_.size()), 0);
    }
    points_.clear();
}

int KdTree2d::build(int lo, int hi, int depth) {
    if (lo >= hi) return -1;
    int axis = depth & 1;
    int mid = lo + (hi - lo) / 2;
    std::nth_element(points_.begin() + lo, points_.begin() + mid, points_.begin() + hi,
                     [axis](const Vec2& a, const Vec2& b) {
                         double ca = axis == 0 ? a.x : a.y;
                         double cb = axis == 0 ? b.x : b.y;
                         if (ca != cb) return ca < cb;
                         return yx_less(a, b);
                     });
    int idx = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{points_[mid], -1, -1, axis});
    int left = build(lo, mid, depth + 1);
    int right = build(mid + 1, hi, depth + 1);
    nodes_[idx].left = left;
    nodes_[idx].right = right;
    return idx;
}

void KdTree2d::search(int node, const Vec2& query, Hit& best) const {
    if (node < 0) return;
    const Node& n = nodes_[node];
    double d2 = dist2(query, n.point);
    if (d2 < best.dist2 || (d2 == best.dist2 && yx_less(n.point, best.point)))
        best = {n.point, d2};
    double delta = (n.axis == 0 ? query.x - n.point.x : query.y - n.point.y);
    int near = delta < 0 ? n.left : n.right;
    int far = delta < 0 ? n.right : n.left;
    search(near, query, best);
    // Equal plane distance can still tie on exact distance, so prune only on
    // a strict excess.
    if (delta * delta <= best.dist2) search(far, query, best);
}

KdTree2d::Hit KdTree2d::nearest(const Vec2& query) const {
    if (root_ < 0) fail(Errc::EmptySet, "KdTree2d::nearest on empty tree");
    Hit best{Vec2{}, std::numeric_limits<double>::infinity()};
    search(root_, query, best);
    return best;
}

NearestPairResult nearest_pair(std::span<const Vec2> set_a, std::span<const Vec2> set_b) {
    if (set_a.empty() || set_b.empty())
        fail(Errc::EmptySet, "nearest_pair: empty input set");
    KdTree2d tree(set_b);
    bool have = false;
    NearestPairResult best{};
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& a : set_a) {
        KdTree2d::Hit hit = tree.nearest(a);
        bool better = false;
        if (!have || hit.dist2 < best_d2) {
            better = true;
        } else if (hit.dist2 == best_d2) {
            if (yx_less(a, best.a)) better = true;
            else if (a == best.a && yx_less(hit.point, best.b)) better = true;
        }
        if (better) {
            best = {a, hit.point, 0.0};
            best_d2 = hit.dist2;
            have = true;
        }
    }
    best.distance = std::sqrt(best_d2);
    return best;
}

std::optional<RayHit> rotate_ray_to_target(const Vec2& pivot, const Vec2& start_dir,
                                           std::span<const PixelCoord> target,
                                           const GridExtent& extent,
                                           double max_sweep_deg, double step_deg) {
    if (!(step_deg > 0.0 && step_deg <= 5.0))
        fail(Errc::InvalidArgument, "rotate_ray: step must be in (0, 5] degrees");
    if (!(max_sweep_deg > 0.0 && max_sweep_deg <= 360.0))
        fail(Errc::InvalidArgument, "rotate_ray: max sweep must be in (0, 360] degrees");
    Vec2 u = unit_or_throw(start_dir, "rotate_ray");
    if (target.empty()) return std::nullopt;
    auto goal = pixel_set(target);

    long steps = std::lround(std::floor(max_sweep_deg / step_deg + 1e-9));
    for (long k = 0; k <= steps; ++k) {
        double deg = static_cast<double>(k) * step_deg;
        double rad = deg * kPi / 180.0;
        double cs = std::cos(rad), sn = std::sin(rad);
        // Clockwise in image coordinates (y down): (1,0) -> (0,1) at +90 deg.
        Vec2 dir{u.x * cs - u.y * sn, u.x * sn + u.y * cs};
        for (long m = 0;; ++m) {
            Vec2 sample = pivot + dir * (0.5 * static_cast<double>(m));
            PixelCoord px = containing_pixel(sample);
            if (!extent.contains(px)) break;
            if (goal.count(pixel_key(px)) != 0) return RayHit{snap_subpixel(sample), deg};
        }
    }
    return std::nullopt;
}

RoiQuad make_roi_quad(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    RoiQuad quad{a, b, c, d, false};
    bool self = segments_intersect(a, b, c, d) || segments_intersect(b, c, d, a);
    if (!self) return quad;

    std::vector<Vec2> hull = convex_hull({a, b, c, d});
    quad.degenerate_fallback_used = true;
    if (hull.size() < 3) return quad;  // collinear input; callers see ~zero area
    size_t start = 0;
    for (size_t i = 1; i < hull.size(); ++i)
        if (yx_less(hull[i], hull[start])) start = i;
    std::array<Vec2, 4> v{};
    for (size_t i = 0; i < 4; ++i)
        v[i] = hull[(start + std::min(i, hull.size() - 1)) % hull.size()];
    if (hull.size() == 3) v[3] = hull[(start + 2) % 3];
    quad.a = v[0];
    quad.b = v[1];
    quad.c = v[2];
    quad.d = v[3];
    return quad;
}

double quad_area(const RoiQuad& q) {
    auto v = q.vertices();
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += cross(v[i], v[(i + 1) % 4]);
    return 0.5 * std::abs(s);
}

bool point_in_quad(const RoiQuad& q, const Vec2& p) {
    if (quad_area(q) < 1e-12) fail(Errc::InvalidRegion, "point_in_quad: zero-area region");
    auto v = q.vertices();
    for (int i = 0; i < 4; ++i) {
        const Vec2& u0 = v[i];
        const Vec2& u1 = v[(i + 1) % 4];
        if (u0 == u1) {
            if (p == u0) return true;
            continue;
        }
        if (cross(u1 - u0, p - u0) == 0.0 && on_segment_collinear(u0, u1, p)) return true;
    }
    bool inside = false;
    for (int i = 0; i < 4; ++i) {
        const Vec2& u0 = v[i];
        const Vec2& u1 = v[(i + 1) % 4];
        if ((u0.y > p.y) != (u1.y > p.y)) {
            double xint = u0.x + (p.y - u0.y) * (u1.x - u0.x) / (u1.y - u0.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

} // namespace cvs
