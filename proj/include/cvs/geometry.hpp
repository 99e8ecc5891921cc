#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "cvs/error.hpp"

namespace cvs {

// Coordinate model used throughout:
//  - image coordinates have x growing right and y growing DOWN,
//  - pixel (x, y) is centred on the integer point (x, y) and owns the square
//    [x-0.5, x+0.5) x [y-0.5, y+0.5),
//  - "clockwise" rotation is clockwise on screen, i.e. (1,0) rotated by +90
//    degrees yields (0,1).

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

struct PixelCoord {
    int x = 0;
    int y = 0;
    bool operator==(const PixelCoord& o) const { return x == o.x && y == o.y; }
};

// Row-major pixel order: by y, then by x. Used for every deterministic
// tie-break in the library.
inline bool yx_less(const PixelCoord& a, const PixelCoord& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}
inline bool yx_less(const Vec2& a, const Vec2& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

// Pixel whose square contains the sample point. Halfway samples round away
// from zero; all library coordinates are non-negative.
inline PixelCoord containing_pixel(const Vec2& p) {
    return {static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
}

struct GridExtent {
    int width = 0;
    int height = 0;
    bool contains(const PixelCoord& p) const {
        return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height;
    }
};

// ---------------------------------------------------------------------------
// Principal axes of a pixel cloud.

struct PcaAxes {
    Vec2 center;  // mean of the input points
    Vec2 dir1;    // major axis, unit length
    Vec2 dir2;    // minor axis, unit length, perpendicular to dir1
    double var1 = 0.0;  // variance along dir1, var1 >= var2
    double var2 = 0.0;
};

// Population covariance PCA of a set of pixel centres. Axis signs are
// normalised so each direction has non-negative x, and non-negative y when
// x is (near) zero. Throws DegenerateCluster for fewer than two distinct
// points.
PcaAxes pca_axes(std::span<const PixelCoord> pixels);

// ---------------------------------------------------------------------------
// Axis extension to the cluster outline.

struct AxisEndpoints {
    Vec2 p1;  // endpoint at the most negative axis offset
    Vec2 p2;  // endpoint at the most positive axis offset
};

// Walks the line through `centroid` along +/-`axis` in 0.5-pixel steps and
// returns the centres of the extreme samples whose containing pixel belongs
// to the cluster. Holes along the ray (e.g. a C-shaped cluster) are skipped:
// the first-entered and last-exited runs define the endpoints. Throws
// RayMiss when the line never meets the cluster, InvalidArgument for a
// zero axis.
AxisEndpoints extend_axis_to_outline(std::span<const PixelCoord> cluster_pixels,
                                     const Vec2& centroid, const Vec2& axis);

// ---------------------------------------------------------------------------
// Closest pair between two point sets.

struct NearestPairResult {
    Vec2 a;
    Vec2 b;
    double distance = 0.0;
};

// 2-d k-d tree over a fixed point set. Nearest queries break exact distance
// ties by smallest (y, x) of the stored point.
class KdTree2d {
public:
    KdTree2d() = default;
    explicit KdTree2d(std::span<const Vec2> points);

    bool empty() const { return points_.empty(); }

    struct Hit {
        Vec2 point;
        double dist2 = 0.0;
    };
    Hit nearest(const Vec2& query) const;

private:
    struct Node {
        Vec2 point;
        int left = -1;
        int right = -1;
        int axis = 0;
    };
    int build(int lo, int hi, int depth);
    void search(int node, const Vec2& query, Hit& best) const;

    std::vector<Vec2> points_;  // scratch during build
    std::vector<Node> nodes_;
    int root_ = -1;
};

// Globally closest pair (a in set_a, b in set_b) under Euclidean distance.
// Ties are broken by smallest (y, x) of the a-point, then of the b-point,
// so the result does not depend on input order. The b-side is indexed with
// a k-d tree; average query cost is sublinear in |set_b|. Throws EmptySet
// when either set is empty.
NearestPairResult nearest_pair(std::span<const Vec2> set_a, std::span<const Vec2> set_b);

// ---------------------------------------------------------------------------
// Clockwise ray sweep.

struct RayHit {
    // First ray sample whose containing pixel is in the target, snapped to a
    // 2^-16 sub-pixel grid so integer scene shifts translate it exactly.
    Vec2 point;
    double swept_deg = 0.0;
};

// Sweeps a ray anchored at `pivot` clockwise from `start_dir` in `step_deg`
// increments up to `max_sweep_deg` (inclusive). At each angle the ray is
// marched from the pivot in 0.5-pixel steps until it leaves `extent`; the
// first sample whose containing pixel is in `target` is the hit. Returns
// nullopt when the whole sweep misses. Throws InvalidArgument unless
// 0 < step_deg <= 5 and 0 < max_sweep_deg <= 360 and start_dir is nonzero.
std::optional<RayHit> rotate_ray_to_target(const Vec2& pivot, const Vec2& start_dir,
                                           std::span<const PixelCoord> target,
                                           const GridExtent& extent,
                                           double max_sweep_deg, double step_deg);

// ---------------------------------------------------------------------------
// Region-of-interest quadrilateral.

struct RoiQuad {
    Vec2 a, b, c, d;
    // Set when the requested vertex order self-intersected and the stored
    // order was replaced by the convex hull of the four points.
    bool degenerate_fallback_used = false;

    std::array<Vec2, 4> vertices() const { return {a, b, c, d}; }
};

// Builds the quad A->B->C->D. If that boundary self-intersects, the vertices
// are reordered along their convex hull (starting from the smallest (y, x)
// vertex; a 3-point hull repeats its last vertex) and the fallback flag is
// set. Zero-area output is possible for collinear inputs; callers decide
// whether the area is acceptable.
RoiQuad make_roi_quad(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

double quad_area(const RoiQuad& q);

// Boundary-inclusive even-odd membership test. Throws InvalidRegion when the
// quad has (near-)zero area.
bool point_in_quad(const RoiQuad& q, const Vec2& p);

} // namespace cvs
