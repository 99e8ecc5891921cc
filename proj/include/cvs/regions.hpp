#pragma once

#include "cvs/geometry.hpp"
#include "cvs/label_map.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace cvs {

enum class Connectivity {
    Four,
    Eight,
};

struct PixelBBox {
    int xmin = 0;
    int ymin = 0;
    int xmax = 0;
    int ymax = 0;
};

// One connected component of same-class pixels. `pixels` is sorted row-major
// ((y, x) ascending), which every consumer relies on for determinism.
struct Cluster {
    ClassId cls = 0;
    std::vector<PixelCoord> pixels;
    PixelBBox bbox{};
    Vec2 centroid{};

    std::size_t size() const noexcept { return pixels.size(); }
};

// Sorted row-major list of pixel coordinates.
using EdgeSet = std::vector<PixelCoord>;

// Labels the pixels of class `cls` into connected components. Result is
// ordered by size descending, ties broken by bbox ymin then xmin; equal
// keys keep discovery (row-major) order.
std::vector<Cluster> connected_components(const LabelMap& map, ClassId cls,
                                          Connectivity connectivity = Connectivity::Eight);

// Largest component of `cls`, or nullopt when the class is absent.
std::optional<Cluster> largest_cluster(const LabelMap& map, ClassId cls,
                                       Connectivity connectivity = Connectivity::Eight);

// Pixels of class `cls` that touch a different class through a 4-neighbor
// or sit on the image border.
EdgeSet class_edge(const LabelMap& map, ClassId cls);

// Pixels of the cluster with a 4-neighbor outside the cluster or outside
// the grid. For a one-pixel cluster this is the pixel itself.
EdgeSet cluster_boundary(const Cluster& cluster, const GridExtent& extent);

// Components of `cls` restricted to pixels whose centers lie inside the
// quad (boundary inclusive). Adjacency is evaluated on the clipped mask,
// so a cluster crossing the quad edge may split. Same ordering as
// connected_components.
std::vector<Cluster> clusters_in_region(const LabelMap& map, ClassId cls, const RoiQuad& quad,
                                        Connectivity connectivity = Connectivity::Eight);

} // namespace cvs
