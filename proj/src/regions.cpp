#include "cvs/regions.hpp"

#include "cvs/error.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_set>

namespace cvs {

namespace {

// Offsets for the two neighborhood models; the first four entries are the
// 4-neighborhood.
constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

Cluster finish_cluster(ClassId cls, std::vector<PixelCoord> pixels) {
    Cluster c;
    c.cls = cls;
    c.pixels = std::move(pixels);
    std::sort(c.pixels.begin(), c.pixels.end(),
              [](const PixelCoord& a, const PixelCoord& b) { return yx_less(a, b); });
    c.bbox = {c.pixels.front().x, c.pixels.front().y, c.pixels.front().x, c.pixels.front().y};
    double sx = 0.0;
    double sy = 0.0;
    for (const PixelCoord& p : c.pixels) {
        c.bbox.xmin = std::min(c.bbox.xmin, p.x);
        c.bbox.xmax = std::max(c.bbox.xmax, p.x);
        c.bbox.ymin = std::min(c.bbox.ymin, p.y);
        c.bbox.ymax = std::max(c.bbox.ymax, p.y);
        sx += p.x;
        sy += p.y;
    }
    const double n = static_cast<double>(c.pixels.size());
    c.centroid = {sx / n, sy / n};
    return c;
}

void order_clusters(std::vector<Cluster>& clusters) {
    std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        if (a.bbox.ymin != b.bbox.ymin) return a.bbox.ymin < b.bbox.ymin;
        return a.bbox.xmin < b.bbox.xmin;
    });
}

// Labels the true pixels of `mask` (row-major, width*height) into components.
std::vector<Cluster> label_mask(const std::vector<std::uint8_t>& mask, int width, int height,
                                ClassId cls, Connectivity connectivity) {
    const int neighbor_count = connectivity == Connectivity::Four ? 4 : 8;
    std::vector<std::uint8_t> visited(mask.size(), 0);
    std::vector<Cluster> clusters;
    std::vector<PixelCoord> stack;
    std::vector<PixelCoord> members;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * width + x;
            if (!mask[idx] || visited[idx]) continue;
            visited[idx] = 1;
            stack.clear();
            members.clear();
            stack.push_back({x, y});
            while (!stack.empty()) {
                const PixelCoord p = stack.back();
                stack.pop_back();
                members.push_back(p);
                for (int k = 0; k < neighbor_count; ++k) {
                    const int nx = p.x + kDx[k];
                    const int ny = p.y + kDy[k];
                    if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
                    const std::size_t nidx = static_cast<std::size_t>(ny) * width + nx;
                    if (!mask[nidx] || visited[nidx]) continue;
                    visited[nidx] = 1;
                    stack.push_back({nx, ny});
                }
            }
            clusters.push_back(finish_cluster(cls, members));
        }
    }
    order_clusters(clusters);
    return clusters;
}

std::vector<std::uint8_t> class_pixels(const LabelMap& map, ClassId cls) {
    std::vector<std::uint8_t> mask(map.data().size(), 0);
    const auto data = map.data();
    for (std::size_t i = 0; i < data.size(); ++i) mask[i] = data[i] == cls ? 1 : 0;
    return mask;
}

} // namespace

std::vector<Cluster> connected_components(const LabelMap& map, ClassId cls,
                                          Connectivity connectivity) {
    if (!map.palette().contains(cls)) {
        fail(Errc::UnknownClassId,
             "connected_components: class id " + std::to_string(int(cls)) +
                 " not in palette " + stream_tag_name(map.palette().tag()));
    }
    return label_mask(class_pixels(map, cls), map.width(), map.height(), cls, connectivity);
}

std::optional<Cluster> largest_cluster(const LabelMap& map, ClassId cls,
                                       Connectivity connectivity) {
    auto clusters = connected_components(map, cls, connectivity);
    if (clusters.empty()) return std::nullopt;
    return std::move(clusters.front());
}

EdgeSet class_edge(const LabelMap& map, ClassId cls) {
    if (!map.palette().contains(cls)) {
        fail(Errc::UnknownClassId, "class_edge: class id " + std::to_string(int(cls)) +
                                       " not in palette " + stream_tag_name(map.palette().tag()));
    }
    EdgeSet edge;
    const int w = map.width();
    const int h = map.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (map.at(x, y) != cls) continue;
            bool on_edge = x == 0 || x == w - 1 || y == 0 || y == h - 1;
            for (int k = 0; !on_edge && k < 4; ++k) {
                if (map.at(x + kDx[k], y + kDy[k]) != cls) on_edge = true;
            }
            if (on_edge) edge.push_back({x, y});
        }
    }
    return edge;
}

EdgeSet cluster_boundary(const Cluster& cluster, const GridExtent& extent) {
    std::unordered_set<long long> members;
    members.reserve(cluster.pixels.size() * 2);
    const auto key = [](int x, int y) {
        return (static_cast<long long>(y) << 32) ^ static_cast<unsigned int>(x);
    };
    for (const PixelCoord& p : cluster.pixels) members.insert(key(p.x, p.y));
    EdgeSet boundary;
    for (const PixelCoord& p : cluster.pixels) {
        bool on_edge = false;
        for (int k = 0; !on_edge && k < 4; ++k) {
            const int nx = p.x + kDx[k];
            const int ny = p.y + kDy[k];
            if (!extent.contains({nx, ny}) || !members.count(key(nx, ny))) on_edge = true;
        }
        if (on_edge) boundary.push_back(p);
    }
    return boundary;
}

std::vector<Cluster> clusters_in_region(const LabelMap& map, ClassId cls, const RoiQuad& quad,
                                        Connectivity connectivity) {
    if (!map.palette().contains(cls)) {
        fail(Errc::UnknownClassId,
             "clusters_in_region: class id " + std::to_string(int(cls)) + " not in palette " +
                 stream_tag_name(map.palette().tag()));
    }
    std::vector<std::uint8_t> mask(map.data().size(), 0);
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            if (map.at(x, y) != cls) continue;
            if (point_in_quad(quad, {double(x), double(y)}))
                mask[static_cast<std::size_t>(y) * map.width() + x] = 1;
        }
    }
    return label_mask(mask, map.width(), map.height(), cls, connectivity);
}

} // namespace cvs
