#pragma once

#include "cvs/geometry.hpp"
#include "cvs/label_map.hpp"
#include "cvs/synth.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace test_util {

// Rigidly translates every placed shape. Speck placement samples absolute
// coordinates, so callers who need a pixel-exact translation should zero the
// specks first.
inline cvs::SceneSpec shift_scene_spec(cvs::SceneSpec s, int dx, int dy) {
    s.duct.center.x += dx;
    s.duct.center.y += dy;
    s.artery.center.x += dx;
    s.artery.center.y += dy;
    s.gallbladder.x0 += dx;
    s.gallbladder.x1 += dx;
    s.gallbladder.y0 += dy;
    s.gallbladder.y1 += dy;
    s.liver.x0 += dx;
    s.liver.x1 += dx;
    s.liver.y0 += dy;
    s.liver.y1 += dy;
    s.plate.anchor.x += dx;
    s.plate.anchor.y += dy;
    for (auto& blob : s.fat_blobs) {
        blob.center.x += dx;
        blob.center.y += dy;
    }
    return s;
}

// Builds a fused-palette map from rows of digit characters ('0'..'7').
inline cvs::LabelMap map_from_rows(const std::vector<std::string>& rows) {
    const int h = int(rows.size());
    const int w = int(rows.front().size());
    std::vector<std::uint8_t> px;
    px.reserve(std::size_t(w) * h);
    for (const std::string& row : rows)
        for (const char ch : row) px.push_back(std::uint8_t(ch - '0'));
    return cvs::LabelMap(w, h, std::move(px), cvs::ClassPalette::fused());
}

// Quad covering the whole pixel grid with half-pixel margins, so every
// pixel center is inside.
inline cvs::RoiQuad whole_image_quad(int width, int height) {
    return cvs::RoiQuad{{-0.5, -0.5},
                        {width - 0.5, -0.5},
                        {width - 0.5, height - 0.5},
                        {-0.5, height - 0.5}};
}

// Unique fresh directory under the system temp dir.
inline std::filesystem::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("cvs_test_" + tag + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace test_util
