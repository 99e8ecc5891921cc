#pragma once

#include "cvs/geometry.hpp"
#include "cvs/label_map.hpp"
#include "cvs/rules.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cvs {

// 64-bit linear congruential generator, constants from Knuth's MMIX:
//   state' = state * 6364136223846793005 + 1442695040888963407
// with the top 31 bits as output. Pinned here (instead of a std engine) so
// corpora reproduce bit-exactly across platforms and languages.
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint32_t next();
    // Uniform integer in [lo, hi], inclusive.
    int uniform(int lo, int hi);
    // Uniform real in [0, 1).
    double unit();

private:
    std::uint64_t state_;
};

// SplitMix64 finalizer over base + salt; decorrelates per-frame streams
// derived from one base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

// Rectangle centred at `center`, `length` along the axis at `angle_deg`
// (0 = +x, 90 = +y/down), `thickness` across it. A pixel belongs when its
// centre is within (extent-1)/2 + 0.25 of the centre along each axis, so
// integer-aligned specs rasterize to exact pixel counts. length <= 0 means
// the shape is absent.
struct OrientedRectSpec {
    Vec2 center;
    double length = 0.0;
    double thickness = 0.0;
    double angle_deg = 0.0;
};

// Axis-aligned inclusive pixel rectangle.
struct BandSpec {
    int x0 = 0;
    int y0 = 0;
    int x1 = -1;
    int y1 = -1;

    bool empty() const { return x1 < x0 || y1 < y0; }
};

// Exactly `size` pixels filled row-major from `anchor` in rows of
// ceil(sqrt(size)); the last row may be partial. size <= 0 means absent.
struct BlobSpec {
    int size = 0;
    PixelCoord anchor;
};

struct FatBlobSpec {
    PixelCoord center;
    int radius = 0;
    // Intent marker used by corpus construction; not validated against the
    // rendered geometry.
    bool inside_roi = false;
};

// Background-only noise: up to `count` specks of 1..max_size pixels, drawn
// as cystic-duct or cystic-artery, never adjacent to any non-background
// pixel (so they cannot merge with or reshape real structures). max_size is
// capped at 4 to stay below the default rule noise floor.
struct SpeckSpec {
    int count = 0;
    int max_size = 0;
};

struct SceneSpec {
    std::uint64_t seed = 0;
    int width = 256;
    int height = 256;
    OrientedRectSpec duct;    // vertical (angle 90), top row touching the gallbladder band
    OrientedRectSpec artery;
    BandSpec gallbladder;
    BandSpec liver;
    BlobSpec plate;
    std::vector<FatBlobSpec> fat_blobs;
    SpeckSpec specks;
};

struct SceneTruth {
    bool c1 = false;
    bool c2 = false;
    bool c3 = false;
    bool cvs = false;

    bool operator==(const SceneTruth& o) const {
        return c1 == o.c1 && c2 == o.c2 && c3 == o.c3 && cvs == o.cvs;
    }
};

struct Scene {
    LabelMap map;
    SceneTruth truth;
    RoiQuad reference_quad;
};

// Rasterizes the spec back-to-front (liver, gallbladder, plate, fat, duct,
// artery, specks) over background and derives:
//  - the reference quad: A/B in closed form from the duct rectangle, C by
//    the clockwise ray sweep against the rendered largest fat cluster's
//    boundary (liver edge fallback), D from the closest rendered
//    gallbladder-edge/liver-edge pair — i.e. the defining constructions
//    evaluated on exactly known shapes;
//  - the truth labels, by evaluating the assessment rules against the
//    reference quad with default thresholds (so truth and rules agree by
//    construction).
// Throws InvalidSpec for out-of-bounds or inconsistent shapes, including
// later shapes that would overwrite the duct.
Scene generate_scene(const SceneSpec& spec);

// Jittered spec from the canonical scene family: horizontal gallbladder
// band, vertical duct hanging from it, artery strip and exact-size plate
// block right of the duct, liver band further right, and (optionally) a
// large fat blob below-right that the C-ray targets. The c1/c2/c3 flags
// steer shape placement toward those intended outcomes (c1=false adds a
// small fat blob inside the quad, found by searching a rendered probe
// scene); the returned spec's actual labels still come from
// generate_scene's recount. !c1 requires with_fat.
SceneSpec canonical_scene_spec(std::uint64_t seed, bool c1, bool c2, bool c3,
                               bool with_fat = true);

Scene generate_canonical_scene(std::uint64_t seed, bool c1, bool c2, bool c3,
                               bool with_fat = true);

struct CorpusParams {
    int n = 0;
    std::uint64_t base_seed = 0;
    double positive_fraction = 0.25;
};

struct CorpusEntry {
    std::string stem;
    SceneTruth truth;
};

// Writes n frames (frame_00000.pgm + palette sidecar + frame_00000.truth.json
// holding {"c1","c2","c3","cvs","quad"}) into out_dir. lround(fraction * n)
// frames are CVS-positive, spread evenly; negatives cycle through the seven
// criterion-failure combinations. Each frame retries jittered placements
// until its rendered labels match the intended ones, so the directory is a
// labelled corpus, deterministic in base_seed.
std::vector<CorpusEntry> generate_corpus(const CorpusParams& params,
                                         const std::filesystem::path& out_dir);

} // namespace cvs
