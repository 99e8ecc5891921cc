#include "cvs/synth.hpp"

#include "cvs/error.hpp"
#include "cvs/regions.hpp"
#include "cvs/roi.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace cvs {

std::uint32_t Lcg64::next() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<std::uint32_t>(state_ >> 33);
}

int Lcg64::uniform(int lo, int hi) {
    // Ranges here are tiny against the 31-bit output, so modulo bias is
    // far below anything observable.
    return lo + int(next() % std::uint32_t(hi - lo + 1));
}

double Lcg64::unit() { return next() / double(1u << 31); }

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t kSpeckSalt = 0x53504b53;   // stream for speck placement
constexpr std::uint64_t kCanonSalt = 0x43414e4f;   // stream for canonical jitter

struct Canvas {
    int width = 0;
    int height = 0;
    std::vector<ClassId> px;

    ClassId at(int x, int y) const { return px[std::size_t(y) * width + x]; }
    void set(int x, int y, ClassId c) { px[std::size_t(y) * width + x] = c; }
    bool contains(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

struct RectBounds {
    int x0, y0, x1, y1;  // inclusive; empty when x1 < x0 or y1 < y0
};

// Inclusive pixel bounds of an axis-aligned oriented rect (angle 0 or 90).
RectBounds axis_rect_bounds(const OrientedRectSpec& r) {
    const double half_len = (r.length - 1.0) / 2.0 + 0.25;
    const double half_th = (r.thickness - 1.0) / 2.0 + 0.25;
    const bool vertical = r.angle_deg == 90.0;
    const double hx = vertical ? half_th : half_len;
    const double hy = vertical ? half_len : half_th;
    return {int(std::ceil(r.center.x - hx)), int(std::ceil(r.center.y - hy)),
            int(std::floor(r.center.x + hx)), int(std::floor(r.center.y + hy))};
}

std::vector<PixelCoord> oriented_rect_pixels(const OrientedRectSpec& r) {
    std::vector<PixelCoord> out;
    if (r.length <= 0.0 || r.thickness <= 0.0) return out;
    const double rad = r.angle_deg * std::acos(-1.0) / 180.0;
    const Vec2 u{std::cos(rad), std::sin(rad)};
    const double half_len = (r.length - 1.0) / 2.0 + 0.25;
    const double half_th = (r.thickness - 1.0) / 2.0 + 0.25;
    const double reach = half_len + half_th + 1.0;
    const int x0 = int(std::floor(r.center.x - reach));
    const int x1 = int(std::ceil(r.center.x + reach));
    const int y0 = int(std::floor(r.center.y - reach));
    const int y1 = int(std::ceil(r.center.y + reach));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const Vec2 d{x - r.center.x, y - r.center.y};
            const double along = dot(d, u);
            const double perp = cross(u, d);
            if (std::abs(along) <= half_len && std::abs(perp) <= half_th)
                out.push_back({x, y});
        }
    }
    return out;
}

[[noreturn]] void bad_spec(const std::string& what) { fail(Errc::InvalidSpec, what); }

void check_band(const BandSpec& b, const Canvas& canvas, const char* name) {
    if (b.empty()) bad_spec(std::string(name) + " band is empty");
    if (b.x0 < 0 || b.y0 < 0 || b.x1 >= canvas.width || b.y1 >= canvas.height)
        bad_spec(std::string(name) + " band exceeds the canvas");
}

void draw_band(Canvas& canvas, const BandSpec& b, ClassId cls) {
    for (int y = b.y0; y <= b.y1; ++y)
        for (int x = b.x0; x <= b.x1; ++x) canvas.set(x, y, cls);
}

int blob_width(int size) { return int(std::ceil(std::sqrt(double(size)))); }
int blob_rows(int size) { return (size + blob_width(size) - 1) / blob_width(size); }

void draw_blob(Canvas& canvas, const BlobSpec& blob, ClassId cls) {
    const int w = blob_width(blob.size);
    for (int i = 0; i < blob.size; ++i)
        canvas.set(blob.anchor.x + i % w, blob.anchor.y + i / w, cls);
}

void draw_disk(Canvas& canvas, const FatBlobSpec& blob, ClassId cls) {
    const long long r2 = (long long)blob.radius * blob.radius;
    for (int y = blob.center.y - blob.radius; y <= blob.center.y + blob.radius; ++y) {
        for (int x = blob.center.x - blob.radius; x <= blob.center.x + blob.radius; ++x) {
            const long long dx = x - blob.center.x;
            const long long dy = y - blob.center.y;
            if (dx * dx + dy * dy <= r2) canvas.set(x, y, cls);
        }
    }
}

// Specks only ever occupy background pixels whose whole 8-neighbourhood is
// background, so even under 8-connectivity they can neither merge with a
// structure of the same class (or each other) nor alter any structure's
// pixel or edge sets.
void place_specks(Canvas& canvas, const SpeckSpec& spec, Lcg64& rng) {
    static constexpr PixelCoord kOffsets[4] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (int s = 0; s < spec.count; ++s) {
        const int size = rng.uniform(1, spec.max_size);
        const ClassId cls = rng.uniform(0, 1) ? cls::cystic_duct : cls::cystic_artery;
        for (int attempt = 0; attempt < 30; ++attempt) {
            const int ax = rng.uniform(0, canvas.width - 2);
            const int ay = rng.uniform(0, canvas.height - 2);
            bool ok = true;
            for (int i = 0; ok && i < size; ++i) {
                const int x = ax + kOffsets[i].x;
                const int y = ay + kOffsets[i].y;
                if (canvas.at(x, y) != cls::background) ok = false;
                static constexpr int nx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
                static constexpr int ny[8] = {0, 0, 1, -1, 1, -1, 1, -1};
                for (int k = 0; ok && k < 8; ++k) {
                    const int qx = x + nx[k];
                    const int qy = y + ny[k];
                    if (!canvas.contains(qx, qy)) continue;
                    bool is_candidate = false;
                    for (int j = 0; j < size; ++j) {
                        if (qx == ax + kOffsets[j].x && qy == ay + kOffsets[j].y)
                            is_candidate = true;
                    }
                    if (!is_candidate && canvas.at(qx, qy) != cls::background) ok = false;
                }
            }
            if (!ok) continue;
            for (int i = 0; i < size; ++i)
                canvas.set(ax + kOffsets[i].x, ay + kOffsets[i].y, cls);
            break;
        }
    }
}

std::vector<Vec2> pixel_centers(const EdgeSet& pixels) {
    std::vector<Vec2> out;
    out.reserve(pixels.size());
    for (const PixelCoord& p : pixels) out.push_back({double(p.x), double(p.y)});
    return out;
}

} // namespace

Scene generate_scene(const SceneSpec& spec) {
    if (spec.width < 16 || spec.height < 16 || spec.width > kMaxMapSide ||
        spec.height > kMaxMapSide) {
        bad_spec("canvas size out of range");
    }
    Canvas canvas{spec.width, spec.height,
                  std::vector<ClassId>(std::size_t(spec.width) * spec.height,
                                       cls::background)};

    check_band(spec.gallbladder, canvas, "gallbladder");
    check_band(spec.liver, canvas, "liver");

    if (spec.duct.angle_deg != 90.0) bad_spec("duct must be vertical (angle 90)");
    if (spec.duct.length < 2.0 || spec.duct.thickness < 1.0) bad_spec("duct too small");
    const RectBounds duct_b = axis_rect_bounds(spec.duct);
    if (duct_b.x0 < 0 || duct_b.y0 < 0 || duct_b.x1 >= spec.width || duct_b.y1 >= spec.height ||
        duct_b.x1 < duct_b.x0 || duct_b.y1 < duct_b.y0) {
        bad_spec("duct exceeds the canvas");
    }
    if (duct_b.y0 != spec.gallbladder.y1 + 1)
        bad_spec("duct top row must touch the gallbladder band's bottom row");
    if (duct_b.x0 < spec.gallbladder.x0 || duct_b.x1 > spec.gallbladder.x1)
        bad_spec("duct columns must lie under the gallbladder band");

    const std::vector<PixelCoord> duct_pixels = oriented_rect_pixels(spec.duct);
    std::vector<PixelCoord> artery_pixels;
    if (spec.artery.length > 0.0) {
        if (spec.artery.thickness < 1.0) bad_spec("artery thickness must be >= 1");
        artery_pixels = oriented_rect_pixels(spec.artery);
        for (const PixelCoord& p : artery_pixels) {
            if (!canvas.contains(p.x, p.y)) bad_spec("artery exceeds the canvas");
        }
        // The artery is painted after the duct; overlap would eat duct
        // pixels and silently invalidate the closed-form A/B vertices.
        for (const PixelCoord& p : duct_pixels) {
            if (std::find(artery_pixels.begin(), artery_pixels.end(), p) !=
                artery_pixels.end()) {
                bad_spec("artery must not overlap the duct");
            }
        }
    }

    if (spec.plate.size < 0) bad_spec("plate size must be >= 0");
    if (spec.plate.size > 0) {
        const int pw = blob_width(spec.plate.size);
        const int pr = blob_rows(spec.plate.size);
        if (spec.plate.anchor.x < 0 || spec.plate.anchor.y < 0 ||
            spec.plate.anchor.x + pw > spec.width || spec.plate.anchor.y + pr > spec.height) {
            bad_spec("plate exceeds the canvas");
        }
    }
    for (const FatBlobSpec& blob : spec.fat_blobs) {
        if (blob.radius < 1) bad_spec("fat blob radius must be >= 1");
        if (blob.center.x - blob.radius < 0 || blob.center.y - blob.radius < 0 ||
            blob.center.x + blob.radius >= spec.width ||
            blob.center.y + blob.radius >= spec.height) {
            bad_spec("fat blob exceeds the canvas");
        }
    }
    if (spec.specks.count < 0 || spec.specks.count > 256) bad_spec("speck count out of range");
    if (spec.specks.count > 0 && (spec.specks.max_size < 1 || spec.specks.max_size > 4))
        bad_spec("speck max_size must be in [1, 4]");

    // Paint order: anything later wins the pixel.
    draw_band(canvas, spec.liver, cls::liver);
    draw_band(canvas, spec.gallbladder, cls::gallbladder);
    if (spec.plate.size > 0) draw_blob(canvas, spec.plate, cls::cystic_plate);
    for (const FatBlobSpec& blob : spec.fat_blobs) draw_disk(canvas, blob, cls::fat);
    for (const PixelCoord& p : duct_pixels) canvas.set(p.x, p.y, cls::cystic_duct);
    for (const PixelCoord& p : artery_pixels) canvas.set(p.x, p.y, cls::cystic_artery);
    if (spec.specks.count > 0) {
        Lcg64 rng(mix_seed(spec.seed, kSpeckSalt));
        place_specks(canvas, spec.specks, rng);
    }

    LabelMap map(spec.width, spec.height, std::move(canvas.px), ClassPalette::fused());
    const GridExtent extent{spec.width, spec.height};

    // Reference vertices. A and B are closed-form: the duct is a pristine
    // axis-aligned rectangle, so its major axis is the column through
    // round(centroid.x) and the axis-outline samples sit at the top/bottom
    // rows; A then folds in the contact pixel one row above.
    const int dxcol = int(std::lround((duct_b.x0 + duct_b.x1) / 2.0));
    const Vec2 a{double(dxcol), duct_b.y0 - 0.5};
    const Vec2 b{double(dxcol), double(duct_b.y1)};

    const Vec2 toward_a = a - b;
    const Vec2 start_dir = toward_a * (1.0 / norm(toward_a));
    const RoiConfig ray_cfg; // defaults shared with estimate_roi
    std::optional<RayHit> hit;
    if (const auto fat = largest_cluster(map, cls::fat)) {
        hit = rotate_ray_to_target(b, start_dir, cluster_boundary(*fat, extent), extent,
                                   ray_cfg.max_sweep_deg, ray_cfg.step_deg);
    }
    if (!hit) {
        hit = rotate_ray_to_target(b, start_dir, class_edge(map, cls::liver), extent,
                                   ray_cfg.max_sweep_deg, ray_cfg.step_deg);
    }
    if (!hit) bad_spec("reference ray sweep found neither fat nor liver");
    const Vec2 c = hit->point;

    const EdgeSet gb_edge = class_edge(map, cls::gallbladder);
    const EdgeSet liver_edge = class_edge(map, cls::liver);
    if (gb_edge.empty()) bad_spec("gallbladder missing from the rendered scene");
    if (liver_edge.empty()) bad_spec("liver missing from the rendered scene");
    const auto pair = nearest_pair(pixel_centers(gb_edge), pixel_centers(liver_edge));
    const Vec2 d = (pair.a + pair.b) * 0.5;

    const RoiQuad quad = make_roi_quad(a, b, c, d);
    if (quad_area(quad) < 1e-9) bad_spec("reference quad is degenerate");

    const CvsAssessment assessment = assess_with_quad(map, quad);
    const SceneTruth truth{assessment.c1, assessment.c2, assessment.c3, assessment.cvs};
    return Scene{std::move(map), truth, quad};
}

SceneSpec canonical_scene_spec(std::uint64_t seed, bool c1, bool c2, bool c3, bool with_fat) {
    if (!c1 && !with_fat) {
        fail(Errc::InvalidArgument,
             "canonical_scene_spec: a c1-violating scene needs the main fat blob");
    }
    Lcg64 rng(mix_seed(seed, kCanonSalt));
    SceneSpec spec;
    spec.seed = mix_seed(seed, kSpeckSalt + 1);

    const int ya = 38 + rng.uniform(0, 8);
    const int yb = ya + 29 + rng.uniform(0, 8);
    const int gx1 = 46 + rng.uniform(0, 12);
    const int gx2 = 198 + rng.uniform(0, 14);
    spec.gallbladder = {gx1, ya, gx2, yb};

    const int w = 3 + rng.uniform(0, 2);
    const int dx1 = 110 + rng.uniform(0, 16);
    const int dx2 = dx1 + w - 1;
    const int len = 30 + rng.uniform(0, 14);
    spec.duct = {{dx1 + (w - 1) / 2.0, yb + (len + 1) / 2.0}, double(len), double(w), 90.0};

    if (c3) {
        const int ax1 = dx2 + 4 + rng.uniform(0, 3);
        const int aw = 2 + rng.uniform(0, 1);
        const int ay1 = yb + 3 + rng.uniform(0, 2);
        const int alen = len - 6 - rng.uniform(0, 4);
        spec.artery = {{ax1 + (aw - 1) / 2.0, ay1 + (alen - 1) / 2.0}, double(alen), double(aw),
                       90.0};
    } else if (rng.uniform(0, 1)) {
        // Present but far left of the region, so it never counts.
        const int ax1 = 18 + rng.uniform(0, 6);
        spec.artery = {{ax1 + 1.0, yb + 10 + 9.5}, 20.0, 3.0, 90.0};
    }

    bool plate_out = false;
    int plate_size = 0;
    if (c2) {
        plate_size = 160 + rng.uniform(0, 200);
    } else if (rng.uniform(0, 1)) {
        plate_size = 40 + rng.uniform(0, 60); // at most the threshold, never above
    } else {
        plate_out = true;
        plate_size = 160 + rng.uniform(0, 80);
    }
    if (plate_out) {
        spec.plate = {plate_size, {16 + rng.uniform(0, 8), yb + 40 + rng.uniform(0, 6)}};
    } else {
        spec.plate = {plate_size, {dx2 + 11 + rng.uniform(0, 3), yb + 12 + rng.uniform(0, 3)}};
    }

    const int gap = 2 + rng.uniform(0, 2);
    const int lx1 = dx2 + 35 + rng.uniform(0, 3);
    spec.liver = {lx1, yb + 1 + gap, 226 + rng.uniform(0, 8), 178 + rng.uniform(0, 12)};

    if (with_fat) {
        spec.fat_blobs.push_back(
            {{192 + rng.uniform(0, 12), 158 + rng.uniform(0, 16)}, 11 + rng.uniform(0, 2),
             false});
    }
    spec.specks = {rng.uniform(0, 5), 1 + rng.uniform(0, 3)};

    if (!c1) {
        // Drop a small fat blob strictly inside the region. The probe render
        // supplies the quad; adding a blob smaller than the main one on
        // background pixels cannot change that quad.
        const Scene probe = generate_scene(spec);
        const int rin = 4 + rng.uniform(0, 2);
        const int wy = yb + 33 + rin + 2; // below any in-region plate rows
        for (int attempt = 0; attempt < 40; ++attempt) {
            const int cx = dx2 + 15 + rng.uniform(0, 15);
            const int cy = wy + rng.uniform(0, 12);
            bool ok = true;
            for (int y = cy - rin; ok && y <= cy + rin; ++y) {
                for (int x = cx - rin; ok && x <= cx + rin; ++x) {
                    const long long ddx = x - cx;
                    const long long ddy = y - cy;
                    if (ddx * ddx + ddy * ddy > (long long)rin * rin) continue;
                    if (x < 0 || y < 0 || x >= spec.width || y >= spec.height ||
                        probe.map.at(x, y) != cls::background ||
                        !point_in_quad(probe.reference_quad, {double(x), double(y)})) {
                        ok = false;
                    }
                }
            }
            if (ok) {
                spec.fat_blobs.push_back({{cx, cy}, rin, true});
                break;
            }
        }
        // If no spot was found the rendered labels will disagree with the
        // intent and the caller's retry loop re-jitters the whole scene.
    }
    return spec;
}

Scene generate_canonical_scene(std::uint64_t seed, bool c1, bool c2, bool c3, bool with_fat) {
    return generate_scene(canonical_scene_spec(seed, c1, c2, c3, with_fat));
}

std::vector<CorpusEntry> generate_corpus(const CorpusParams& params,
                                         const std::filesystem::path& out_dir) {
    if (params.n < 1) fail(Errc::InvalidArgument, "generate_corpus: n must be >= 1");
    if (!(params.positive_fraction >= 0.0 && params.positive_fraction <= 1.0))
        fail(Errc::InvalidArgument, "generate_corpus: positive_fraction must be in [0, 1]");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(Errc::IoFailure, "cannot create directory " + out_dir.string());

    // Intended (c1, c2, c3) per negative frame, cycled for variety.
    static constexpr bool kNegativeFamilies[7][3] = {
        {false, true, true},  {true, false, true},  {true, true, false},
        {false, false, true}, {false, true, false}, {true, false, false},
        {false, false, false},
    };

    const long long n = params.n;
    const long long k = std::llround(params.positive_fraction * double(n));
    std::vector<CorpusEntry> entries;
    entries.reserve(params.n);
    int negatives_seen = 0;
    for (long long i = 0; i < n; ++i) {
        const bool positive = (i + 1) * k / n > i * k / n;
        bool want_c1 = true;
        bool want_c2 = true;
        bool want_c3 = true;
        if (!positive) {
            const auto& fam = kNegativeFamilies[negatives_seen++ % 7];
            want_c1 = fam[0];
            want_c2 = fam[1];
            want_c3 = fam[2];
        }
        const SceneTruth intended{want_c1, want_c2, want_c3,
                                  want_c1 && want_c2 && want_c3};

        std::optional<Scene> scene;
        const std::uint64_t frame_seed = mix_seed(params.base_seed, std::uint64_t(i));
        for (int attempt = 0; attempt < 64 && !scene; ++attempt) {
            Scene candidate = generate_canonical_scene(mix_seed(frame_seed, attempt), want_c1,
                                                       want_c2, want_c3);
            if (candidate.truth == intended) scene = std::move(candidate);
        }
        if (!scene) {
            fail(Errc::InvariantViolation,
                 "generate_corpus: frame " + std::to_string(i) +
                     " never rendered its intended labels");
        }

        char stem[32];
        std::snprintf(stem, sizeof stem, "frame_%05lld", i);
        save_label_map(scene->map, out_dir / (std::string(stem) + ".pgm"));

        nlohmann::json j;
        j["c1"] = scene->truth.c1;
        j["c2"] = scene->truth.c2;
        j["c3"] = scene->truth.c3;
        j["cvs"] = scene->truth.cvs;
        const auto q = scene->reference_quad.vertices();
        nlohmann::json quad = nlohmann::json::array();
        for (const Vec2& v : q) quad.push_back(nlohmann::json::array({v.x, v.y}));
        j["quad"] = quad;
        const auto truth_path = out_dir / (std::string(stem) + ".truth.json");
        std::ofstream out(truth_path);
        if (!out) fail(Errc::IoFailure, "cannot write " + truth_path.string());
        out << j.dump() << "\n";
        if (!out) fail(Errc::IoFailure, "write failed for " + truth_path.string());

        entries.push_back({stem, scene->truth});
    }
    return entries;
}

} // namespace cvs
