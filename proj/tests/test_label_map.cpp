#include "cvs/error.hpp"
#include "cvs/label_map.hpp"
#include "cvs/synth.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <fstream>

using namespace cvs;

namespace {

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), std::streamsize(bytes.size()));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("palette factories pin the canonical class tables") {
    const ClassPalette s1 = ClassPalette::stream1();
    CHECK_EQ(s1.size(), 7);
    CHECK_EQ(*s1.id_of("cystic_duct"), cls::cystic_duct);
    CHECK_FALSE(s1.id_of("fat").has_value());

    const ClassPalette s2 = ClassPalette::stream2();
    CHECK(s2.id_of("fat").has_value());

    const ClassPalette fused = ClassPalette::fused();
    CHECK_EQ(fused.size(), 8);
    CHECK_EQ(*fused.id_of("fat"), cls::fat);
    CHECK(fused.contains(7));
    CHECK_FALSE(fused.contains(8));
}

TEST_CASE("constructing a map with a pixel outside its palette is rejected") {
    std::vector<std::uint8_t> px{0, 7, 0, 0};
    CHECK_THROWS_AS(LabelMap(2, 2, px, ClassPalette::stream1()), Error);
    try {
        LabelMap m(2, 2, px, ClassPalette::stream1());
    } catch (const Error& e) {
        CHECK_EQ(e.code(), Errc::InvariantViolation);
    }
    CHECK_NOTHROW(LabelMap(2, 2, px, ClassPalette::fused()));
}

TEST_CASE("side cap and dimension checks") {
    CHECK_THROWS_AS(LabelMap(0, 4, ClassPalette::fused()), Error);
    CHECK_THROWS_AS(LabelMap(kMaxMapSide + 1, 1, ClassPalette::fused()), Error);
    CHECK_THROWS_AS(LabelMap(2, 2, std::vector<std::uint8_t>(3, 0), ClassPalette::fused()),
                    Error);
}

TEST_CASE("loading a hand-written all-background PGM") {
    const auto dir = test_util::fresh_dir("pgm_load");
    const auto pgm = dir / "flat.pgm";
    write_file(pgm, std::string("P5\n2 2\n255\n") + std::string(4, '\0'));
    save_palette(ClassPalette::stream1(), dir / "flat.pgm.palette.json");

    const LabelMap m = load_label_map(pgm);
    CHECK_EQ(m.width(), 2);
    CHECK_EQ(m.height(), 2);
    CHECK_EQ(m.palette().tag(), StreamTag::Stream1);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) CHECK_EQ(m.at(x, y), cls::background);
}

TEST_CASE("load failure modes carry the expected error codes") {
    const auto dir = test_util::fresh_dir("pgm_errors");
    auto code_of = [](auto fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::InvariantViolation;
    };

    SUBCASE("missing file") {
        CHECK_EQ(code_of([&] { load_label_map(dir / "nope.pgm"); }), Errc::MissingFile);
    }
    SUBCASE("missing sidecar") {
        write_file(dir / "bare.pgm", std::string("P5\n1 1\n255\n") + '\0');
        CHECK_EQ(code_of([&] { load_label_map(dir / "bare.pgm"); }), Errc::MissingFile);
    }
    SUBCASE("wrong magic") {
        write_file(dir / "p4.pgm", std::string("P4\n1 1\n255\n") + '\0');
        save_palette(ClassPalette::stream1(), dir / "p4.pgm.palette.json");
        CHECK_EQ(code_of([&] { load_label_map(dir / "p4.pgm"); }), Errc::MalformedPgm);
    }
    SUBCASE("wrong maxval") {
        write_file(dir / "mv.pgm", std::string("P5\n1 1\n65535\n") + '\0');
        save_palette(ClassPalette::stream1(), dir / "mv.pgm.palette.json");
        CHECK_EQ(code_of([&] { load_label_map(dir / "mv.pgm"); }), Errc::MalformedPgm);
    }
    SUBCASE("short payload") {
        write_file(dir / "short.pgm", std::string("P5\n2 2\n255\n") + std::string(3, '\0'));
        save_palette(ClassPalette::stream1(), dir / "short.pgm.palette.json");
        CHECK_EQ(code_of([&] { load_label_map(dir / "short.pgm"); }), Errc::MalformedPgm);
    }
    SUBCASE("trailing bytes") {
        write_file(dir / "long.pgm", std::string("P5\n1 1\n255\n") + std::string(2, '\0'));
        save_palette(ClassPalette::stream1(), dir / "long.pgm.palette.json");
        CHECK_EQ(code_of([&] { load_label_map(dir / "long.pgm"); }), Errc::MalformedPgm);
    }
    SUBCASE("pixel value outside the palette") {
        write_file(dir / "bad.pgm", std::string("P5\n1 1\n255\n") + char(9));
        save_palette(ClassPalette::stream1(), dir / "bad.pgm.palette.json");
        CHECK_EQ(code_of([&] { load_label_map(dir / "bad.pgm"); }), Errc::UnknownClassId);
    }
}

TEST_CASE("save/load round-trips random maps bit-exactly") {
    const auto dir = test_util::fresh_dir("roundtrip");
    Lcg64 rng(2024);
    for (int trial = 0; trial < 5; ++trial) {
        const int w = rng.uniform(1, 40);
        const int h = rng.uniform(1, 40);
        std::vector<std::uint8_t> px(std::size_t(w) * h);
        for (auto& p : px) p = std::uint8_t(rng.uniform(0, 7));
        const LabelMap original(w, h, px, ClassPalette::fused());

        const auto path = dir / ("map" + std::to_string(trial) + ".pgm");
        save_label_map(original, path);
        const LabelMap loaded = load_label_map(path);

        CHECK_EQ(loaded.width(), w);
        CHECK_EQ(loaded.height(), h);
        CHECK(loaded.palette() == original.palette());
        CHECK(std::equal(loaded.data().begin(), loaded.data().end(),
                         original.data().begin()));

        // Determinism at the byte level as well.
        const auto again = dir / "again.pgm";
        save_label_map(original, again);
        CHECK_EQ(read_file(path), read_file(again));
        CHECK_EQ(read_file(path.string() + ".palette.json"),
                 read_file(again.string() + ".palette.json"));
    }
}

TEST_CASE("class_mask basics and the partition property") {
    const LabelMap flat(3, 2, ClassPalette::fused());
    CHECK_EQ(class_mask(flat, cls::background).count(), 6);
    CHECK_EQ(class_mask(flat, cls::liver).count(), 0);
    CHECK_THROWS_AS(class_mask(flat, 8), Error);

    const LabelMap strip = test_util::map_from_rows({"474"});
    const BinaryMask fat_mask = class_mask(strip, cls::fat);
    CHECK_EQ(fat_mask.at(0, 0), 0);
    CHECK_EQ(fat_mask.at(1, 0), 1);
    CHECK_EQ(fat_mask.at(2, 0), 0);

    Lcg64 rng(11);
    std::vector<std::uint8_t> px(25 * 17);
    for (auto& p : px) p = std::uint8_t(rng.uniform(0, 7));
    const LabelMap random_map(25, 17, px, ClassPalette::fused());
    std::size_t total = 0;
    for (const auto& entry : random_map.palette().entries())
        total += class_mask(random_map, entry.id).count();
    CHECK_EQ(total, 25u * 17u);
}
