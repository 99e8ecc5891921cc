#include "cvs/error.hpp"
#include "cvs/regions.hpp"
#include "cvs/synth.hpp"

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cvs;
using test_util::map_from_rows;

TEST_CASE("single pixel forms a size-1 cluster with exact stats") {
    const LabelMap m = map_from_rows({"000", "040", "000"});
    const auto comps = connected_components(m, cls::liver);
    REQUIRE_EQ(comps.size(), 1);
    CHECK_EQ(comps[0].size(), 1);
    CHECK_EQ(comps[0].pixels[0], PixelCoord{1, 1});
    CHECK_EQ(comps[0].centroid.x, 1.0);
    CHECK_EQ(comps[0].centroid.y, 1.0);
    CHECK_EQ(comps[0].bbox.xmin, 1);
    CHECK_EQ(comps[0].bbox.ymax, 1);
}

TEST_CASE("diagonal pixels split under 4-connectivity and join under 8") {
    const LabelMap m = map_from_rows({"40", "04"});
    CHECK_EQ(connected_components(m, cls::liver, Connectivity::Four).size(), 2);
    const auto eight = connected_components(m, cls::liver, Connectivity::Eight);
    REQUIRE_EQ(eight.size(), 1);
    CHECK_EQ(eight[0].size(), 2);
}

TEST_CASE("empty class yields no clusters and no largest") {
    const LabelMap m(4, 4, ClassPalette::fused());
    CHECK(connected_components(m, cls::fat).empty());
    CHECK_FALSE(largest_cluster(m, cls::fat).has_value());
    CHECK_THROWS_AS(connected_components(m, 9), Error);  // UnknownClassId
}

TEST_CASE("largest_cluster picks size first, then bbox position") {
    const LabelMap m = map_from_rows({
        "44400044",
        "44400044",
        "00000000",
    });
    const auto big = largest_cluster(m, cls::liver);
    REQUIRE(big.has_value());
    CHECK_EQ(big->size(), 6);
    CHECK_EQ(big->bbox.xmin, 0);

    // Tie on size: the cluster whose bbox starts higher/lefter wins.
    const LabelMap tie = map_from_rows({
        "00044",
        "44044",
        "44000",
    });
    const auto comps = connected_components(tie, cls::liver, Connectivity::Four);
    REQUIRE_EQ(comps.size(), 2);
    CHECK_EQ(comps[0].size(), comps[1].size());
    CHECK_EQ(comps[0].bbox.ymin, 0);
    CHECK_EQ(comps[0].bbox.xmin, 3);
}

TEST_CASE("class_edge matches the 4-neighbor dissimilarity definition") {
    const LabelMap block = map_from_rows({
        "00000",
        "04440",
        "04440",
        "04440",
        "00000",
    });
    const EdgeSet edge = class_edge(block, cls::liver);
    CHECK_EQ(edge.size(), 8);  // all but the center pixel
    for (const PixelCoord& p : edge) CHECK_FALSE((p.x == 2 && p.y == 2));

    const LabelMap solo = map_from_rows({"040"});
    const EdgeSet one = class_edge(solo, cls::liver);
    REQUIRE_EQ(one.size(), 1);
    CHECK_EQ(one[0], PixelCoord{1, 0});

    CHECK(class_edge(block, cls::fat).empty());

    // Border pixels are edges even when surrounded by their own class.
    const LabelMap full(3, 3, ClassPalette::fused(), cls::liver);
    CHECK_EQ(class_edge(full, cls::liver).size(), 8);
}

TEST_CASE("cluster_boundary uses the grid border as outside") {
    const LabelMap m = map_from_rows({
        "444",
        "444",
        "444",
    });
    const auto comp = largest_cluster(m, cls::liver);
    REQUIRE(comp.has_value());
    const EdgeSet boundary = cluster_boundary(*comp, {3, 3});
    CHECK_EQ(boundary.size(), 8);
}

TEST_CASE("clusters_in_region clips before labeling") {
    const LabelMap m = map_from_rows({
        "00000000",
        "02222200",
        "00000000",
        "00000220",
        "00000220",
    });
    SUBCASE("class fully outside the region") {
        const RoiQuad left{{-0.5, -0.5}, {0.4, -0.5}, {0.4, 4.5}, {-0.5, 4.5}};
        CHECK(clusters_in_region(m, cls::cystic_duct, left).empty());
    }
    SUBCASE("straddling cluster keeps only inside pixels") {
        // Covers columns 0..2 only.
        const RoiQuad strip{{-0.5, -0.5}, {2.4, -0.5}, {2.4, 4.5}, {-0.5, 4.5}};
        const auto comps = clusters_in_region(m, cls::cystic_duct, strip);
        REQUIRE_EQ(comps.size(), 1);
        CHECK_EQ(comps[0].size(), 2);  // (1,1) and (2,1)
    }
    SUBCASE("two separated blobs inside give two clusters") {
        const auto comps =
            clusters_in_region(m, cls::cystic_duct, test_util::whole_image_quad(8, 5));
        REQUIRE_EQ(comps.size(), 2);
        CHECK_EQ(comps[0].size(), 5);
        CHECK_EQ(comps[1].size(), 4);
    }
    SUBCASE("whole-image region equals plain labeling") {
        const auto whole =
            clusters_in_region(m, cls::cystic_duct, test_util::whole_image_quad(8, 5));
        const auto plain = connected_components(m, cls::cystic_duct);
        REQUIRE_EQ(whole.size(), plain.size());
        for (std::size_t i = 0; i < whole.size(); ++i)
            CHECK(whole[i].pixels == plain[i].pixels);
    }
}

TEST_CASE("labeling matches the flood-fill oracle on random maps") {
    Lcg64 rng(31337);
    for (int trial = 0; trial < 40; ++trial) {
        const int w = rng.uniform(4, 32);
        const int h = rng.uniform(4, 32);
        std::vector<std::uint8_t> px(std::size_t(w) * h);
        for (auto& p : px) p = rng.uniform(0, 4) == 0 ? std::uint8_t(rng.uniform(1, 7)) : 0;
        const LabelMap m(w, h, px, ClassPalette::fused());

        for (const auto conn : {Connectivity::Four, Connectivity::Eight}) {
            for (ClassId c = 1; c <= 7; ++c) {
                const auto got = connected_components(m, c, conn);
                const auto want =
                    oracle::components(px, w, h, c, conn == Connectivity::Eight);
                REQUIRE_EQ(got.size(), want.size());
                std::size_t total = 0;
                for (std::size_t i = 0; i < got.size(); ++i) {
                    CHECK(got[i].pixels == want[i]);
                    CHECK_EQ(got[i].cls, c);
                    total += got[i].size();
                }
                CHECK_EQ(total, class_mask(m, c).count());
            }
        }
    }
}
