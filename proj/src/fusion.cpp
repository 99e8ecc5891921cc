#include "cvs/fusion.hpp"

#include "cvs/error.hpp"

#include <sstream>

namespace cvs {

const char* fusion_mode_name(FusionMode mode) noexcept {
    switch (mode) {
    case FusionMode::BackgroundFill: return "background_fill";
    case FusionMode::FatOverwrite: return "fat_overwrite";
    }
    return "unknown";
}

LabelMap fuse_streams(const LabelMap& p1, const LabelMap& p2, FusionMode mode) {
    if (p1.width() != p2.width() || p1.height() != p2.height()) {
        std::ostringstream oss;
        oss << "fuse_streams: stream sizes differ: " << p1.width() << "x" << p1.height()
            << " vs " << p2.width() << "x" << p2.height();
        fail(Errc::DimensionMismatch, oss.str());
    }
    if (p1.palette().tag() != StreamTag::Stream1) {
        fail(Errc::PaletteMismatch,
             std::string("fuse_streams: first input must carry the stream1 palette, got ") +
                 stream_tag_name(p1.palette().tag()));
    }
    const std::optional<ClassId> fat_id = p2.palette().id_of("fat");
    if (!fat_id) {
        fail(Errc::PaletteMismatch, "fuse_streams: second input palette has no \"fat\" class");
    }

    const ClassId fat_in = *fat_id;
    const auto fused_palette = ClassPalette::fused();

    std::vector<ClassId> out(p1.data().begin(), p1.data().end());
    const auto src = p2.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (src[i] != fat_in) continue;
        if (mode == FusionMode::FatOverwrite || out[i] == cls::background)
            out[i] = cls::fat;
    }
    return LabelMap(p1.width(), p1.height(), std::move(out), fused_palette);
}

} // namespace cvs
