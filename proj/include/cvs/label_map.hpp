#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvs/error.hpp"

namespace cvs {

using ClassId = std::uint8_t;

// Canonical class ids shared by the anatomy stream and the fused stream.
namespace cls {
inline constexpr ClassId background = 0;
inline constexpr ClassId cystic_artery = 1;
inline constexpr ClassId cystic_duct = 2;
inline constexpr ClassId gallbladder = 3;
inline constexpr ClassId liver = 4;
inline constexpr ClassId instrument = 5;
inline constexpr ClassId cystic_plate = 6;
inline constexpr ClassId fat = 7;
} // namespace cls

enum class StreamTag { Stream1, Stream2, Fused };

const char* stream_tag_name(StreamTag tag) noexcept;

struct PaletteEntry {
    ClassId id = 0;
    std::string name;
    std::array<std::uint8_t, 3> rgb{0, 0, 0};
};

// Class table for one map. Ids must be unique and contiguous from zero.
// Stream1 and Fused palettes are pinned to the canonical class lists;
// Stream2 palettes are free-form but must contain a class named "fat".
class ClassPalette {
public:
    ClassPalette(StreamTag tag, std::vector<PaletteEntry> entries);

    static ClassPalette stream1();
    static ClassPalette stream2();
    static ClassPalette fused();

    StreamTag tag() const { return tag_; }
    const std::vector<PaletteEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    bool contains(ClassId id) const { return id < entries_.size(); }
    const PaletteEntry& entry(ClassId id) const;
    std::optional<ClassId> id_of(const std::string& name) const;

    bool operator==(const ClassPalette& other) const;

private:
    StreamTag tag_;
    std::vector<PaletteEntry> entries_;
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // row-major, 0 or 1

    std::uint8_t at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t count() const;
};

inline constexpr int kMaxMapSide = 4096;

// Dense row-major label raster. Immutable after construction; every pixel is
// validated against the palette and sides are capped at 4096 to guard
// pathological inputs.
class LabelMap {
public:
    LabelMap(int width, int height, std::vector<std::uint8_t> data, ClassPalette palette);
    LabelMap(int width, int height, ClassPalette palette, ClassId fill = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    const ClassPalette& palette() const { return palette_; }
    std::span<const std::uint8_t> data() const { return data_; }

    ClassId at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
    ClassPalette palette_;
};

// Binary PGM (P5, maxval 255) with a JSON palette sidecar at
// "<path>.palette.json". Loading validates the header, the pixel payload
// against the sidecar palette, and the size cap; saving writes the canonical
// header and re-checks the palette invariant first.
LabelMap load_label_map(const std::filesystem::path& pgm_path);
void save_label_map(const LabelMap& map, const std::filesystem::path& pgm_path);

// Sidecar (de)serialisation, exposed for tools that carry palettes alone.
ClassPalette load_palette(const std::filesystem::path& json_path);
void save_palette(const ClassPalette& palette, const std::filesystem::path& json_path);

// 0/1 mask of the pixels holding `cls`. Throws UnknownClassId when the class
// is not in the map's palette.
BinaryMask class_mask(const LabelMap& map, ClassId cls);

} // namespace cvs
