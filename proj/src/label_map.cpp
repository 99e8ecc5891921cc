#include "cvs/label_map.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cvs {
namespace {

using nlohmann::json;

const std::array<const char*, 7> kStream1Names = {
    "background",   "cystic_artery", "cystic_duct", "gallbladder",
    "liver",        "instrument",    "cystic_plate"};

const std::array<std::array<std::uint8_t, 3>, 8> kDefaultRgb = {{
    {0, 0, 0},       // background
    {230, 25, 75},   // cystic_artery
    {60, 180, 75},   // cystic_duct
    {255, 225, 25},  // gallbladder
    {128, 0, 0},     // liver
    {70, 240, 240},  // instrument
    {240, 50, 230},  // cystic_plate
    {245, 130, 48},  // fat
}};

void check_canonical(const std::vector<PaletteEntry>& entries, std::size_t expect,
                     const char* tag) {
    if (entries.size() != expect)
        fail(Errc::PaletteMismatch,
             std::string(tag) + " palette must have " + std::to_string(expect) + " classes");
    for (std::size_t i = 0; i < expect; ++i) {
        const char* want = i < 7 ? kStream1Names[i] : "fat";
        if (entries[i].name != want)
            fail(Errc::PaletteMismatch, std::string(tag) + " palette: class " +
                                            std::to_string(i) + " must be named " + want);
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& pgm_path) {
    std::filesystem::path p = pgm_path;
    p += ".palette.json";
    return p;
}

// Reads one header token, skipping whitespace and '#' comment lines.
std::string next_pgm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) continue;
        break;
    }
    if (ch == EOF) return tok;
    tok.push_back(static_cast<char>(ch));
    while ((ch = in.get()) != EOF && !std::isspace(ch) && ch != '#') {
        tok.push_back(static_cast<char>(ch));
    }
    if (ch == '#') in.unget();
    return tok;
}

int parse_dim(const std::string& tok, const char* what) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        fail(Errc::MalformedPgm, std::string("bad PGM ") + what + " field");
    long long v = 0;
    for (char c : tok) {
        v = v * 10 + (c - '0');
        if (v > 1'000'000) break;
    }
    if (v < 1) fail(Errc::MalformedPgm, std::string("PGM ") + what + " must be positive");
    if (v > kMaxMapSide)
        fail(Errc::MalformedPgm, std::string("PGM ") + what + " exceeds the " +
                                     std::to_string(kMaxMapSide) + " pixel cap");
    return static_cast<int>(v);
}

} // namespace

const char* stream_tag_name(StreamTag tag) noexcept {
    switch (tag) {
    case StreamTag::Stream1: return "stream1";
    case StreamTag::Stream2: return "stream2";
    case StreamTag::Fused: return "fused";
    }
    return "unknown";
}

ClassPalette::ClassPalette(StreamTag tag, std::vector<PaletteEntry> entries)
    : tag_(tag), entries_(std::move(entries)) {
    if (entries_.empty()) fail(Errc::PaletteMismatch, "palette has no classes");
    if (entries_.size() > 256) fail(Errc::PaletteMismatch, "palette exceeds 256 classes");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].id != i)
            fail(Errc::PaletteMismatch, "palette ids must be contiguous from 0");
        if (entries_[i].name.empty())
            fail(Errc::PaletteMismatch, "palette class names must be non-empty");
        for (std::size_t j = 0; j < i; ++j)
            if (entries_[j].name == entries_[i].name)
                fail(Errc::PaletteMismatch, "duplicate palette class name: " + entries_[i].name);
    }
    switch (tag_) {
    case StreamTag::Stream1:
        check_canonical(entries_, 7, "stream1");
        break;
    case StreamTag::Fused:
        check_canonical(entries_, 8, "fused");
        break;
    case StreamTag::Stream2:
        if (!id_of("fat"))
            fail(Errc::PaletteMismatch, "stream2 palette must contain a class named fat");
        break;
    }
}

ClassPalette ClassPalette::stream1() {
    std::vector<PaletteEntry> entries;
    for (std::size_t i = 0; i < 7; ++i)
        entries.push_back({static_cast<ClassId>(i), kStream1Names[i], kDefaultRgb[i]});
    return ClassPalette(StreamTag::Stream1, std::move(entries));
}

ClassPalette ClassPalette::stream2() {
    std::vector<PaletteEntry> entries;
    entries.push_back({0, "background", kDefaultRgb[0]});
    entries.push_back({1, "fat", kDefaultRgb[7]});
    return ClassPalette(StreamTag::Stream2, std::move(entries));
}

ClassPalette ClassPalette::fused() {
    std::vector<PaletteEntry> entries;
    for (std::size_t i = 0; i < 7; ++i)
        entries.push_back({static_cast<ClassId>(i), kStream1Names[i], kDefaultRgb[i]});
    entries.push_back({7, "fat", kDefaultRgb[7]});
    return ClassPalette(StreamTag::Fused, std::move(entries));
}

const PaletteEntry& ClassPalette::entry(ClassId id) const {
    if (!contains(id)) fail(Errc::UnknownClassId, "class id " + std::to_string(id) + " not in palette");
    return entries_[id];
}

std::optional<ClassId> ClassPalette::id_of(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e.id;
    return std::nullopt;
}

bool ClassPalette::operator==(const ClassPalette& other) const {
    if (tag_ != other.tag_ || entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].id != other.entries_[i].id || entries_[i].name != other.entries_[i].name ||
            entries_[i].rgb != other.entries_[i].rgb)
            return false;
    }
    return true;
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

LabelMap::LabelMap(int width, int height, std::vector<std::uint8_t> data, ClassPalette palette)
    : width_(width), height_(height), data_(std::move(data)), palette_(std::move(palette)) {
    if (width_ < 1 || height_ < 1)
        fail(Errc::InvariantViolation, "label map dimensions must be positive");
    if (width_ > kMaxMapSide || height_ > kMaxMapSide)
        fail(Errc::InvariantViolation, "label map exceeds the 4096 pixel side cap");
    if (data_.size() != static_cast<std::size_t>(width_) * height_)
        fail(Errc::InvariantViolation, "label map payload size does not match dimensions");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!palette_.contains(data_[i]))
            fail(Errc::InvariantViolation,
                 "pixel " + std::to_string(i) + " holds class id " + std::to_string(data_[i]) +
                     " outside the " + stream_tag_name(palette_.tag()) + " palette");
    }
}

LabelMap::LabelMap(int width, int height, ClassPalette palette, ClassId fill)
    : LabelMap(width, height,
               std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 1)) *
                                             static_cast<std::size_t>(std::max(height, 1)),
                                         fill),
               std::move(palette)) {}

ClassPalette load_palette(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) fail(Errc::MissingFile, "cannot open palette sidecar " + json_path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail(Errc::PaletteMismatch, "palette sidecar is not valid JSON: " + std::string(e.what()));
    }
    try {
        std::string stream = doc.at("stream").get<std::string>();
        StreamTag tag;
        if (stream == "stream1") tag = StreamTag::Stream1;
        else if (stream == "stream2") tag = StreamTag::Stream2;
        else if (stream == "fused") tag = StreamTag::Fused;
        else fail(Errc::PaletteMismatch, "unknown stream tag: " + stream);

        std::vector<PaletteEntry> entries;
        for (const auto& item : doc.at("classes")) {
            PaletteEntry e;
            int id = item.at("id").get<int>();
            if (id < 0 || id > 255) fail(Errc::PaletteMismatch, "palette id out of range");
            e.id = static_cast<ClassId>(id);
            e.name = item.at("name").get<std::string>();
            auto rgb = item.at("rgb");
            if (!rgb.is_array() || rgb.size() != 3)
                fail(Errc::PaletteMismatch, "palette rgb must be a 3-element array");
            for (int i = 0; i < 3; ++i) {
                int v = rgb[i].get<int>();
                if (v < 0 || v > 255) fail(Errc::PaletteMismatch, "palette rgb out of range");
                e.rgb[i] = static_cast<std::uint8_t>(v);
            }
            entries.push_back(std::move(e));
        }
        return ClassPalette(tag, std::move(entries));
    } catch (const json::exception& e) {
        fail(Errc::PaletteMismatch, "palette sidecar missing fields: " + std::string(e.what()));
    }
}

void save_palette(const ClassPalette& palette, const std::filesystem::path& json_path) {
    json doc;
    doc["stream"] = stream_tag_name(palette.tag());
    doc["classes"] = json::array();
    for (const auto& e : palette.entries()) {
        doc["classes"].push_back({{"id", e.id}, {"name", e.name}, {"rgb", {e.rgb[0], e.rgb[1], e.rgb[2]}}});
    }
    std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoFailure, "cannot write palette sidecar " + json_path.string());
    out << doc.dump(2) << '\n';
    if (!out) fail(Errc::IoFailure, "short write to " + json_path.string());
}

LabelMap load_label_map(const std::filesystem::path& pgm_path) {
    std::ifstream in(pgm_path, std::ios::binary);
    if (!in) fail(Errc::MissingFile, "cannot open " + pgm_path.string());

    std::string magic = next_pgm_token(in);
    if (magic != "P5") fail(Errc::MalformedPgm, "not a binary PGM (P5): " + pgm_path.string());
    int width = parse_dim(next_pgm_token(in), "width");
    int height = parse_dim(next_pgm_token(in), "height");
    std::string maxval = next_pgm_token(in);
    if (maxval != "255") fail(Errc::MalformedPgm, "PGM maxval must be 255");
    // The token reader consumed exactly one whitespace byte after the maxval.

    std::size_t expect = static_cast<std::size_t>(width) * height;
    std::vector<std::uint8_t> data(expect);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(expect));
    if (static_cast<std::size_t>(in.gcount()) != expect)
        fail(Errc::MalformedPgm, "PGM payload shorter than width*height");
    if (in.get() != EOF) fail(Errc::MalformedPgm, "trailing bytes after PGM payload");

    ClassPalette palette = load_palette(sidecar_path(pgm_path));
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!palette.contains(data[i]))
            fail(Errc::UnknownClassId,
                 "pixel " + std::to_string(i) + " holds class id " + std::to_string(data[i]) +
                     " not present in the sidecar palette");
    }
    return LabelMap(width, height, std::move(data), std::move(palette));
}

void save_label_map(const LabelMap& map, const std::filesystem::path& pgm_path) {
    // The constructor already guarantees palette membership; re-check so a
    // future mutable path cannot silently write an invalid file.
    for (std::uint8_t v : map.data())
        if (!map.palette().contains(v))
            fail(Errc::InvariantViolation, "label map pixel outside palette before write");

    std::ofstream out(pgm_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoFailure, "cannot write " + pgm_path.string());
    out << "P5\n" << map.width() << ' ' << map.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(map.data().data()),
              static_cast<std::streamsize>(map.data().size()));
    if (!out) fail(Errc::IoFailure, "short write to " + pgm_path.string());
    out.close();
    save_palette(map.palette(), sidecar_path(pgm_path));
}

BinaryMask class_mask(const LabelMap& map, ClassId cls) {
    if (!map.palette().contains(cls))
        fail(Errc::UnknownClassId, "class id " + std::to_string(cls) + " not in palette");
    BinaryMask mask{map.width(), map.height(),
                    std::vector<std::uint8_t>(map.data().size(), 0)};
    for (std::size_t i = 0; i < mask.data.size(); ++i)
        mask.data[i] = map.data()[i] == cls ? 1 : 0;
    return mask;
}

} // namespace cvs
