#pragma once

// Deterministic ascii and svg rendering of tilings.

#include "tilelab/core.hpp"
#include "tilelab/tiler.hpp"

namespace tilelab {

struct RenderSpec {
    enum class Format { Ascii, Svg };
    Format format = Format::Ascii;
    int cell_size = 16;                         // svg pixels per cell
    std::map<std::string, std::string> glyphs;  // composite label -> glyph
    std::vector<bool> layer_visible;            // empty = all layers

    // Fills the glyph map for every composite of the system; explicit
    // entries win, everything else gets a derived glyph.  Throws when an
    // explicit glyph references an unknown composite label.
    void resolve_glyphs(const LayeredTileSet& sys);
};

std::string render_ascii(const LayeredTileSet& sys, const Tiling& t, RenderSpec spec);
std::string render_svg(const LayeredTileSet& sys, const Tiling& t, const RenderSpec& spec);

}  // namespace tilelab
