#include "tilelab/render.hpp"

#include <sstream>

namespace tilelab {

namespace {

// Glyphs for the tile roles of the shipped constructions; everything else
// falls back to an indexed letter.
std::string derived_glyph(const std::string& label, int index) {
    static const std::map<std::string, std::string> known = {
        {"bg_g", "."},    {"bg_w", " "},      {"hline", "-"},      {"vline", "|"},
        {"cross", "+"},   {"diag_a", "/"},    {"diag_b", "/"},     {"hline_diag", "="},
        {"vline_diag", "!"}, {"above", " "},  {"below", "."},      {"dark", ":"},
        {"path_flat", "~"}, {"path_turn", "^"}, {"path_rise", "^"}, {"vseg", "|"},
        {"crossing", "x"}, {"crossing_turn", "X"}, {"split_flat", "~"}, {"split_turn", "^"},
        {"bend_e", "\\"}, {"bend_s", "\\"},   {"hrow_b", "-"},     {"hrow_t", "-"},
        {"hrow_dot", "o"}, {"hv", "+"},       {"white", " "},      {"gray", "."},
        {"h", "-"},       {"h_gray", "-"},    {"v_mid", "|"},
        {"plateau", "_"}, {"apex", "\\"},     {"b1", "/"},         {"b2", "/"},
    };
    auto it = known.find(label);
    if (it != known.end()) return it->second;
    return std::string(1, static_cast<char>('a' + index % 26));
}

// Stable small palette for svg fills.
const char* palette(int i) {
    static const char* colors[] = {"#ffffff", "#d9d9d9", "#a6a6a6", "#f2e6c9",
                                   "#cfe3f2", "#e3cfe8", "#d2e8cf", "#f2cfcf"};
    return colors[i % 8];
}

}  // namespace

void RenderSpec::resolve_glyphs(const LayeredTileSet& sys) {
    std::set<std::string> labels;
    for (int ci = 0; ci < sys.num_composites(); ++ci) labels.insert(sys.composite_label(ci));
    for (const auto& [label, glyph] : glyphs)
        if (!labels.count(label))
            throw std::invalid_argument("glyph references unknown composite " + label);
    for (int ci = 0; ci < sys.num_composites(); ++ci) {
        std::string lbl = sys.composite_label(ci);
        if (glyphs.count(lbl)) continue;
        // derive from the first visible tile layer
        int layer = 0;
        for (int l = 0; l < sys.num_layers(); ++l)
            if (layer_visible.empty() || (l < static_cast<int>(layer_visible.size()) &&
                                          layer_visible[l])) {
                layer = l;
                break;
            }
        glyphs[lbl] = derived_glyph(sys.layers[layer].tiles[sys.composites[ci].tile[layer]].label,
                                    sys.composites[ci].tile[layer]);
    }
}

std::string render_ascii(const LayeredTileSet& sys, const Tiling& t, RenderSpec spec) {
    spec.resolve_glyphs(sys);
    std::ostringstream out;
    for (int y = t.height - 1; y >= 0; --y) {
        for (int x = 0; x < t.width; ++x) out << spec.glyphs.at(sys.composite_label(t.at(x, y)));
        out << "\n";
    }
    return out.str();
}

std::string render_svg(const LayeredTileSet& sys, const Tiling& t, const RenderSpec& spec) {
    int cs = spec.cell_size;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << t.width * cs << "\" height=\""
        << t.height * cs << "\" shape-rendering=\"crispEdges\">\n";
    auto visible = [&](int l) {
        return spec.layer_visible.empty() ||
               (l < static_cast<int>(spec.layer_visible.size()) && spec.layer_visible[l]);
    };
    for (int y = 0; y < t.height; ++y)
        for (int x = 0; x < t.width; ++x) {
            int px = x * cs;
            int py = (t.height - 1 - y) * cs;  // svg y grows downward
            const CompositeTile& c = sys.composites[t.at(x, y)];
            int fill = 0;
            for (int l = 0; l < sys.num_layers(); ++l)
                if (visible(l)) fill = fill * 7 + c.tile[l];
            out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cs << "\" height=\""
                << cs << "\" fill=\"" << palette(fill) << "\" stroke=\"#eeeeee\"/>\n";
            for (int l = 0; l < sys.num_layers(); ++l) {
                if (!visible(l)) continue;
                const std::string& lbl = sys.layers[l].tiles[c.tile[l]].label;
                int mx = px + cs / 2, my = py + cs / 2;
                bool hline = lbl == "hline" || lbl == "cross" || lbl == "hline_diag" ||
                             lbl.rfind("hrow", 0) == 0 || lbl == "hv" || lbl == "h" ||
                             lbl == "h_gray";
                bool vline = lbl == "vline" || lbl == "cross" || lbl == "vline_diag" ||
                             lbl == "vseg" || lbl.rfind("v_", 0) == 0;
                if (hline)
                    out << "<line x1=\"" << px << "\" y1=\"" << my << "\" x2=\"" << px + cs
                        << "\" y2=\"" << my << "\" stroke=\"#000000\" stroke-width=\"2\"/>\n";
                if (vline)
                    out << "<line x1=\"" << mx << "\" y1=\"" << py << "\" x2=\"" << mx
                        << "\" y2=\"" << py + cs << "\" stroke=\"#000000\" stroke-width=\"2\"/>\n";
                if (lbl.rfind("diag", 0) == 0 || lbl == "b1" || lbl == "b2" || lbl == "apex")
                    out << "<line x1=\"" << px << "\" y1=\"" << py + cs << "\" x2=\"" << px + cs
                        << "\" y2=\"" << py << "\" stroke=\"#555555\" stroke-width=\"1\"/>\n";
                if (lbl == "hrow_dot")
                    out << "<circle cx=\"" << mx << "\" cy=\"" << my
                        << "\" r=\"3\" fill=\"#ffffff\" stroke=\"#000000\"/>\n";
                if (lbl.rfind("path", 0) == 0 || lbl.rfind("split", 0) == 0 || lbl == "dash")
                    out << "<line x1=\"" << px << "\" y1=\"" << my << "\" x2=\"" << px + cs
                        << "\" y2=\"" << my
                        << "\" stroke=\"#333333\" stroke-width=\"1\" stroke-dasharray=\"3,2\"/>\n";
            }
        }
    out << "</svg>\n";
    return out.str();
}

}  // namespace tilelab
