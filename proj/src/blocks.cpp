#include "tilelab/blocks.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace tilelab {

// --- grid shift --------------------------------------------------------------
//
// Edge color atoms.  East/west edges: 0 background gray, 1 background
// white, 2 H-line, 3 diagonal, 4 H-line and diagonal together (the cross's
// west edge).  North/south edges: 0 gray, 1 white, 2 V-line, 3 diagonal,
// 4 V-line and diagonal together (the cross's north edge).

namespace {
enum GridTileId {
    G_BG_G = 0,
    G_BG_W = 1,
    G_HLINE = 2,
    G_VLINE = 3,
    G_DIAG_A = 4,
    G_DIAG_B = 5,
    G_CROSS = 6,
    G_HLINE_DIAG = 7,
    G_VLINE_DIAG = 8,
};
}

WangTileSet grid_tileset() {
    WangTileSet ts;
    ts.name = "grid";
    ts.colors = 5;
    //              label          E  N  W  S
    ts.add("bg_g", 0, 0, 0, 0);
    ts.add("bg_w", 1, 1, 1, 1);
    ts.add("hline", 2, 1, 2, 0);        // white above, gray below
    ts.add("vline", 0, 2, 1, 2);        // gray east, white west
    ts.add("diag_a", 3, 0, 0, 3);       // bend: diagonal in south, out east
    ts.add("diag_b", 1, 3, 3, 1);       // bend: diagonal in west, out north
    ts.add("cross", 2, 4, 4, 2);
    ts.add("hline_diag", 4, 1, 2, 3);   // diagonal crossing an H-line
    ts.add("vline_diag", 3, 2, 1, 4);   // diagonal crossing a V-line
    ts.validate();
    return ts;
}

bool grid_has_hline(int t) { return t == G_HLINE || t == G_CROSS || t == G_HLINE_DIAG; }
bool grid_has_vline(int t) { return t == G_VLINE || t == G_CROSS || t == G_VLINE_DIAG; }
bool grid_has_diag(int t) {
    return t == G_DIAG_A || t == G_DIAG_B || t == G_CROSS || t == G_HLINE_DIAG ||
           t == G_VLINE_DIAG;
}

static int mod(long long v, int n) {
    int r = static_cast<int>(v % n);
    return r < 0 ? r + n : r;
}

int x_grid_tile(int n, long long x, long long y) {
    int xm = mod(x, n), ym = mod(y, n);
    if (xm == 0 && ym == 0) return G_CROSS;
    if (ym == 0) return xm == n - 1 ? G_HLINE_DIAG : G_HLINE;
    if (xm == 0) return ym == 1 ? G_VLINE_DIAG : G_VLINE;
    if (xm == ym) return G_DIAG_B;
    if (ym == xm + 1) return G_DIAG_A;
    return ym >= xm + 2 ? G_BG_G : G_BG_W;
}

PatternWindow x_grid(int n, long long origin_x, long long origin_y, int width, int height) {
    if (n < 2) throw std::invalid_argument("x_grid needs n >= 2");
    PatternWindow win(origin_x, origin_y, width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            win.at(x, y) = x_grid_tile(n, origin_x + x, origin_y + y);
    return win;
}

GridDichotomyReport grid_dichotomy(int n, const SolveOptions& opts) {
    LayeredTileSet sys = single_layer(grid_tileset());
    GridDichotomyReport rep;
    rep.n = n;
    auto is_translate_of = [&](const Tiling& t, int k) {
        for (int dx = 0; dx < k; ++dx)
            for (int dy = 0; dy < k; ++dy) {
                bool ok = true;
                for (int y = 0; y < n && ok; ++y)
                    for (int x = 0; x < n && ok; ++x)
                        if (t.at(x, y) != x_grid_tile(k, x + dx, y + dy)) ok = false;
                if (ok) return true;
            }
        return false;
    };
    for (const Tiling& t : enumerate_torus(sys, n, n, opts)) {
        ++rep.total;
        bool has_h = false, has_v = false, has_line = false;
        for (int c : t.cells) {
            has_h |= grid_has_hline(c);
            has_v |= grid_has_vline(c);
            has_line |= grid_has_hline(c) || grid_has_vline(c) || grid_has_diag(c);
        }
        if (has_h && has_v) {
            ++rep.with_both_lines;
            bool grid = false;
            for (int k = 2; k <= n; ++k)
                if (n % k == 0 && is_translate_of(t, k)) grid = true;
            if (grid) ++rep.grid_translates;
        } else if (!has_line) {
            ++rep.lineless;
        }
    }
    rep.dichotomy = rep.with_both_lines == rep.grid_translates &&
                    rep.total == rep.with_both_lines + rep.lineless;
    return rep;
}

// --- counting columns --------------------------------------------------------
//
// Counting layer atoms.  East/west: 0 above-path, 1 below-path, 2 dark
// (inside a diagonal triangle), 3 dashed path, 4 path and departing
// diagonal, 5 diagonal, 6 solid H-line.  North/south: 0 above, 1 below,
// 2 dark, 3 solid V-segment, 4 rising path, 5 descending diagonal.

namespace {
enum CntTileId {
    C_ABOVE = 0,
    C_BELOW = 1,
    C_DARK = 2,
    C_PATH_FLAT = 3,
    C_PATH_TURN = 4,
    C_PATH_RISE = 5,
    C_VSEG = 6,
    C_CROSSING = 7,
    C_CROSSING_TURN = 8,
    C_SPLIT_FLAT = 9,
    C_SPLIT_TURN = 10,
    C_BEND_E = 11,
    C_BEND_S = 12,
    C_HROW_B = 13,
    C_HROW_T = 14,
    C_HROW_DOT = 15,
    C_HV = 16,
};

bool cnt_group1(int t) {  // dashed line on the west border
    return t == C_PATH_FLAT || t == C_PATH_TURN || t == C_CROSSING || t == C_CROSSING_TURN ||
           t == C_SPLIT_FLAT || t == C_SPLIT_TURN;
}
bool cnt_turns(int t) { return t == C_PATH_TURN || t == C_CROSSING_TURN || t == C_SPLIT_TURN; }
bool cnt_group2(int t) {  // solid vertical line
    return t == C_VSEG || t == C_CROSSING || t == C_CROSSING_TURN || t == C_HV;
}
bool cnt_group3(int t) {  // solid horizontal line
    return t == C_HROW_B || t == C_HROW_T || t == C_HROW_DOT || t == C_HV;
}
bool cnt_dot(int t) { return t == C_HROW_DOT; }
}  // namespace

WangTileSet counting_tileset() {
    WangTileSet ts;
    ts.name = "count";
    ts.colors = 7;
    //                 E  N  W  S
    ts.add("above", 0, 0, 0, 0);
    ts.add("below", 1, 1, 1, 1);
    ts.add("dark", 2, 2, 2, 2);
    ts.add("path_flat", 3, 0, 3, 1);
    ts.add("path_turn", 1, 4, 3, 1);
    ts.add("path_rise", 3, 0, 0, 4);
    ts.add("vseg", 2, 3, 1, 3);
    ts.add("crossing", 4, 0, 3, 3);        // path over a V-segment, diagonal departs
    ts.add("crossing_turn", 5, 4, 3, 3);   // same, at a nonzero column
    ts.add("split_flat", 3, 0, 4, 5);      // diagonal leaves the path southward
    ts.add("split_turn", 1, 4, 4, 5);
    ts.add("bend_e", 5, 5, 2, 2);
    ts.add("bend_s", 1, 1, 5, 5);
    ts.add("hrow_b", 6, 1, 6, 0);
    ts.add("hrow_t", 6, 2, 6, 0);
    ts.add("hrow_dot", 6, 5, 6, 0);        // white dot: diagonal lands here
    ts.add("hv", 6, 3, 6, 0);
    ts.validate();
    return ts;
}

WangTileSet sync_tileset() {
    WangTileSet ts;
    ts.name = "sync";
    ts.colors = 4;
    ts.add("sw", 0, 0, 0, 0);
    ts.add("sg", 1, 1, 1, 1);
    ts.add("dash", 1, 2, 0, 2);   // dashed vertical line; white west, gray east
    ts.add("solid", 0, 3, 1, 3);  // solid vertical line; gray west, white east
    ts.validate();
    return ts;
}

CountingSystem counting_system(const Alphabet& a) {
    if (!a.zero) throw std::invalid_argument("counting system needs a zero symbol");
    WangTileSet grid = grid_tileset();
    WangTileSet cnt = counting_tileset();
    WangTileSet syn = sync_tileset();

    auto pairs = [&](const WangTileSet& x, const WangTileSet& y,
                     const std::function<bool(int, int)>& keep) {
        std::set<std::vector<std::string>> allowed;
        for (int i = 0; i < x.size(); ++i)
            for (int j = 0; j < y.size(); ++j)
                if (keep(i, j)) allowed.insert({x.tiles[i].label, y.tiles[j].label});
        return allowed;
    };

    std::vector<CouplingTable> rules;
    rules.push_back({"r1_hline", {0, 1},
                     pairs(grid, cnt, [](int g, int c) { return grid_has_hline(g) == cnt_group3(c); })});
    rules.push_back({"r1_dots", {1, 2}, pairs(cnt, syn, [&](int c, int s) {
                         if (!cnt_group3(c)) return true;
                         return cnt_dot(c) == (syn.tiles[s].label == "dash");
                     })});
    rules.push_back({"r2_vline", {0, 2}, pairs(grid, syn, [&](int g, int s) {
                         return grid_has_vline(g) == (syn.tiles[s].label == "solid");
                     })});
    rules.push_back({"r3_vseg", {0, 1}, pairs(grid, cnt, [](int g, int c) {
                         return !cnt_group2(c) || grid_has_vline(g);
                     })});
    rules.push_back({"r4_cross", {0, 1}, pairs(grid, cnt, [](int g, int c) {
                         return (grid_has_hline(g) && grid_has_vline(g)) ==
                                (cnt_group2(c) && cnt_group3(c));
                     })});
    {
        CouplingTable r5{"r5_turn", {SYMBOL_LAYER, 1}, {}};
        int zero = a.zero_index();
        for (int s = 0; s < a.size(); ++s)
            for (int c = 0; c < cnt.size(); ++c) {
                bool ok = !cnt_group1(c) || (cnt_turns(c) == (s != zero));
                if (ok) r5.allowed.insert({a.symbols[s], cnt.tiles[c].label});
            }
        rules.push_back(std::move(r5));
    }

    CountingSystem cs;
    cs.base = product({grid, cnt, syn}, std::move(rules), a);
    return cs;
}

namespace {

// Per-side boundary tuples with every layer wildcarded.
std::vector<std::vector<int>> blank_side(int len, int layers) {
    return std::vector<std::vector<int>>(len, std::vector<int>(layers, -1));
}

void set_grid_side(std::vector<std::vector<int>>& side, int layer, const WangTileSet& grid,
                   int n, bool vertical, long long fixed, char edge) {
    for (size_t i = 0; i < side.size(); ++i) {
        int t = vertical ? x_grid_tile(n, fixed, static_cast<long long>(i))
                         : x_grid_tile(n, static_cast<long long>(i), fixed);
        const WangTile& w = grid.tiles[t];
        side[i][layer] = edge == 'E' ? w.east : edge == 'N' ? w.north : edge == 'W' ? w.west
                                                                                    : w.south;
    }
}

}  // namespace

bool verify_column_bound(int n, const std::vector<int>& a_pattern, const Alphabet& a,
                         const SolveOptions& opts) {
    if (n < 3) throw std::invalid_argument("verify_column_bound needs n >= 3");
    if (static_cast<int>(a_pattern.size()) != n + 1)
        throw std::invalid_argument("a_pattern must cover columns 0..n");
    for (int s : a_pattern)
        if (s < 0 || s >= a.size()) throw std::invalid_argument("a_pattern symbol out of range");

    CountingSystem cs = counting_system(a);
    const WangTileSet& grid = cs.base.layers[cs.grid_layer];
    int w = n + 1, h = n + 1;

    BoundaryCondition bc;
    bc.column_symbols = a_pattern;
    bc.west = blank_side(h, 3);
    bc.east = blank_side(h, 3);
    bc.north = blank_side(w, 3);
    bc.south = blank_side(w, 3);
    set_grid_side(*bc.west, cs.grid_layer, grid, n, true, 0, 'W');
    set_grid_side(*bc.east, cs.grid_layer, grid, n, true, n, 'E');
    set_grid_side(*bc.south, cs.grid_layer, grid, n, false, 0, 'S');
    set_grid_side(*bc.north, cs.grid_layer, grid, n, false, n, 'N');

    // Counting layer, canonical infinite configuration: the dashed path of
    // every stripe enters from the west at its lowest interior row, so the
    // west border reads [H, path, above...]; the stripe above contributes
    // [vseg, descending diagonal, below...] to the north border.
    for (int y = 0; y < h; ++y) (*bc.west)[y][cs.count_layer] = y == 0 || y == n ? 6 : y == 1 ? 3 : 0;
    for (int x = 0; x < w; ++x) (*bc.south)[x][cs.count_layer] = 0;
    (*bc.north)[0][cs.count_layer] = 3;
    (*bc.north)[1][cs.count_layer] = 5;
    for (int x = 2; x < n; ++x) (*bc.north)[x][cs.count_layer] = 1;
    (*bc.north)[n][cs.count_layer] = 3;

    // Synchronization layer: column 0 is a grid V-line, solid on its west.
    for (int y = 0; y < h; ++y) (*bc.west)[y][cs.sync_layer] = 1;

    return solve_rect(cs.base, w, h, bc, opts).has_value();
}

// --- width restriction -------------------------------------------------------
//
// East/west atoms: 0 white, 1 gray (wedge interior), 2 diagonal,
// 3 plateau, 4 thick H-line.  North/south: 0 white, 1 gray, 2 rising
// diagonal, 3 vertical line, 4 vertical line meeting the base H-row,
// 5 apex/plateau hugging the H-line above.  The apex and plateau demand
// color 5 to their north, which only the h_top row tile provides, so the
// wedge cannot turn east before reaching the top of the stripe.

namespace {
enum WrTileId {
    W_WHITE = 0,
    W_GRAY = 1,
    W_H = 2,
    W_H_GRAY = 3,
    W_H_TOP = 4,
    W_HV = 5,
    W_V_MID = 6,
    W_V_MID_W = 7,
    W_V_BASE = 8,
    W_V_BASE_W = 9,
    W_V_DROP = 10,
    W_V_BASEDROP = 11,
    W_B1 = 12,
    W_B2 = 13,
    W_APEX = 14,
    W_PLATEAU = 15,
};
bool wr_is_hline(int t) { return t == W_H || t == W_H_GRAY || t == W_H_TOP || t == W_HV; }
bool wr_is_vline(int t) { return t == W_HV || (t >= W_V_MID && t <= W_V_BASEDROP); }
}  // namespace

WangTileSet width_restriction_tileset() {
    WangTileSet ts;
    ts.name = "width";
    ts.colors = 6;
    //                E  N  W  S
    ts.add("white", 0, 0, 0, 0);
    ts.add("gray", 1, 1, 1, 1);
    ts.add("h", 4, 0, 4, 0);
    ts.add("h_gray", 4, 1, 4, 0);
    ts.add("h_top", 4, 0, 4, 5);        // sits right above an apex or plateau
    ts.add("hv", 4, 4, 4, 3);
    ts.add("v_mid", 0, 3, 1, 3);
    ts.add("v_mid_w", 0, 3, 0, 3);      // leftmost nonzero column
    ts.add("v_base", 2, 3, 1, 4);       // diagonal departs east at the base
    ts.add("v_base_w", 2, 3, 0, 4);
    ts.add("v_drop", 0, 3, 3, 3);       // plateau terminates into the line
    ts.add("v_basedrop", 2, 3, 3, 4);   // drop and base combined (n = 2)
    ts.add("b1", 1, 2, 2, 1);           // diagonal bend: in west, out north
    ts.add("b2", 2, 0, 0, 2);           // diagonal bend: in south, out east
    ts.add("apex", 3, 5, 2, 1);         // diagonal reaches the top, turns east
    ts.add("plateau", 3, 5, 3, 1);
    ts.validate();
    return ts;
}

LayeredTileSet width_restriction_system(const Alphabet& a) {
    if (!a.zero) throw std::invalid_argument("width restriction system needs a zero symbol");
    WangTileSet grid = grid_tileset();
    WangTileSet wr = width_restriction_tileset();

    std::vector<CouplingTable> rules;
    {
        CouplingTable w1{"w1_hline", {0, 1}, {}};
        for (int g = 0; g < grid.size(); ++g)
            for (int t = 0; t < wr.size(); ++t)
                if (grid_has_hline(g) == wr_is_hline(t))
                    w1.allowed.insert({grid.tiles[g].label, wr.tiles[t].label});
        rules.push_back(std::move(w1));
    }
    {
        CouplingTable w2{"w2_nonzero", {SYMBOL_LAYER, 1}, {}};
        int zero = a.zero_index();
        for (int s = 0; s < a.size(); ++s)
            for (int t = 0; t < wr.size(); ++t)
                if ((s != zero) == wr_is_vline(t))
                    w2.allowed.insert({a.symbols[s], wr.tiles[t].label});
        rules.push_back(std::move(w2));
    }
    return product({grid, wr}, std::move(rules), a);
}

bool width_restriction_solvable(int d, int n, const SolveOptions& opts) {
    if (d < 1 || n < 2) throw std::invalid_argument("need d >= 1 and n >= 2");
    Alphabet a = Alphabet::binary();
    LayeredTileSet sys = width_restriction_system(a);
    const WangTileSet& grid = sys.layers[0];
    int w = d + 1, h = n + 1;

    BoundaryCondition bc;
    std::vector<int> cols(w, 0);
    cols[0] = cols[d] = 1;
    bc.column_symbols = cols;
    bc.west = blank_side(h, 2);
    bc.east = blank_side(h, 2);
    bc.north = blank_side(w, 2);
    bc.south = blank_side(w, 2);
    set_grid_side(*bc.west, 0, grid, n, true, 0, 'W');
    set_grid_side(*bc.east, 0, grid, n, true, d, 'E');
    set_grid_side(*bc.south, 0, grid, n, false, 0, 'S');
    set_grid_side(*bc.north, 0, grid, n, false, n, 'N');
    // width layer: nothing arrives from the west
    for (int y = 0; y < h; ++y) (*bc.west)[y][1] = (y == 0 || y == n) ? 4 : 0;

    return solve_rect(sys, w, h, bc, opts).has_value();
}

// --- probe layer -------------------------------------------------------------

namespace {

struct ProbeAtoms {
    int na = 0;                  // |A|
    std::vector<std::string> b;  // B symbol labels in canonical order

    // east/west colors
    static constexpr int EW_WH = 0, EW_G2 = 1, EW_G4 = 2, EW_DASH = 3, EW_H = 4, EW_HD = 5;
    int ew_dd(int ia, int xi) const { return 6 + 2 * ia + xi; }
    int ew_dg(int ia, int xi) const { return 6 + 2 * na + 2 * ia + xi; }
    int ew_count() const { return 6 + 4 * na; }

    // north/south colors
    static constexpr int NS_WH = 0, NS_G2 = 1, NS_G4 = 2;
    int nb() const { return 3 + 2 * na; }  // |B|
    int ns_v(int ib) const { return 3 + ib; }
    int ns_vlow(int ib) const { return 3 + nb() + ib; }
    int ns_v1d() const { return 3 + 2 * nb(); }
    int ns_dv(int ia, int xi) const { return 4 + 2 * nb() + 2 * ia + xi; }
    int ns_count() const { return 4 + 2 * nb() + 2 * na; }

    int b_index(const std::string& s) const {
        for (size_t i = 0; i < b.size(); ++i)
            if (b[i] == s) return static_cast<int>(i);
        return -1;
    }
};

ProbeAtoms probe_atoms(const Alphabet& a) {
    ProbeAtoms at;
    at.na = a.size();
    at.b = {"0", "1", "2"};
    for (const auto& s : a.symbols) {
        at.b.push_back(s + ".0");
        at.b.push_back(s + ".1");
    }
    return at;
}

}  // namespace

WangTileSet probe_tileset(const Alphabet& a) {
    ProbeAtoms at = probe_atoms(a);
    WangTileSet ts;
    ts.name = "probe";
    ts.colors = std::max(at.ew_count(), at.ns_count());

    ts.add("wh", at.EW_WH, at.NS_WH, at.EW_WH, at.NS_WH);
    ts.add("g2", at.EW_G2, at.NS_G2, at.EW_G2, at.NS_G2);
    ts.add("g4", at.EW_G4, at.NS_G4, at.EW_G4, at.NS_G4);

    // bottom H-row of a cell row
    ts.add("h_w", at.EW_H, at.NS_WH, at.EW_H, at.NS_WH);
    ts.add("h_g2", at.EW_H, at.NS_G2, at.EW_H, at.NS_WH);
    ts.add("h_g4", at.EW_H, at.NS_G4, at.EW_H, at.NS_WH);
    ts.add("h_disk", at.EW_HD, at.NS_G2, at.EW_H, at.NS_WH);
    for (int ia = 0; ia < at.na; ++ia)
        for (int xi = 0; xi < 2; ++xi)
            ts.add("land." + a.symbols[ia] + "." + std::to_string(xi),
                   xi == 1 ? at.EW_HD : at.EW_H, at.ns_dv(ia, xi), at.EW_H, at.NS_WH);

    // crosses carry (south segment, north segment) symbols
    for (int ibs = 0; ibs < at.nb(); ++ibs)
        for (int ibn = 0; ibn < at.nb(); ++ibn)
            ts.add("x." + at.b[ibs] + "." + at.b[ibn], at.EW_H, at.ns_vlow(ibn),
                   at.b[ibn] == "1" ? at.EW_HD : at.EW_H, at.ns_v(ibs));

    // segments holding 0 or 2: outside the gadget
    for (const std::string bsym : {"0", "2"}) {
        int ib = at.b_index(bsym);
        ts.add("v" + bsym, at.EW_WH, at.ns_v(ib), at.EW_WH, at.ns_v(ib));
        ts.add("v" + bsym + "_bot", at.EW_WH, at.ns_v(ib), at.EW_WH, at.ns_vlow(ib));
    }
    // segments holding 1
    {
        int ib = at.b_index("1");
        ts.add("v1_ww", at.EW_WH, at.ns_v(ib), at.EW_WH, at.ns_v(ib));
        ts.add("v1_gg", at.EW_G2, at.ns_v(ib), at.EW_G2, at.ns_v(ib));
        ts.add("v1_gg_bot", at.EW_G2, at.ns_v(ib), at.EW_G2, at.ns_vlow(ib));
        ts.add("v1_raise", at.EW_DASH, at.ns_v1d(), at.EW_G2, at.ns_v(ib));
        ts.add("v1_raise_bot", at.EW_DASH, at.ns_v1d(), at.EW_G2, at.ns_vlow(ib));
        ts.add("v1_raise_hi", at.EW_WH, at.ns_v(ib), at.EW_DASH, at.ns_v1d());
        ts.add("v1_emit", at.EW_WH, at.ns_v(ib), at.EW_DASH, at.ns_vlow(ib));
    }
    // segments holding an A x {0,1} symbol
    for (int ia = 0; ia < at.na; ++ia)
        for (int xi = 0; xi < 2; ++xi) {
            std::string tag = a.symbols[ia] + "." + std::to_string(xi);
            int ib = at.b_index(tag);
            ts.add("va_ab." + tag, at.EW_WH, at.ns_v(ib), at.EW_WH, at.ns_v(ib));
            ts.add("va_bl." + tag, at.EW_G4, at.ns_v(ib), at.EW_WH, at.ns_v(ib));
            ts.add("va_bl_bot." + tag, at.EW_G4, at.ns_v(ib), at.EW_WH, at.ns_vlow(ib));
            ts.add("va_co." + tag, at.ew_dd(ia, xi), at.ns_v(ib), at.EW_WH, at.ns_v(ib));
            ts.add("va_co_bot." + tag, at.ew_dd(ia, xi), at.ns_v(ib), at.EW_WH,
                   at.ns_vlow(ib));
            if (xi == 0)
                ts.add("va_pl_bot." + tag, at.EW_WH, at.ns_v(ib), at.EW_WH, at.ns_vlow(ib));
        }
    // dashed signal and returning diagonal
    ts.add("dash", at.EW_DASH, at.NS_WH, at.EW_DASH, at.NS_G2);
    for (int ia = 0; ia < at.na; ++ia)
        for (int xi = 0; xi < 2; ++xi) {
            std::string tag = a.symbols[ia] + "." + std::to_string(xi);
            ts.add("split." + tag, at.EW_DASH, at.NS_WH, at.ew_dd(ia, xi), at.ns_dv(ia, xi));
            ts.add("de." + tag, at.ew_dg(ia, xi), at.ns_dv(ia, xi), at.EW_G4, at.NS_G4);
            ts.add("ds." + tag, at.EW_G2, at.NS_G2, at.ew_dg(ia, xi), at.ns_dv(ia, xi));
        }
    ts.validate();
    return ts;
}

ProbeSystem probe_system(const Alphabet& a) {
    ProbeAtoms at = probe_atoms(a);
    WangTileSet grid = grid_tileset();
    WangTileSet probe = probe_tileset(a);

    auto is_thick_h = [&](int t) {
        const std::string& l = probe.tiles[t].label;
        return l.rfind("h_", 0) == 0 || l.rfind("land.", 0) == 0 || l.rfind("x.", 0) == 0;
    };
    auto is_thick_v = [&](int t) {
        const std::string& l = probe.tiles[t].label;
        return l.rfind("x.", 0) == 0 || l.rfind("v0", 0) == 0 || l.rfind("v1", 0) == 0 ||
               l.rfind("v2", 0) == 0 || l.rfind("va_", 0) == 0;
    };

    std::vector<CouplingTable> rules;
    {
        CouplingTable p1{"p1_lines", {0, 1}, {}};
        for (int g = 0; g < grid.size(); ++g)
            for (int t = 0; t < probe.size(); ++t)
                if (grid_has_hline(g) == is_thick_h(t) && grid_has_vline(g) == is_thick_v(t))
                    p1.allowed.insert({grid.tiles[g].label, probe.tiles[t].label});
        rules.push_back(std::move(p1));
    }
    {
        // rule 2: the A-part of a probe tile equals the A-layer symbol
        CouplingTable p2{"p2_probe", {SYMBOL_LAYER, 1}, {}};
        std::map<std::string, std::string> needs;  // probe label -> required A symbol
        for (int ia = 0; ia < at.na; ++ia)
            for (int xi = 0; xi < 2; ++xi)
                needs["land." + a.symbols[ia] + "." + std::to_string(xi)] = a.symbols[ia];
        for (int ibs = 0; ibs < at.nb(); ++ibs)
            for (int ia = 0; ia < at.na; ++ia)
                needs["x." + at.b[ibs] + "." + a.symbols[ia] + ".0"] = a.symbols[ia];
        for (int s = 0; s < a.size(); ++s)
            for (int t = 0; t < probe.size(); ++t) {
                auto it = needs.find(probe.tiles[t].label);
                if (it == needs.end() || it->second == a.symbols[s])
                    p2.allowed.insert({a.symbols[s], probe.tiles[t].label});
            }
        rules.push_back(std::move(p2));
    }

    ProbeSystem ps;
    ps.a = a;
    ps.b_symbols = at.b;
    ps.base = product({grid, probe}, std::move(rules), a);
    return ps;
}

bool valid_b_row(const ProbeSystem& ps, const std::vector<std::string>& b_row) {
    auto cls = [&](const std::string& s) -> char {
        if (s == "0" || s == "1" || s == "2") return s[0];
        for (const auto& sym : ps.a.symbols)
            if (s == sym + ".0" || s == sym + ".1") return 'a';
        return '?';
    };
    if (b_row.empty()) return false;
    char prev = '0';  // all-zero west context
    for (const auto& s : b_row) {
        char c = cls(s);
        if (c == '?') return false;
        bool ok = (prev == '0' && (c == '0' || c == 'a')) || (prev == 'a' && (c == '1' || c == '2')) ||
                  (prev == '1' && (c == '1' || c == '2')) || (prev == '2' && c == '2');
        if (!ok) return false;
        prev = c;
    }
    return true;
}

uint64_t verify_probe_determinism(int m, const std::vector<int>& a_pattern,
                                  const std::vector<std::string>& b_row, const Alphabet& a,
                                  const SolveOptions& opts) {
    if (m < 2) throw std::invalid_argument("verify_probe_determinism needs m >= 2");
    ProbeSystem ps = probe_system(a);
    if (!valid_b_row(ps, b_row)) throw std::invalid_argument("b_row violates the 2x1 patterns");
    ProbeAtoms at = probe_atoms(a);

    int segs = static_cast<int>(b_row.size());
    int w = (segs - 1) * m + 1;
    int h = m;
    if (static_cast<int>(a_pattern.size()) != w)
        throw std::invalid_argument("a_pattern must cover the window columns");

    const WangTileSet& grid = ps.base.layers[0];
    BoundaryCondition bc;
    bc.column_symbols = a_pattern;
    bc.west = blank_side(h, 2);
    bc.east = blank_side(h, 2);
    bc.north = blank_side(w, 2);
    bc.south = blank_side(w, 2);
    set_grid_side(*bc.west, 0, grid, m, true, 0, 'W');
    set_grid_side(*bc.east, 0, grid, m, true, w - 1, 'E');
    set_grid_side(*bc.south, 0, grid, m, false, 0, 'S');
    set_grid_side(*bc.north, 0, grid, m, false, h - 1, 'N');

    for (int y = 0; y < h; ++y) {
        (*bc.west)[y][1] = y == 0 ? at.EW_H : at.EW_WH;
        (*bc.east)[y][1] = y == 0 ? at.EW_H : at.EW_WH;
    }
    for (int x = 0; x < w; ++x) {
        bool seg = x % m == 0;
        (*bc.south)[x][1] = seg ? at.ns_v(at.b_index("0")) : at.NS_WH;
        (*bc.north)[x][1] = seg ? at.ns_v(at.b_index(b_row[x / m])) : at.NS_WH;
    }

    return count_rect_exhaustive(ps.base, w, h, bc, opts);
}

}  // namespace tilelab
