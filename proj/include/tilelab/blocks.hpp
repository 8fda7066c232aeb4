#pragma once

// Concrete tile systems: the grid shift, the column-counting system, the
// width restriction layer and the probe layer, with desk-scale
// verification operations for each construction's claims.

#include "tilelab/core.hpp"
#include "tilelab/tiler.hpp"

namespace tilelab {

// --- grid shift --------------------------------------------------------------
//
// Nine tiles: two background phases, H-line, V-line, two diagonal bends,
// the cross, and the diagonal variants crossing an H- or V-line.  The
// diagonal is a unit-slope staircase of bends connecting successive
// crosses; the two-phase background flips exactly across lines and
// diagonals, which pins the grid spacing.  Torus tilings of size n x n
// containing both an H- and a V-line are exactly the translates of the
// regular width-k grids for k | n.

WangTileSet grid_tileset();

bool grid_has_hline(int tile);
bool grid_has_vline(int tile);
bool grid_has_diag(int tile);

// Tile of the canonical width-n grid configuration (cross at the origin)
// at global position (x, y).
int x_grid_tile(int n, long long x, long long y);

// Restriction of that configuration to a window; throws on n < 2.
PatternWindow x_grid(int n, long long origin_x, long long origin_y, int width, int height);

struct GridDichotomyReport {
    int n = 0;
    uint64_t total = 0;            // all n x n torus tilings
    uint64_t with_both_lines = 0;  // containing an H-line and a V-line tile
    uint64_t grid_translates = 0;  // translates of x_grid(k) for some k | n, k >= 2
    uint64_t lineless = 0;         // tilings without any line tile
    bool dichotomy = false;        // both_lines == grid_translates and rest lineless
};

GridDichotomyReport grid_dichotomy(int n, const SolveOptions& opts = {});

// --- counting columns --------------------------------------------------------
//
// Layers: vertically constant A-layer, grid layer, counting layer,
// synchronization layer.  The five coupling rules are explicit
// allow-tables named r1_hline, r1_dots, r2_vline, r3_vseg, r4_cross,
// r5_turn (rule 1 contributes two tables).

struct CountingSystem {
    LayeredTileSet base;  // layers: [grid, count, sync], symbol layer A
    int grid_layer = 0, count_layer = 1, sync_layer = 2;
};

WangTileSet counting_tileset();
WangTileSet sync_tileset();
CountingSystem counting_system(const Alphabet& a);

// True iff the counting and synchronization layers admit a completion over
// the given per-column symbols, with the grid layer pinned to x_grid(n)
// and boundary colors sampled from the canonical infinite configuration
// (every stripe's dashed path enters at its lowest interior row).
// a_pattern must have n+1 entries (columns 0..n; columns 0 and n are the
// grid's vertical lines).
bool verify_column_bound(int n, const std::vector<int>& a_pattern,
                         const Alphabet& a = Alphabet::binary(),
                         const SolveOptions& opts = {});

// --- width restriction -------------------------------------------------------
//
// Wedges anchored at the nonzero columns of the A-layer: a unit-slope
// diagonal leaves the base of each nonzero column, must reach the next
// thick horizontal line (n rows up), runs as a plateau below it and drops
// at the next nonzero column.  Unsolvable exactly when some gap between
// consecutive nonzero columns is shorter than the grid width.

WangTileSet width_restriction_tileset();
LayeredTileSet width_restriction_system(const Alphabet& a);

// Two nonzero columns at distance d inside a width-n stripe: solvable
// iff n <= d.
bool width_restriction_solvable(int d, int n, const SolveOptions& opts = {});

// --- probe layer -------------------------------------------------------------
//
// Vertical segments on the grid's V-lines carry symbols of
// B = {0,1,2} u (A x {0,1}).  Within a grid cell row holding
// ... 0 (a,c) 1^k 2 ..., the rightmost 1-segment emits a dashed signal
// west along the lowest interior row, raised by one at every 1-segment;
// on collision with the (a,c)-segment a diagonal returns southeast and
// lands on the bottom H-row at distance k, where the A-layer must hold a.
// Disk markings force c = 1 exactly when k = m-1.

struct ProbeSystem {
    LayeredTileSet base;  // layers: [grid, probe], symbol layer A
    Alphabet a;
    std::vector<std::string> b_symbols;  // "0", "1", "2", "<a>.0", "<a>.1"
};

WangTileSet probe_tileset(const Alphabet& a);
ProbeSystem probe_system(const Alphabet& a);

// True iff consecutive entries are allowed 2x1 patterns (00, 0a, a1, a2,
// 11, 12, 22) when read with all-zero west context.
bool valid_b_row(const ProbeSystem& ps, const std::vector<std::string>& b_row);

// Number of admissible probe-layer completions of one grid cell row of
// width m, given the per-column A symbols and the B symbols held by the
// consecutive segments.  Throws std::invalid_argument on an invalid
// b_row.  Expected 1 when the row is consistent with the A-layer, 0
// otherwise; never more than 1 (the layer is determined).
uint64_t verify_probe_determinism(int m, const std::vector<int>& a_pattern,
                                  const std::vector<std::string>& b_row,
                                  const Alphabet& a, const SolveOptions& opts = {});

}  // namespace tilelab
