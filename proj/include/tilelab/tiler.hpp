#pragma once

// Exhaustive and propagation-based solvers for finite rectangles and tori
// over layered Wang tile sets.  The public entry points run OpenMP-parallel
// kernels; *_serial variants are the reference implementations kept for
// testing and benchmarking.  Results are contractually identical: same
// first solution, same counts, same enumeration order.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>

#include "tilelab/core.hpp"

namespace tilelab {

struct GuardExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-side sequences constrain the window's outward-facing edge colors,
// one per-layer tuple per boundary cell; -1 entries are wildcards.
// Pins force whole composite tiles at window positions, and
// column_symbols fixes the vertically constant symbol layer per column.
struct BoundaryCondition {
    std::optional<std::vector<std::vector<int>>> north, south, east, west;
    std::map<std::pair<int, int>, int> pins;
    std::optional<std::vector<int>> column_symbols;

    void validate(const LayeredTileSet& sys, int w, int h) const;
};

// Boundary-condition file grammar (same family as tileset files):
//   north: 1/0/2 - 0/0/0 ...     one tuple per cell, '-' wildcard
//   pin <x> <y> (<label>,...)    composite by labels (symbol first if any)
//   cols: 0 1 - 0                symbol layer per column
BoundaryCondition parse_bc(const LayeredTileSet& sys, const std::string& text, int w, int h);

enum class Topology { Rect, Torus };

struct Tiling {
    int width = 0, height = 0;
    Topology topology = Topology::Rect;
    std::vector<int> cells;  // row-major, south row first; composite indices

    int at(int x, int y) const { return cells[static_cast<size_t>(y) * width + x]; }
    int& at(int x, int y) { return cells[static_cast<size_t>(y) * width + x]; }
    PatternWindow window(long long ox = 0, long long oy = 0) const;
    bool operator==(const Tiling&) const = default;
};

std::string serialize_tiling(const LayeredTileSet& sys, const Tiling& t);
Tiling parse_tiling(const LayeredTileSet& sys, const std::string& text);

struct SolveOptions {
    uint64_t node_guard = 200'000'000;   // exhaustive search nodes
    uint64_t state_guard = 1u << 20;     // transfer-matrix row states
    int threads = 0;                     // 0 = library default
};

// First solution in the documented ordering (cells row-major from the
// south-west corner, composite tiles in construction order), or absent.
std::optional<Tiling> solve_rect(const LayeredTileSet& sys, int w, int h,
                                 const BoundaryCondition& bc, const SolveOptions& opts = {});
std::optional<Tiling> solve_rect_serial(const LayeredTileSet& sys, int w, int h,
                                        const BoundaryCondition& bc,
                                        const SolveOptions& opts = {});

// Exact number of admissible tilings.  Uses the transfer matrix over full
// row states when the state count fits the guard, otherwise exhaustive
// search.  Both routes are exposed for cross-validation.
uint64_t count_rect(const LayeredTileSet& sys, int w, int h, const BoundaryCondition& bc,
                    const SolveOptions& opts = {});
uint64_t count_rect_transfer(const LayeredTileSet& sys, int w, int h,
                             const BoundaryCondition& bc, const SolveOptions& opts = {});
uint64_t count_rect_exhaustive(const LayeredTileSet& sys, int w, int h,
                               const BoundaryCondition& bc, const SolveOptions& opts = {});
uint64_t count_rect_exhaustive_serial(const LayeredTileSet& sys, int w, int h,
                                      const BoundaryCondition& bc,
                                      const SolveOptions& opts = {});

// Exhaustive counting with memoization: a broken-profile sweep whose state
// is the last `w` placed cells.  Exact like the plain search, but counts
// astronomically many tilings without enumerating them; the second route
// cross-validating the transfer matrix.
uint64_t count_rect_profile(const LayeredTileSet& sys, int w, int h, const BoundaryCondition& bc,
                            const SolveOptions& opts = {});

// Yields all admissible tilings exactly once in lexicographic order.
// The callback returns false to stop early.
void enumerate_rect_cb(const LayeredTileSet& sys, int w, int h, const BoundaryCondition& bc,
                       const std::function<bool(const Tiling&)>& fn,
                       const SolveOptions& opts = {});
std::vector<Tiling> enumerate_rect(const LayeredTileSet& sys, int w, int h,
                                   const BoundaryCondition& bc, const SolveOptions& opts = {});
std::vector<Tiling> enumerate_rect_serial(const LayeredTileSet& sys, int w, int h,
                                          const BoundaryCondition& bc,
                                          const SolveOptions& opts = {});

// Torus variants: adjacency wraps on both axes.  Periodic configurations
// of the shift are exactly the torus tilings.
std::optional<Tiling> solve_torus(const LayeredTileSet& sys, int w, int h,
                                  const SolveOptions& opts = {});
std::vector<Tiling> enumerate_torus(const LayeredTileSet& sys, int w, int h,
                                    const SolveOptions& opts = {});

// Checks that at most one tile exists per (north, west) color pair.
bool is_nw_deterministic(const WangTileSet& ts);

// Fills the |west| x |north| rectangle row-major from the north-west corner
// by NW-determinism; absent when some (N, W) pair has no tile.  Throws
// std::invalid_argument if the tile set is not NW-deterministic.
std::optional<Tiling> nw_propagate(const WangTileSet& ts, const std::vector<int>& north,
                                   const std::vector<int>& west);

// A (w, h) torus tiling unrolled to a (kw, lh) rectangle window.
Tiling unroll(const Tiling& torus, int k, int l);

}  // namespace tilelab
