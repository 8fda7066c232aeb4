#pragma once

// Foundational types for alphabets, words, Wang tile sets and layered
// products, plus the line-oriented tileset file grammar and local
// admissibility checking.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tilelab {

struct ParseError : std::runtime_error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& msg, int line_, int column_ = 0)
        : std::runtime_error(msg + " (line " + std::to_string(line_) +
                             (column_ > 0 ? ", column " + std::to_string(column_) : "") + ")"),
          line(line_), column(column_) {}
};

// Ordered finite set of symbol identifiers, with an optional designated
// zero symbol.
struct Alphabet {
    std::vector<std::string> symbols;
    std::optional<std::string> zero;

    Alphabet() = default;
    Alphabet(std::vector<std::string> syms, std::optional<std::string> z = std::nullopt);

    int size() const { return static_cast<int>(symbols.size()); }
    int index_of(const std::string& s) const;  // -1 if absent
    bool has(const std::string& s) const { return index_of(s) >= 0; }
    int zero_index() const;  // -1 if no zero
    bool operator==(const Alphabet&) const = default;

    // Binary {0,1} with zero designated; the workhorse of the gap shifts.
    static Alphabet binary();
};

// Finite sequence of symbol indices over an alphabet.
struct Word {
    std::vector<int> syms;

    Word() = default;
    explicit Word(std::vector<int> s) : syms(std::move(s)) {}

    int size() const { return static_cast<int>(syms.size()); }
    bool empty() const { return syms.empty(); }
    int operator[](int i) const { return syms[i]; }
    bool operator==(const Word&) const = default;
    auto operator<=>(const Word&) const = default;

    // Parses either one symbol per character, or a whitespace-separated
    // list when any alphabet symbol is longer than one character.
    static Word parse(const Alphabet& a, const std::string& text);
    std::string str(const Alphabet& a) const;
};

// The configuration ^inf(left) mid (right)^inf.  Positions 0..|mid|-1 read
// mid; positions >= |mid| read right cyclically; positions < 0 read left
// cyclically from its right end.
struct BiInfiniteSpec {
    Word left;
    Word mid;
    Word right;

    BiInfiniteSpec() = default;
    BiInfiniteSpec(Word l, Word m, Word r);
};

int eval_biinfinite(const BiInfiniteSpec& spec, long long i);

// Unit square with colored edges; colors are small nonnegative integers
// drawn from the owning tile set's universe.
struct WangTile {
    std::string label;
    int east = 0, north = 0, west = 0, south = 0;

    bool operator==(const WangTile&) const = default;
};

struct WangTileSet {
    std::string name;     // layer name when part of a layered file
    int colors = 0;       // universe {0..colors-1}
    std::vector<WangTile> tiles;

    int size() const { return static_cast<int>(tiles.size()); }
    int index_of(const std::string& label) const;  // -1 if absent
    const WangTile& operator[](int i) const { return tiles[i]; }
    // the name is presentation metadata for layered files, not content
    bool operator==(const WangTileSet& o) const {
        return colors == o.colors && tiles == o.tiles;
    }

    void add(const std::string& label, int e, int n, int w, int s);
    void validate() const;  // invariants: nonempty, colors in range, labels unique
};

// Coupling rule presented as an explicit allow-table.  layer_refs lists the
// constrained layers; SYMBOL_LAYER refers to the vertically constant
// per-column symbol layer.  A composite tuple passes when its projection to
// layer_refs is listed in `allowed`.
inline constexpr int SYMBOL_LAYER = -1;

struct CouplingTable {
    std::string name;
    std::vector<int> layer_refs;
    std::set<std::vector<std::string>> allowed;
};

// One tuple of per-layer tiles, optionally extended by a column symbol.
struct CompositeTile {
    int sym = -1;            // index into column symbol alphabet, -1 if none
    std::vector<int> tile;   // per-layer tile indices
    bool operator==(const CompositeTile&) const = default;
};

// Product of per-layer Wang tile sets filtered by coupling predicates.
// An optional vertically constant symbol layer participates in couplings
// and is subject to a built-in vertical-equality constraint.
struct LayeredTileSet {
    std::optional<Alphabet> column_symbols;
    std::vector<WangTileSet> layers;
    std::vector<CouplingTable> couplings;
    std::vector<CompositeTile> composites;  // derived by product()

    int num_layers() const { return static_cast<int>(layers.size()); }
    int num_composites() const { return static_cast<int>(composites.size()); }

    bool passes_couplings(const CompositeTile& c) const;
    std::string composite_label(int ci) const;
    int composite_index(const CompositeTile& c) const;  // -1 if not admissible

    // Edge colors of a composite as per-layer tuples.
    std::vector<int> east_colors(int ci) const;
    std::vector<int> north_colors(int ci) const;
    std::vector<int> west_colors(int ci) const;
    std::vector<int> south_colors(int ci) const;

    bool horizontal_match(int west_ci, int east_ci) const;
    bool vertical_match(int south_ci, int north_ci) const;  // includes symbol equality
};

// Builds the composite tile list.  Throws std::invalid_argument on dangling
// label references and std::runtime_error when the composite set is empty.
LayeredTileSet product(std::vector<WangTileSet> layers,
                       std::vector<CouplingTable> couplings,
                       std::optional<Alphabet> column_symbols = std::nullopt);

LayeredTileSet single_layer(WangTileSet ts);

// Rectangular window of composite tiles; HOLE marks an unfilled cell.
inline constexpr int HOLE = -1;

struct PatternWindow {
    long long origin_x = 0, origin_y = 0;
    int width = 0, height = 0;
    std::vector<int> cells;  // row-major, south row first; composite indices

    PatternWindow() = default;
    PatternWindow(long long ox, long long oy, int w, int h)
        : origin_x(ox), origin_y(oy), width(w), height(h),
          cells(static_cast<size_t>(w) * h, HOLE) {}

    int& at(int x, int y) { return cells[static_cast<size_t>(y) * width + x]; }
    int at(int x, int y) const { return cells[static_cast<size_t>(y) * width + x]; }
    bool filled() const;
};

// True iff every horizontally/vertically adjacent pair matches on every
// layer (and on the symbol layer) — the window contains no forbidden
// adjacency.  Throws std::invalid_argument when the window has holes.
bool locally_admissible(const LayeredTileSet& system, const PatternWindow& window);

// --- tileset file grammar -------------------------------------------------
//
//   colors <k>                      universe {0..k-1}
//   tile <label>: <E> <N> <W> <S>   one tile per line
//   layer <name>                    starts a layer block (layered files)
//   symbols <s> <s> ...             vertically constant symbol layer
//   zero <s>                        designated zero symbol
//   couple <name> <ref> ...: (<l>,<l>) (<l>,<l>) ...
//                                   allow-table; refs are layer names or A
//   #                               comment
//
// Serialization is canonical; parse(serialize(x)) == x bit-exactly.

WangTileSet parse_tileset(const std::string& text);
std::string serialize_tileset(const WangTileSet& ts);

LayeredTileSet parse_layered(const std::string& text);
std::string serialize_layered(const LayeredTileSet& sys);

// FNV-1a over the canonical serialization; guards tiling files against
// being rendered with the wrong tile set.
uint64_t system_hash(const LayeredTileSet& sys);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace tilelab
