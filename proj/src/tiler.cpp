#include "tilelab/tiler.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tilelab {

namespace {

struct Masks {
    int nc = 0;
    int words = 0;
    std::vector<uint64_t> east;   // [ci * words + w]: tiles admissible east of ci
    std::vector<uint64_t> north;  // [ci * words + w]: tiles admissible north of ci
    std::vector<uint64_t> west;   // transposes
    std::vector<uint64_t> south;
    std::vector<uint64_t> full;

    explicit Masks(const LayeredTileSet& sys) {
        nc = sys.num_composites();
        words = (nc + 63) / 64;
        east.assign(static_cast<size_t>(nc) * words, 0);
        north.assign(static_cast<size_t>(nc) * words, 0);
        west.assign(static_cast<size_t>(nc) * words, 0);
        south.assign(static_cast<size_t>(nc) * words, 0);
        full.assign(words, 0);
        for (int i = 0; i < nc; ++i) full[i >> 6] |= 1ull << (i & 63);
        for (int a = 0; a < nc; ++a)
            for (int b = 0; b < nc; ++b) {
                if (sys.horizontal_match(a, b)) {
                    east[static_cast<size_t>(a) * words + (b >> 6)] |= 1ull << (b & 63);
                    west[static_cast<size_t>(b) * words + (a >> 6)] |= 1ull << (a & 63);
                }
                if (sys.vertical_match(a, b)) {
                    north[static_cast<size_t>(a) * words + (b >> 6)] |= 1ull << (b & 63);
                    south[static_cast<size_t>(b) * words + (a >> 6)] |= 1ull << (a & 63);
                }
            }
    }
};

// Arc-consistency fixpoint: a candidate survives only while every
// neighboring cell still offers a compatible partner.  Preserves the
// solution set exactly; fixed points of empty domains mean unsolvable.
void propagate_domains(const Masks& m, int w, int h, bool torus, std::vector<uint64_t>& dom) {
    auto dptr = [&](int x, int y) { return dom.data() + (static_cast<size_t>(y) * w + x) * m.words; };
    std::vector<uint64_t> acc(m.words);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                uint64_t* d = dptr(x, y);
                auto check_side = [&](const std::vector<uint64_t>& rel, const uint64_t* nd,
                                      int ci) {
                    const uint64_t* r = rel.data() + static_cast<size_t>(ci) * m.words;
                    for (int i = 0; i < m.words; ++i)
                        if (r[i] & nd[i]) return true;
                    return false;
                };
                for (int word = 0; word < m.words; ++word) {
                    uint64_t bits = d[word];
                    while (bits) {
                        int b = __builtin_ctzll(bits);
                        bits &= bits - 1;
                        int ci = (word << 6) | b;
                        bool ok = true;
                        if (x + 1 < w) ok = ok && check_side(m.east, dptr(x + 1, y), ci);
                        else if (torus && w > 1) ok = ok && check_side(m.east, dptr(0, y), ci);
                        if (ok) {
                            if (x > 0) ok = check_side(m.west, dptr(x - 1, y), ci);
                            else if (torus && w > 1) ok = check_side(m.west, dptr(w - 1, y), ci);
                        }
                        if (ok) {
                            if (y + 1 < h) ok = check_side(m.north, dptr(x, y + 1), ci);
                            else if (torus && h > 1) ok = check_side(m.north, dptr(x, 0), ci);
                        }
                        if (ok) {
                            if (y > 0) ok = check_side(m.south, dptr(x, y - 1), ci);
                            else if (torus && h > 1) ok = check_side(m.south, dptr(x, h - 1), ci);
                        }
                        if (!ok) {
                            d[word] &= ~(1ull << b);
                            changed = true;
                        }
                    }
                }
            }
    }
}

bool tuple_matches(const std::vector<int>& colors, const std::vector<int>& want) {
    for (size_t l = 0; l < colors.size(); ++l)
        if (want[l] >= 0 && colors[l] != want[l]) return false;
    return true;
}

// Per-cell candidate masks after boundary conditions, pins and column
// symbols are applied.
std::vector<uint64_t> build_domains(const LayeredTileSet& sys, const Masks& m, int w, int h,
                                    const BoundaryCondition& bc, bool torus = false) {
    std::vector<uint64_t> dom(static_cast<size_t>(w) * h * m.words);
    for (int cell = 0; cell < w * h; ++cell)
        std::copy(m.full.begin(), m.full.end(), dom.begin() + static_cast<size_t>(cell) * m.words);

    auto restrict_cell = [&](int x, int y, const std::function<bool(int)>& keep) {
        uint64_t* d = dom.data() + (static_cast<size_t>(y) * w + x) * m.words;
        for (int ci = 0; ci < m.nc; ++ci)
            if ((d[ci >> 6] >> (ci & 63)) & 1)
                if (!keep(ci)) d[ci >> 6] &= ~(1ull << (ci & 63));
    };

    for (int x = 0; x < w; ++x) {
        if (bc.south)
            restrict_cell(x, 0, [&](int ci) { return tuple_matches(sys.south_colors(ci), (*bc.south)[x]); });
        if (bc.north)
            restrict_cell(x, h - 1, [&](int ci) { return tuple_matches(sys.north_colors(ci), (*bc.north)[x]); });
    }
    for (int y = 0; y < h; ++y) {
        if (bc.west)
            restrict_cell(0, y, [&](int ci) { return tuple_matches(sys.west_colors(ci), (*bc.west)[y]); });
        if (bc.east)
            restrict_cell(w - 1, y, [&](int ci) { return tuple_matches(sys.east_colors(ci), (*bc.east)[y]); });
    }
    if (bc.column_symbols)
        for (int x = 0; x < w; ++x) {
            int s = (*bc.column_symbols)[x];
            if (s < 0) continue;
            for (int y = 0; y < h; ++y)
                restrict_cell(x, y, [&](int ci) { return sys.composites[ci].sym == s; });
        }
    for (const auto& [pos, ci] : bc.pins) {
        uint64_t* d = dom.data() + (static_cast<size_t>(pos.second) * w + pos.first) * m.words;
        std::fill(d, d + m.words, 0);
        d[ci >> 6] |= 1ull << (ci & 63);
    }
    propagate_domains(m, w, h, torus, dom);
    return dom;
}

struct Search {
    const LayeredTileSet& sys;
    const Masks& m;
    int w, h;
    bool torus;
    const std::vector<uint64_t>& dom;
    uint64_t node_guard;
    std::atomic<uint64_t>* nodes = nullptr;  // shared across parallel branches
    uint64_t local_nodes = 0;                // batched into the shared counter

    std::vector<int> grid;
    std::vector<uint64_t> scratch;

    Search(const LayeredTileSet& s, const Masks& mm, int w_, int h_, bool torus_,
           const std::vector<uint64_t>& dom_, uint64_t guard, std::atomic<uint64_t>* nd)
        : sys(s), m(mm), w(w_), h(h_), torus(torus_), dom(dom_), node_guard(guard), nodes(nd) {
        grid.assign(static_cast<size_t>(w) * h, -1);
        scratch.assign(m.words, 0);
    }

    void count_node() {
        if (!nodes) return;
        if (++local_nodes < 4096) return;
        if (nodes->fetch_add(local_nodes, std::memory_order_relaxed) + local_nodes >= node_guard)
            throw GuardExceeded("search node guard exceeded");
        local_nodes = 0;
    }

    bool wrap_ok(int ci, int x, int y) const {
        if (!torus) return true;
        if (x == w - 1) {
            int partner = w == 1 ? ci : grid[static_cast<size_t>(y) * w];
            if (!sys.horizontal_match(ci, partner)) return false;
        }
        if (y == h - 1) {
            int partner = h == 1 ? ci : grid[x];
            if (!sys.vertical_match(ci, partner)) return false;
        }
        return true;
    }

    // fn(grid) on every completion; returns false to stop the search.
    bool run(int cell, const std::function<bool(const std::vector<int>&)>& fn) {
        if (cell == w * h) return fn(grid);
        count_node();
        int y = cell / w, x = cell % w;
        const uint64_t* d = dom.data() + static_cast<size_t>(cell) * m.words;
        std::vector<uint64_t> allowed(d, d + m.words);
        if (x > 0) {
            const uint64_t* e = m.east.data() + static_cast<size_t>(grid[cell - 1]) * m.words;
            for (int i = 0; i < m.words; ++i) allowed[i] &= e[i];
        }
        if (y > 0) {
            const uint64_t* n = m.north.data() + static_cast<size_t>(grid[cell - w]) * m.words;
            for (int i = 0; i < m.words; ++i) allowed[i] &= n[i];
        }
        for (int word = 0; word < m.words; ++word) {
            uint64_t bits = allowed[word];
            while (bits) {
                int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                int ci = (word << 6) | b;
                if (!wrap_ok(ci, x, y)) continue;
                grid[cell] = ci;
                if (!run(cell + 1, fn)) return false;
            }
        }
        grid[cell] = -1;
        return true;
    }
};

Tiling make_tiling(int w, int h, Topology topo, const std::vector<int>& grid) {
    Tiling t;
    t.width = w;
    t.height = h;
    t.topology = topo;
    t.cells = grid;
    return t;
}

int max_threads(const SolveOptions& opts) {
#ifdef _OPENMP
    return opts.threads > 0 ? opts.threads : omp_get_max_threads();
#else
    (void)opts;
    return 1;
#endif
}

std::vector<int> first_cell_candidates(const Masks& m, const std::vector<uint64_t>& dom) {
    std::vector<int> out;
    for (int ci = 0; ci < m.nc; ++ci)
        if ((dom[ci >> 6] >> (ci & 63)) & 1) out.push_back(ci);
    return out;
}

}  // namespace

void BoundaryCondition::validate(const LayeredTileSet& sys, int w, int h) const {
    auto check_len = [&](const std::optional<std::vector<std::vector<int>>>& side, int want,
                         const char* name) {
        if (side && static_cast<int>(side->size()) != want)
            throw std::invalid_argument(std::string("boundary side '") + name +
                                        "' has wrong length");
        if (side)
            for (const auto& tup : *side)
                if (static_cast<int>(tup.size()) != sys.num_layers())
                    throw std::invalid_argument(std::string("boundary tuple arity on '") + name +
                                                "'");
    };
    check_len(north, w, "north");
    check_len(south, w, "south");
    check_len(east, h, "east");
    check_len(west, h, "west");
    for (const auto& [pos, ci] : pins) {
        if (pos.first < 0 || pos.first >= w || pos.second < 0 || pos.second >= h)
            throw std::invalid_argument("pin outside window");
        if (ci < 0 || ci >= sys.num_composites())
            throw std::invalid_argument("pin references bad composite");
    }
    if (column_symbols) {
        if (static_cast<int>(column_symbols->size()) != w)
            throw std::invalid_argument("cols line has wrong length");
        if (!sys.column_symbols)
            throw std::invalid_argument("cols given but system has no symbol layer");
    }
}

BoundaryCondition parse_bc(const LayeredTileSet& sys, const std::string& text, int w, int h) {
    BoundaryCondition bc;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto parse_side = [&](std::istringstream& ls) {
        std::vector<std::vector<int>> side;
        std::string tok;
        while (ls >> tok) {
            std::vector<int> tup;
            if (tok == "-") {
                tup.assign(sys.num_layers(), -1);
            } else {
                std::string cur;
                for (char c : tok + "/") {
                    if (c == '/') {
                        tup.push_back(cur == "-" ? -1 : std::stoi(cur));
                        cur.clear();
                    } else {
                        cur += c;
                    }
                }
                if (static_cast<int>(tup.size()) != sys.num_layers())
                    throw ParseError("boundary tuple arity mismatch", lineno);
            }
            side.push_back(tup);
        }
        return side;
    };
    while (std::getline(in, line)) {
        ++lineno;
        size_t hsh = line.find('#');
        if (hsh != std::string::npos) line.erase(hsh);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "north:") bc.north = parse_side(ls);
        else if (kw == "south:") bc.south = parse_side(ls);
        else if (kw == "east:") bc.east = parse_side(ls);
        else if (kw == "west:") bc.west = parse_side(ls);
        else if (kw == "cols:") {
            std::vector<int> cols;
            std::string tok;
            while (ls >> tok) {
                if (tok == "-") cols.push_back(-1);
                else {
                    if (!sys.column_symbols) throw ParseError("cols without symbol layer", lineno);
                    int s = sys.column_symbols->index_of(tok);
                    if (s < 0) throw ParseError("unknown symbol '" + tok + "'", lineno);
                    cols.push_back(s);
                }
            }
            bc.column_symbols = cols;
        } else if (kw == "pin") {
            int x, y;
            std::string tup;
            if (!(ls >> x >> y >> tup)) throw ParseError("pin needs x y (labels)", lineno);
            if (tup.size() < 2 || tup.front() != '(' || tup.back() != ')')
                throw ParseError("pin tuple must be (label,...)", lineno);
            std::vector<std::string> parts;
            std::string cur;
            for (char c : tup.substr(1, tup.size() - 2)) {
                if (c == ',') {
                    parts.push_back(cur);
                    cur.clear();
                } else cur += c;
            }
            parts.push_back(cur);
            CompositeTile c;
            size_t at = 0;
            if (sys.column_symbols) {
                if (parts.empty()) throw ParseError("pin tuple too short", lineno);
                c.sym = sys.column_symbols->index_of(parts[0]);
                if (c.sym < 0) throw ParseError("unknown symbol '" + parts[0] + "'", lineno);
                at = 1;
            }
            if (parts.size() - at != static_cast<size_t>(sys.num_layers()))
                throw ParseError("pin tuple arity mismatch", lineno);
            for (int l = 0; l < sys.num_layers(); ++l) {
                int ti = sys.layers[l].index_of(parts[at + l]);
                if (ti < 0) throw ParseError("unknown label '" + parts[at + l] + "'", lineno);
                c.tile.push_back(ti);
            }
            int ci = sys.composite_index(c);
            if (ci < 0) throw ParseError("pinned tuple violates couplings", lineno);
            bc.pins[{x, y}] = ci;
        } else {
            throw ParseError("unknown boundary directive '" + kw + "'", lineno);
        }
    }
    bc.validate(sys, w, h);
    return bc;
}

PatternWindow Tiling::window(long long ox, long long oy) const {
    PatternWindow win(ox, oy, width, height);
    win.cells = cells;
    return win;
}

std::string serialize_tiling(const LayeredTileSet& sys, const Tiling& t) {
    std::ostringstream out;
    out << "tiling " << t.width << " " << t.height << " "
        << (t.topology == Topology::Torus ? "torus" : "rect") << " " << std::hex
        << system_hash(sys) << std::dec << "\n";
    for (int y = 0; y < t.height; ++y) {
        for (int x = 0; x < t.width; ++x) out << (x ? " " : "") << sys.composite_label(t.at(x, y));
        out << "\n";
    }
    return out.str();
}

Tiling parse_tiling(const LayeredTileSet& sys, const std::string& text) {
    std::istringstream in(text);
    std::string kw, topo, hash;
    Tiling t;
    in >> kw >> t.width >> t.height >> topo >> hash;
    if (kw != "tiling") throw ParseError("expected 'tiling' header", 1);
    t.topology = topo == "torus" ? Topology::Torus : Topology::Rect;
    std::ostringstream want;
    want << std::hex << system_hash(sys);
    if (hash != want.str())
        throw std::runtime_error("tiling file hash does not match tile set");
    t.cells.assign(static_cast<size_t>(t.width) * t.height, -1);
    std::map<std::string, int> by_label;
    for (int ci = 0; ci < sys.num_composites(); ++ci) by_label[sys.composite_label(ci)] = ci;
    for (int y = 0; y < t.height; ++y)
        for (int x = 0; x < t.width; ++x) {
            std::string lbl;
            if (!(in >> lbl)) throw ParseError("tiling file truncated", 2 + y);
            auto it = by_label.find(lbl);
            if (it == by_label.end())
                throw ParseError("unknown composite label " + lbl, 2 + y);
            t.at(x, y) = it->second;
        }
    return t;
}

// --- solving ---------------------------------------------------------------

std::optional<Tiling> solve_rect_serial(const LayeredTileSet& sys, int w, int h,
                                        const BoundaryCondition& bc, const SolveOptions&) {
    bc.validate(sys, w, h);
    if (w == 0 || h == 0) return make_tiling(w, h, Topology::Rect, {});
    Masks m(sys);
    auto dom = build_domains(sys, m, w, h, bc);
    Search s(sys, m, w, h, false, dom, 0, nullptr);
    std::optional<Tiling> result;
    s.run(0, [&](const std::vector<int>& grid) {
        result = make_tiling(w, h, Topology::Rect, grid);
        return false;
    });
    return result;
}

std::optional<Tiling> solve_rect(const LayeredTileSet& sys, int w, int h,
                                 const BoundaryCondition& bc, const SolveOptions& opts) {
    bc.validate(sys, w, h);
    if (w == 0 || h == 0) return make_tiling(w, h, Topology::Rect, {});
    Masks m(sys);
    auto dom = build_domains(sys, m, w, h, bc);
    auto cands = first_cell_candidates(m, dom);
    if (w * h == 1) {
        for (int ci : cands) {
            Search s(sys, m, w, h, false, dom, 0, nullptr);
            std::optional<Tiling> r;
            s.grid[0] = ci;
            s.run(1, [&](const std::vector<int>& grid) {
                r = make_tiling(w, h, Topology::Rect, grid);
                return false;
            });
            if (r) return r;
        }
        return std::nullopt;
    }
    std::vector<std::optional<Tiling>> found(cands.size());
    std::atomic<int> best{static_cast<int>(cands.size())};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads(opts))
#endif
    for (size_t i = 0; i < cands.size(); ++i) {
        if (static_cast<int>(i) > best.load(std::memory_order_relaxed)) continue;
        Search s(sys, m, w, h, false, dom, 0, nullptr);
        s.grid[0] = cands[i];
        std::optional<Tiling> r;
        s.run(1, [&](const std::vector<int>& grid) {
            r = make_tiling(w, h, Topology::Rect, grid);
            return false;
        });
        if (r) {
            found[i] = std::move(r);
            int expect = best.load();
            while (static_cast<int>(i) < expect && !best.compare_exchange_weak(expect, static_cast<int>(i))) {}
        }
    }
    for (auto& f : found)
        if (f) return f;
    return std::nullopt;
}

static uint64_t count_exhaustive_impl(const LayeredTileSet& sys, int w, int h,
                                      const BoundaryCondition& bc, const SolveOptions& opts,
                                      bool parallel) {
    bc.validate(sys, w, h);
    if (w == 0 || h == 0) return 1;
    Masks m(sys);
    auto dom = build_domains(sys, m, w, h, bc);
    std::atomic<uint64_t> nodes{0};
    if (!parallel || w * h == 1) {
        Search s(sys, m, w, h, false, dom, opts.node_guard, &nodes);
        uint64_t count = 0;
        s.run(0, [&](const std::vector<int>&) {
            ++count;
            return true;
        });
        return count;
    }
    auto cands = first_cell_candidates(m, dom);
    uint64_t total = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : total) num_threads(max_threads(opts))
#endif
    for (size_t i = 0; i < cands.size(); ++i) {
        Search s(sys, m, w, h, false, dom, opts.node_guard, &nodes);
        s.grid[0] = cands[i];
        uint64_t count = 0;
        s.run(1, [&](const std::vector<int>&) {
            ++count;
            return true;
        });
        total += count;
    }
    return total;
}

uint64_t count_rect_exhaustive(const LayeredTileSet& sys, int w, int h,
                               const BoundaryCondition& bc, const SolveOptions& opts) {
    return count_exhaustive_impl(sys, w, h, bc, opts, true);
}

uint64_t count_rect_exhaustive_serial(const LayeredTileSet& sys, int w, int h,
                                      const BoundaryCondition& bc, const SolveOptions& opts) {
    return count_exhaustive_impl(sys, w, h, bc, opts, false);
}

uint64_t count_rect_transfer(const LayeredTileSet& sys, int w, int h, const BoundaryCondition& bc,
                             const SolveOptions& opts) {
    bc.validate(sys, w, h);
    if (w == 0 || h == 0) return 1;
    Masks m(sys);
    auto dom = build_domains(sys, m, w, h, bc);

    // Row states: horizontally admissible w-tuples, ignoring row-specific
    // domains (those are applied as per-row filters).
    std::vector<uint64_t> rowdom(static_cast<size_t>(w) * m.words, 0);
    for (int x = 0; x < w; ++x) {
        uint64_t* d = rowdom.data() + static_cast<size_t>(x) * m.words;
        std::fill(d, d + m.words, 0);
        for (int y = 0; y < h; ++y) {
            const uint64_t* cd = dom.data() + (static_cast<size_t>(y) * w + x) * m.words;
            for (int i = 0; i < m.words; ++i) d[i] |= cd[i];
        }
    }
    std::vector<std::vector<int>> states;
    std::vector<int> row(w);
    std::function<void(int)> gen = [&](int x) {
        if (x == w) {
            states.push_back(row);
            if (states.size() > opts.state_guard)
                throw GuardExceeded("transfer-matrix state guard exceeded");
            return;
        }
        const uint64_t* d = rowdom.data() + static_cast<size_t>(x) * m.words;
        std::vector<uint64_t> allowed(d, d + m.words);
        if (x > 0) {
            const uint64_t* e = m.east.data() + static_cast<size_t>(row[x - 1]) * m.words;
            for (int i = 0; i < m.words; ++i) allowed[i] &= e[i];
        }
        for (int word = 0; word < m.words; ++word) {
            uint64_t bits = allowed[word];
            while (bits) {
                int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                row[x] = (word << 6) | b;
                gen(x + 1);
            }
        }
    };
    gen(0);

    int ns = static_cast<int>(states.size());
    auto row_ok = [&](int y, const std::vector<int>& st) {
        for (int x = 0; x < w; ++x) {
            const uint64_t* cd = dom.data() + (static_cast<size_t>(y) * w + x) * m.words;
            int ci = st[x];
            if (!((cd[ci >> 6] >> (ci & 63)) & 1)) return false;
        }
        return true;
    };

    std::vector<uint64_t> vec(ns, 0);
    for (int s = 0; s < ns; ++s)
        if (row_ok(0, states[s])) vec[s] = 1;
    for (int y = 1; y < h; ++y) {
        std::vector<uint64_t> next(ns, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads(opts))
#endif
        for (int t = 0; t < ns; ++t) {
            if (!row_ok(y, states[t])) continue;
            uint64_t acc = 0;
            for (int s = 0; s < ns; ++s) {
                if (!vec[s]) continue;
                bool ok = true;
                for (int x = 0; x < w; ++x)
                    if (!sys.vertical_match(states[s][x], states[t][x])) {
                        ok = false;
                        break;
                    }
                if (ok) acc += vec[s];
            }
            next[t] = acc;
        }
        vec.swap(next);
    }
    uint64_t total = 0;
    for (uint64_t v : vec) total += v;
    return total;
}

uint64_t count_rect_profile(const LayeredTileSet& sys, int w, int h, const BoundaryCondition& bc,
                            const SolveOptions& opts) {
    bc.validate(sys, w, h);
    if (w == 0 || h == 0) return 1;
    Masks m(sys);
    auto dom = build_domains(sys, m, w, h, bc);
    std::map<std::vector<int>, uint64_t> cur;
    cur[{}] = 1;  // frontier: the last min(w, placed) cells, oldest first
    for (int cell = 0; cell < w * h; ++cell) {
        int y = cell / w, x = cell % w;
        const uint64_t* d = dom.data() + static_cast<size_t>(cell) * m.words;
        std::map<std::vector<int>, uint64_t> next;
        for (const auto& [front, count] : cur) {
            // y > 0 implies a full frontier, whose head is the south neighbor
            for (int word = 0; word < m.words; ++word) {
                uint64_t bits = d[word];
                while (bits) {
                    int b = __builtin_ctzll(bits);
                    bits &= bits - 1;
                    int ci = (word << 6) | b;
                    if (x > 0 && !sys.horizontal_match(front.back(), ci)) continue;
                    if (y > 0 && !sys.vertical_match(front[0], ci)) continue;
                    std::vector<int> nf = front;
                    nf.push_back(ci);
                    if (static_cast<int>(nf.size()) > w) nf.erase(nf.begin());
                    next[std::move(nf)] += count;
                }
            }
            if (next.size() > opts.state_guard)
                throw GuardExceeded("profile frontier guard exceeded");
        }
        cur.swap(next);
        if (cur.empty()) return 0;
    }
    uint64_t total = 0;
    for (const auto& [front, count] : cur) total += count;
    return total;
}

uint64_t count_rect(const LayeredTileSet& sys, int w, int h, const BoundaryCondition& bc,
                    const SolveOptions& opts) {
    // the transfer matrix is quadratic in row states; use it only while the
    // state space stays small, otherwise sweep the memoized profile
    try {
        SolveOptions small = opts;
        small.state_guard = std::min<uint64_t>(opts.state_guard, 4096);
        return count_rect_transfer(sys, w, h, bc, small);
    } catch (const GuardExceeded&) {
        return count_rect_profile(sys, w, h, bc, opts);
    }
}

void enumerate_rect_cb(const LayeredTileSet& sys, int w, int h, const BoundaryCondition& bc,
                       const std::function<bool(const Tiling&)>& fn, const SolveOptions& opts) {
    bc.validate(sys, w, h);
    if (w == 0 || h == 0) {
        fn(make_tiling(w, h, Topology::Rect, {}));
        return;
    }
    Masks m(sys);
    auto dom = build_domains(sys, m, w, h, bc);
    std::atomic<uint64_t> nodes{0};
    Search s(sys, m, w, h, false, dom, opts.node_guard, &nodes);
    s.run(0, [&](const std::vector<int>& grid) { return fn(make_tiling(w, h, Topology::Rect, grid)); });
}

std::vector<Tiling> enumerate_rect_serial(const LayeredTileSet& sys, int w, int h,
                                          const BoundaryCondition& bc, const SolveOptions& opts) {
    std::vector<Tiling> out;
    enumerate_rect_cb(sys, w, h, bc, [&](const Tiling& t) {
        out.push_back(t);
        return true;
    }, opts);
    return out;
}

std::vector<Tiling> enumerate_rect(const LayeredTileSet& sys, int w, int h,
                                   const BoundaryCondition& bc, const SolveOptions& opts) {
    bc.validate(sys, w, h);
    if (w == 0 || h == 0) return {make_tiling(w, h, Topology::Rect, {})};
    Masks m(sys);
    auto dom = build_domains(sys, m, w, h, bc);
    auto cands = first_cell_candidates(m, dom);
    std::vector<std::vector<Tiling>> chunks(cands.size());
    std::atomic<uint64_t> nodes{0};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads(opts))
#endif
    for (size_t i = 0; i < cands.size(); ++i) {
        Search s(sys, m, w, h, false, dom, opts.node_guard, &nodes);
        s.grid[0] = cands[i];
        s.run(1, [&](const std::vector<int>& grid) {
            chunks[i].push_back(make_tiling(w, h, Topology::Rect, grid));
            return true;
        });
    }
    std::vector<Tiling> out;
    for (auto& c : chunks)
        for (auto& t : c) out.push_back(std::move(t));
    return out;
}

std::optional<Tiling> solve_torus(const LayeredTileSet& sys, int w, int h,
                                  const SolveOptions& opts) {
    if (w < 1 || h < 1) throw std::invalid_argument("torus dimensions must be positive");
    Masks m(sys);
    BoundaryCondition none;
    auto dom = build_domains(sys, m, w, h, none, true);
    std::atomic<uint64_t> nodes{0};
    Search s(sys, m, w, h, true, dom, opts.node_guard, &nodes);
    std::optional<Tiling> result;
    s.run(0, [&](const std::vector<int>& grid) {
        result = make_tiling(w, h, Topology::Torus, grid);
        return false;
    });
    return result;
}

std::vector<Tiling> enumerate_torus(const LayeredTileSet& sys, int w, int h,
                                    const SolveOptions& opts) {
    if (w < 1 || h < 1) throw std::invalid_argument("torus dimensions must be positive");
    Masks m(sys);
    BoundaryCondition none;
    auto dom = build_domains(sys, m, w, h, none, true);
    auto cands = first_cell_candidates(m, dom);
    std::vector<std::vector<Tiling>> chunks(cands.size());
    std::atomic<uint64_t> nodes{0};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads(opts))
#endif
    for (size_t i = 0; i < cands.size(); ++i) {
        Search s(sys, m, w, h, true, dom, opts.node_guard, &nodes);
        if (!s.wrap_ok(cands[i], 0, 0)) continue;
        s.grid[0] = cands[i];
        s.run(1, [&](const std::vector<int>& grid) {
            chunks[i].push_back(make_tiling(w, h, Topology::Torus, grid));
            return true;
        });
    }
    std::vector<Tiling> out;
    for (auto& c : chunks)
        for (auto& t : c) out.push_back(std::move(t));
    return out;
}

bool is_nw_deterministic(const WangTileSet& ts) {
    std::set<std::pair<int, int>> seen;
    for (const auto& t : ts.tiles)
        if (!seen.insert({t.north, t.west}).second) return false;
    return true;
}

std::optional<Tiling> nw_propagate(const WangTileSet& ts, const std::vector<int>& north,
                                   const std::vector<int>& west) {
    if (!is_nw_deterministic(ts))
        throw std::invalid_argument("tile set is not NW-deterministic");
    std::map<std::pair<int, int>, int> lookup;
    for (int i = 0; i < ts.size(); ++i) lookup[{ts.tiles[i].north, ts.tiles[i].west}] = i;
    int w = static_cast<int>(north.size());
    int h = static_cast<int>(west.size());
    Tiling t;
    t.width = w;
    t.height = h;
    t.cells.assign(static_cast<size_t>(w) * h, -1);
    std::vector<int> need_n = north;
    for (int r = 0; r < h; ++r) {  // r-th row from the top
        int y = h - 1 - r;
        int need_w = west[r];
        for (int x = 0; x < w; ++x) {
            auto it = lookup.find({need_n[x], need_w});
            if (it == lookup.end()) return std::nullopt;
            const WangTile& tile = ts.tiles[it->second];
            t.at(x, y) = it->second;
            need_w = tile.east;
            need_n[x] = tile.south;
        }
    }
    return t;
}

Tiling unroll(const Tiling& torus, int k, int l) {
    Tiling t;
    t.width = torus.width * k;
    t.height = torus.height * l;
    t.topology = Topology::Rect;
    t.cells.resize(static_cast<size_t>(t.width) * t.height);
    for (int y = 0; y < t.height; ++y)
        for (int x = 0; x < t.width; ++x)
            t.at(x, y) = torus.at(x % torus.width, y % torus.height);
    return t;
}

}  // namespace tilelab
