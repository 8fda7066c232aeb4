#include "tilelab/core.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace tilelab {

Alphabet::Alphabet(std::vector<std::string> syms, std::optional<std::string> z)
    : symbols(std::move(syms)), zero(std::move(z)) {
    if (symbols.empty()) throw std::invalid_argument("alphabet must be nonempty");
    std::set<std::string> seen;
    for (const auto& s : symbols)
        if (!seen.insert(s).second)
            throw std::invalid_argument("duplicate alphabet symbol: " + s);
    if (zero && !has(*zero))
        throw std::invalid_argument("zero symbol not in alphabet: " + *zero);
}

int Alphabet::index_of(const std::string& s) const {
    for (int i = 0; i < size(); ++i)
        if (symbols[i] == s) return i;
    return -1;
}

int Alphabet::zero_index() const { return zero ? index_of(*zero) : -1; }

Alphabet Alphabet::binary() { return Alphabet({"0", "1"}, "0"); }

Word Word::parse(const Alphabet& a, const std::string& text) {
    bool single_char = std::all_of(a.symbols.begin(), a.symbols.end(),
                                   [](const std::string& s) { return s.size() == 1; });
    bool has_space = text.find_first_of(" \t") != std::string::npos;
    Word w;
    if (single_char && !has_space) {
        for (char c : text) {
            int i = a.index_of(std::string(1, c));
            if (i < 0) throw std::invalid_argument("symbol not in alphabet: " + std::string(1, c));
            w.syms.push_back(i);
        }
    } else {
        std::istringstream in(text);
        std::string tok;
        while (in >> tok) {
            int i = a.index_of(tok);
            if (i < 0) throw std::invalid_argument("symbol not in alphabet: " + tok);
            w.syms.push_back(i);
        }
    }
    return w;
}

std::string Word::str(const Alphabet& a) const {
    bool single_char = std::all_of(a.symbols.begin(), a.symbols.end(),
                                   [](const std::string& s) { return s.size() == 1; });
    std::string out;
    for (int i = 0; i < size(); ++i) {
        if (!single_char && i > 0) out += ' ';
        out += a.symbols[syms[i]];
    }
    return out;
}

BiInfiniteSpec::BiInfiniteSpec(Word l, Word m, Word r)
    : left(std::move(l)), mid(std::move(m)), right(std::move(r)) {
    if (left.empty() || right.empty())
        throw std::invalid_argument("left and right periods must be nonempty");
}

int eval_biinfinite(const BiInfiniteSpec& spec, long long i) {
    if (i >= 0 && i < spec.mid.size()) return spec.mid[static_cast<int>(i)];
    if (i >= spec.mid.size()) {
        long long k = (i - spec.mid.size()) % spec.right.size();
        return spec.right[static_cast<int>(k)];
    }
    // i < 0: read left cyclically from its right end
    long long k = (-i - 1) % spec.left.size();
    return spec.left[static_cast<int>(spec.left.size() - 1 - k)];
}

int WangTileSet::index_of(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
        if (tiles[i].label == label) return i;
    return -1;
}

void WangTileSet::add(const std::string& label, int e, int n, int w, int s) {
    tiles.push_back(WangTile{label, e, n, w, s});
}

void WangTileSet::validate() const {
    if (tiles.empty()) throw std::invalid_argument("tile set must be nonempty");
    std::set<std::string> seen;
    for (const auto& t : tiles) {
        if (!seen.insert(t.label).second)
            throw std::invalid_argument("duplicate tile label: " + t.label);
        for (int c : {t.east, t.north, t.west, t.south})
            if (c < 0 || c >= colors)
                throw std::invalid_argument("color out of declared universe in tile " + t.label);
    }
}

bool LayeredTileSet::passes_couplings(const CompositeTile& c) const {
    for (const auto& table : couplings) {
        std::vector<std::string> proj;
        proj.reserve(table.layer_refs.size());
        for (int ref : table.layer_refs) {
            if (ref == SYMBOL_LAYER)
                proj.push_back(column_symbols->symbols[c.sym]);
            else
                proj.push_back(layers[ref].tiles[c.tile[ref]].label);
        }
        if (!table.allowed.count(proj)) return false;
    }
    return true;
}

std::string LayeredTileSet::composite_label(int ci) const {
    const CompositeTile& c = composites[ci];
    std::string out = "(";
    bool first = true;
    if (column_symbols) {
        out += column_symbols->symbols[c.sym];
        first = false;
    }
    for (int l = 0; l < num_layers(); ++l) {
        if (!first) out += ',';
        out += layers[l].tiles[c.tile[l]].label;
        first = false;
    }
    out += ')';
    return out;
}

int LayeredTileSet::composite_index(const CompositeTile& c) const {
    for (int i = 0; i < num_composites(); ++i)
        if (composites[i] == c) return i;
    return -1;
}

std::vector<int> LayeredTileSet::east_colors(int ci) const {
    std::vector<int> out(num_layers());
    for (int l = 0; l < num_layers(); ++l) out[l] = layers[l].tiles[composites[ci].tile[l]].east;
    return out;
}
std::vector<int> LayeredTileSet::north_colors(int ci) const {
    std::vector<int> out(num_layers());
    for (int l = 0; l < num_layers(); ++l) out[l] = layers[l].tiles[composites[ci].tile[l]].north;
    return out;
}
std::vector<int> LayeredTileSet::west_colors(int ci) const {
    std::vector<int> out(num_layers());
    for (int l = 0; l < num_layers(); ++l) out[l] = layers[l].tiles[composites[ci].tile[l]].west;
    return out;
}
std::vector<int> LayeredTileSet::south_colors(int ci) const {
    std::vector<int> out(num_layers());
    for (int l = 0; l < num_layers(); ++l) out[l] = layers[l].tiles[composites[ci].tile[l]].south;
    return out;
}

bool LayeredTileSet::horizontal_match(int west_ci, int east_ci) const {
    const CompositeTile& a = composites[west_ci];
    const CompositeTile& b = composites[east_ci];
    for (int l = 0; l < num_layers(); ++l)
        if (layers[l].tiles[a.tile[l]].east != layers[l].tiles[b.tile[l]].west) return false;
    return true;
}

bool LayeredTileSet::vertical_match(int south_ci, int north_ci) const {
    const CompositeTile& a = composites[south_ci];
    const CompositeTile& b = composites[north_ci];
    if (a.sym != b.sym) return false;  // vertically constant symbol layer
    for (int l = 0; l < num_layers(); ++l)
        if (layers[l].tiles[a.tile[l]].north != layers[l].tiles[b.tile[l]].south) return false;
    return true;
}

LayeredTileSet product(std::vector<WangTileSet> layers,
                       std::vector<CouplingTable> couplings,
                       std::optional<Alphabet> column_symbols) {
    LayeredTileSet sys;
    sys.layers = std::move(layers);
    sys.couplings = std::move(couplings);
    sys.column_symbols = std::move(column_symbols);
    if (sys.layers.empty()) throw std::invalid_argument("product needs at least one layer");
    for (const auto& l : sys.layers) l.validate();

    // dangling references
    for (const auto& table : sys.couplings) {
        for (int ref : table.layer_refs) {
            if (ref == SYMBOL_LAYER) {
                if (!sys.column_symbols)
                    throw std::invalid_argument("coupling " + table.name +
                                                " references symbol layer but none declared");
            } else if (ref < 0 || ref >= sys.num_layers()) {
                throw std::invalid_argument("coupling " + table.name + " references bad layer");
            }
        }
        for (const auto& tuple : table.allowed) {
            if (tuple.size() != table.layer_refs.size())
                throw std::invalid_argument("coupling " + table.name + " tuple arity mismatch");
            for (size_t i = 0; i < tuple.size(); ++i) {
                int ref = table.layer_refs[i];
                if (ref == SYMBOL_LAYER) {
                    if (!sys.column_symbols->has(tuple[i]))
                        throw std::invalid_argument("coupling " + table.name +
                                                    ": unknown symbol " + tuple[i]);
                } else if (sys.layers[ref].index_of(tuple[i]) < 0) {
                    throw std::invalid_argument("coupling " + table.name + ": unknown label " +
                                                tuple[i] + " in layer " + sys.layers[ref].name);
                }
            }
        }
    }

    int nsym = sys.column_symbols ? sys.column_symbols->size() : 0;
    std::vector<int> idx(sys.num_layers(), 0);
    for (int s = (nsym ? 0 : -1); s < nsym; ++s) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            CompositeTile c;
            c.sym = nsym ? s : -1;
            c.tile = idx;
            if (sys.passes_couplings(c)) sys.composites.push_back(c);
            int l = sys.num_layers() - 1;
            while (l >= 0 && ++idx[l] == sys.layers[l].size()) idx[l--] = 0;
            if (l < 0) break;
        }
        if (!nsym) break;
    }
    if (sys.composites.empty())
        throw std::runtime_error("empty composite set: couplings admit no tuple");
    return sys;
}

LayeredTileSet single_layer(WangTileSet ts) {
    return product({std::move(ts)}, {});
}

bool PatternWindow::filled() const {
    return std::all_of(cells.begin(), cells.end(), [](int c) { return c != HOLE; });
}

bool locally_admissible(const LayeredTileSet& system, const PatternWindow& window) {
    if (!window.filled()) throw std::invalid_argument("window has holes");
    for (int y = 0; y < window.height; ++y)
        for (int x = 0; x < window.width; ++x) {
            if (x + 1 < window.width &&
                !system.horizontal_match(window.at(x, y), window.at(x + 1, y)))
                return false;
            if (y + 1 < window.height &&
                !system.vertical_match(window.at(x, y), window.at(x, y + 1)))
                return false;
        }
    return true;
}

// --- file grammar -----------------------------------------------------------

namespace {

struct LineLexer {
    std::istringstream in;
    int lineno = 0;
    std::string line;

    explicit LineLexer(const std::string& text) : in(text) {}
    bool next() {
        while (std::getline(in, line)) {
            ++lineno;
            size_t h = line.find('#');
            if (h != std::string::npos) line.erase(h);
            size_t b = line.find_last_not_of(" \t\r");
            if (b == std::string::npos) continue;
            line.erase(b + 1);
            return true;
        }
        return false;
    }
};

int parse_int(const std::string& tok, int lineno) {
    try {
        size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ParseError("expected integer, got '" + tok + "'", lineno);
    }
}

// tile <label>: <E> <N> <W> <S>
void parse_tile_line(const std::string& line, int lineno, WangTileSet& ts) {
    std::istringstream ls(line);
    std::string kw, label;
    ls >> kw >> label;
    if (label.empty() || label.back() != ':')
        throw ParseError("expected 'tile <label>:'", lineno);
    label.pop_back();
    if (ts.index_of(label) >= 0) throw ParseError("duplicate tile label '" + label + "'", lineno);
    std::string e, n, w, s, extra;
    if (!(ls >> e >> n >> w >> s)) throw ParseError("expected four edge colors", lineno);
    if (ls >> extra) throw ParseError("trailing tokens after tile edges", lineno);
    WangTile t{label, parse_int(e, lineno), parse_int(n, lineno), parse_int(w, lineno),
               parse_int(s, lineno)};
    for (int c : {t.east, t.north, t.west, t.south})
        if (c < 0 || c >= ts.colors)
            throw ParseError("color out of declared universe in tile '" + label + "'", lineno);
    ts.tiles.push_back(t);
}

std::vector<std::string> split_tuple(const std::string& tok, int lineno) {
    if (tok.size() < 2 || tok.front() != '(' || tok.back() != ')')
        throw ParseError("expected (label,...) tuple, got '" + tok + "'", lineno);
    std::vector<std::string> out;
    std::string body = tok.substr(1, tok.size() - 2);
    std::string cur;
    for (char c : body) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

WangTileSet parse_tileset(const std::string& text) {
    WangTileSet ts;
    bool have_colors = false;
    LineLexer lx(text);
    while (lx.next()) {
        std::istringstream ls(lx.line);
        std::string kw;
        ls >> kw;
        if (kw == "colors") {
            std::string k;
            ls >> k;
            ts.colors = parse_int(k, lx.lineno);
            have_colors = true;
        } else if (kw == "tile") {
            if (!have_colors) throw ParseError("'tile' before 'colors'", lx.lineno);
            parse_tile_line(lx.line, lx.lineno, ts);
        } else {
            throw ParseError("unknown directive '" + kw + "'", lx.lineno);
        }
    }
    ts.validate();
    return ts;
}

std::string serialize_tileset(const WangTileSet& ts) {
    std::ostringstream out;
    out << "colors " << ts.colors << "\n";
    for (const auto& t : ts.tiles)
        out << "tile " << t.label << ": " << t.east << " " << t.north << " " << t.west << " "
            << t.south << "\n";
    return out.str();
}

LayeredTileSet parse_layered(const std::string& text) {
    std::vector<WangTileSet> layers;
    std::vector<CouplingTable> couplings;
    std::optional<Alphabet> symbols;
    std::optional<std::string> zero;
    std::vector<std::string> sym_list;

    LineLexer lx(text);
    while (lx.next()) {
        std::istringstream ls(lx.line);
        std::string kw;
        ls >> kw;
        if (kw == "symbols") {
            std::string s;
            while (ls >> s) sym_list.push_back(s);
            if (sym_list.empty()) throw ParseError("empty symbols line", lx.lineno);
        } else if (kw == "zero") {
            std::string s;
            ls >> s;
            zero = s;
        } else if (kw == "layer") {
            std::string name;
            ls >> name;
            if (name.empty()) throw ParseError("layer needs a name", lx.lineno);
            WangTileSet ts;
            ts.name = name;
            layers.push_back(ts);
        } else if (kw == "colors") {
            if (layers.empty()) throw ParseError("'colors' before any 'layer'", lx.lineno);
            std::string k;
            ls >> k;
            layers.back().colors = parse_int(k, lx.lineno);
        } else if (kw == "tile") {
            if (layers.empty()) throw ParseError("'tile' before any 'layer'", lx.lineno);
            parse_tile_line(lx.line, lx.lineno, layers.back());
        } else if (kw == "couple") {
            CouplingTable table;
            ls >> table.name;
            std::string tok;
            bool refs_done = false;
            while (ls >> tok) {
                if (!refs_done) {
                    bool last_ref = !tok.empty() && tok.back() == ':';
                    std::string ref = last_ref ? tok.substr(0, tok.size() - 1) : tok;
                    if (ref == "A") {
                        table.layer_refs.push_back(SYMBOL_LAYER);
                    } else {
                        int li = -1;
                        for (size_t i = 0; i < layers.size(); ++i)
                            if (layers[i].name == ref) li = static_cast<int>(i);
                        if (li < 0) throw ParseError("unknown layer '" + ref + "'", lx.lineno);
                        table.layer_refs.push_back(li);
                    }
                    if (last_ref) refs_done = true;
                } else {
                    table.allowed.insert(split_tuple(tok, lx.lineno));
                }
            }
            if (!refs_done) throw ParseError("couple line missing ':'", lx.lineno);
            couplings.push_back(std::move(table));
        } else {
            throw ParseError("unknown directive '" + kw + "'", lx.lineno);
        }
    }
    if (!sym_list.empty()) symbols = Alphabet(sym_list, zero);
    return product(std::move(layers), std::move(couplings), std::move(symbols));
}

std::string serialize_layered(const LayeredTileSet& sys) {
    std::ostringstream out;
    if (sys.column_symbols) {
        out << "symbols";
        for (const auto& s : sys.column_symbols->symbols) out << " " << s;
        out << "\n";
        if (sys.column_symbols->zero) out << "zero " << *sys.column_symbols->zero << "\n";
    }
    for (const auto& layer : sys.layers) {
        out << "layer " << layer.name << "\n";
        out << "colors " << layer.colors << "\n";
        for (const auto& t : layer.tiles)
            out << "tile " << t.label << ": " << t.east << " " << t.north << " " << t.west << " "
                << t.south << "\n";
    }
    for (const auto& table : sys.couplings) {
        out << "couple " << table.name;
        for (size_t i = 0; i < table.layer_refs.size(); ++i) {
            int ref = table.layer_refs[i];
            out << " " << (ref == SYMBOL_LAYER ? std::string("A") : sys.layers[ref].name);
            if (i + 1 == table.layer_refs.size()) out << ":";
        }
        for (const auto& tuple : table.allowed) {
            out << " (";
            for (size_t i = 0; i < tuple.size(); ++i) out << (i ? "," : "") << tuple[i];
            out << ")";
        }
        out << "\n";
    }
    return out.str();
}

uint64_t system_hash(const LayeredTileSet& sys) {
    std::string s = serialize_layered(sys);
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace tilelab
