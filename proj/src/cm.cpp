#include "tilelab/cm.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <map>
#include <sstream>

namespace tilelab {

// --- machine, simulator ------------------------------------------------------

int CounterMachine::state_index(const std::string& name) const {
    for (size_t i = 0; i < states.size(); ++i)
        if (states[i] == name) return static_cast<int>(i);
    return -1;
}

void CounterMachine::validate() const {
    if (states.empty()) throw std::invalid_argument("machine needs states");
    if (k < 1) throw std::invalid_argument("machine needs at least one counter");
    if (initial < 0 || initial >= static_cast<int>(states.size()))
        throw std::invalid_argument("bad initial state");
    if (oracle_alphabet.has_value() != (oracle_counter >= 0))
        throw std::invalid_argument("oracle alphabet and oracle counter go together");
    if (oracle_counter >= k) throw std::invalid_argument("oracle counter out of range");
    for (const auto& r : rules) {
        if (r.from < 0 || r.from >= static_cast<int>(states.size()) || r.to < 0 ||
            r.to >= static_cast<int>(states.size()))
            throw std::invalid_argument("rule references unknown state");
        if (static_cast<int>(r.deltas.size()) != k)
            throw std::invalid_argument("rule delta arity mismatch");
        for (int d : r.deltas)
            if (d < -1 || d > 1) throw std::invalid_argument("deltas bounded by 1");
        if (r.order != "*" && static_cast<int>(r.order.size()) != k)
            throw std::invalid_argument("order pattern arity mismatch");
        if (r.zeros != "*" && static_cast<int>(r.zeros.size()) != k)
            throw std::invalid_argument("zero pattern arity mismatch");
        if (!oracle_alphabet && r.osym != "-" && r.osym != "*")
            throw std::invalid_argument("oracle symbol in rule of oracle-free machine");
    }
}

CounterMachine parse_machine(const std::string& text) {
    CounterMachine m;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::string> oracle_syms;
    while (std::getline(in, line)) {
        ++lineno;
        size_t h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "states") {
            std::string s;
            while (ls >> s) m.states.push_back(s);
        } else if (kw == "initial") {
            std::string s;
            ls >> s;
            m.initial = m.state_index(s);
            if (m.initial < 0) throw ParseError("unknown initial state", lineno);
        } else if (kw == "final") {
            std::string s;
            ls >> s;
            m.final = m.state_index(s);
            if (m.final < 0) throw ParseError("unknown final state", lineno);
        } else if (kw == "counters") {
            ls >> m.k;
        } else if (kw == "oracle") {
            std::string s;
            while (ls >> s) oracle_syms.push_back(s);
            if (oracle_syms.size() == 1 && oracle_syms[0] == "none") oracle_syms.clear();
        } else if (kw == "oraclecounter") {
            ls >> m.oracle_counter;
        } else if (kw == "bidir") {
            std::string s;
            ls >> s;
            m.bidirectional = s == "on";
        } else if (kw == "rule") {
            CmRule r;
            std::string from, to;
            if (!(ls >> from >> r.order >> r.zeros >> r.osym))
                throw ParseError("rule needs <q> <order> <zeros> <osym>: <q'> <deltas>", lineno);
            if (!r.osym.empty() && r.osym.back() == ':') {
                r.osym.pop_back();
            } else {
                std::string colon;
                if (!(ls >> colon) || colon != ":")
                    throw ParseError("rule needs ':' before the target state", lineno);
            }
            r.from = m.state_index(from);
            if (r.from < 0) throw ParseError("unknown source state", lineno);
            if (!(ls >> to)) throw ParseError("rule missing target state", lineno);
            r.to = m.state_index(to);
            if (r.to < 0) throw ParseError("unknown target state", lineno);
            std::string d;
            while (ls >> d) r.deltas.push_back(std::stoi(d));
            m.rules.push_back(r);
        } else {
            throw ParseError("unknown machine directive '" + kw + "'", lineno);
        }
    }
    if (!oracle_syms.empty()) {
        m.oracle_alphabet = Alphabet(oracle_syms);
        if (m.oracle_counter < 0) m.oracle_counter = 0;
    }
    if (m.final < 0) m.final = m.state_index("qf");
    m.validate();
    return m;
}

std::string serialize_machine(const CounterMachine& m) {
    std::ostringstream out;
    out << "states";
    for (const auto& s : m.states) out << " " << s;
    out << "\ninitial " << m.states[m.initial] << "\n";
    if (m.final >= 0) out << "final " << m.states[m.final] << "\n";
    out << "counters " << m.k << "\n";
    if (m.oracle_alphabet) {
        out << "oracle";
        for (const auto& s : m.oracle_alphabet->symbols) out << " " << s;
        out << "\noraclecounter " << m.oracle_counter << "\n";
    } else {
        out << "oracle none\n";
    }
    out << "bidir " << (m.bidirectional ? "on" : "off") << "\n";
    for (const auto& r : m.rules) {
        out << "rule " << m.states[r.from] << " " << r.order << " " << r.zeros << " " << r.osym
            << ": " << m.states[r.to];
        for (int d : r.deltas) out << " " << (d > 0 ? "+1" : d < 0 ? "-1" : "0");
        out << "\n";
    }
    return out.str();
}

std::string order_type(const std::vector<long long>& counters) {
    std::vector<long long> sorted(counters);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::string out;
    for (long long v : counters) {
        int rank = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v) -
                                    sorted.begin());
        out += static_cast<char>('1' + rank);
    }
    return out;
}

static bool rule_matches(const CounterMachine& m, const CmRule& r, int state,
                         const std::string& order, const std::string& zeros,
                         const std::string& osym) {
    if (r.from != state) return false;
    if (r.order != "*" && r.order != order) return false;
    if (r.zeros != "*" && r.zeros != zeros) return false;
    if (m.oracle_alphabet && r.osym != "*" && r.osym != osym) return false;
    return true;
}

std::vector<std::pair<int, MachineState>> step(const CounterMachine& m, const MachineState& s,
                                               const BiInfiniteSpec* oracle) {
    if (m.oracle_alphabet && !oracle)
        throw std::invalid_argument("machine requires an oracle tape");
    std::string order = order_type(s.counters);
    std::string zeros;
    for (long long v : s.counters) zeros += v == 0 ? 'Z' : '-';
    std::string osym = "-";
    if (m.oracle_alphabet) {
        long long n = s.counters[m.oracle_counter];
        osym = m.oracle_alphabet->symbols[eval_biinfinite(*oracle, n)];
    }
    std::vector<std::pair<int, MachineState>> out;
    for (size_t ri = 0; ri < m.rules.size(); ++ri) {
        const CmRule& r = m.rules[ri];
        if (!rule_matches(m, r, s.state, order, zeros, osym)) continue;
        MachineState nxt;
        nxt.state = r.to;
        nxt.counters = s.counters;
        nxt.step = s.step + 1;
        bool ok = true;
        for (int i = 0; i < m.k; ++i) {
            nxt.counters[i] += r.deltas[i];
            if (!m.bidirectional && nxt.counters[i] < 0) ok = false;
        }
        if (ok) out.push_back({static_cast<int>(ri), nxt});
    }
    return out;
}

RunTrace run(const CounterMachine& m, const BiInfiniteSpec* oracle, int max_steps) {
    RunTrace tr;
    MachineState s;
    s.state = m.initial;
    s.counters.assign(m.k, 0);
    tr.states.push_back(s);
    for (int i = 0; i < max_steps; ++i) {
        if (s.state == m.final) {
            tr.status = RunStatus::Accepted;
            return tr;
        }
        auto succ = step(m, s, oracle);
        if (succ.empty()) {
            tr.status = RunStatus::Rejected;
            return tr;
        }
        tr.rule_used.push_back(succ.front().first);
        s = succ.front().second;
        tr.states.push_back(s);
    }
    tr.status = s.state == m.final ? RunStatus::Accepted : RunStatus::Running;
    return tr;
}

bool exists_accepting(const CounterMachine& m, const BiInfiniteSpec* oracle, int max_steps) {
    std::deque<MachineState> queue;
    std::set<std::pair<int, std::vector<long long>>> seen;
    MachineState s;
    s.state = m.initial;
    s.counters.assign(m.k, 0);
    queue.push_back(s);
    seen.insert({s.state, s.counters});
    while (!queue.empty()) {
        MachineState cur = queue.front();
        queue.pop_front();
        if (cur.state == m.final) return true;
        if (cur.step >= max_steps) continue;
        for (auto& [ri, nxt] : step(m, cur, oracle)) {
            (void)ri;
            if (seen.insert({nxt.state, nxt.counters}).second) queue.push_back(nxt);
        }
    }
    return false;
}

// --- tile embedding ----------------------------------------------------------

namespace xm {

struct Interner {
    std::map<std::string, int> ids;
    int intern(const std::string& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(ids.size());
        ids.emplace(s, id);
        return id;
    }
};

inline std::string vec_key(const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += std::to_string(x) + ",";
    return s;
}

inline std::string cell_key(const ConeCell& c) {
    return std::to_string(static_cast<int>(c.role)) + "|" + std::to_string(c.q) + "|" +
           vec_key(c.pend) + "|" + vec_key(c.rec) + "|" + std::to_string(c.osym) + "|" +
           vec_key(c.flags) + "|" + std::to_string(c.o);
}

struct TPayload {
    int q = 0;
    std::vector<int> pend;   // -2 applied
    std::vector<int> femit;  // emitter's flags in the row below
    int claims = 0;          // bitmask: emitter flipped P->Z
};

struct WPayload {
    int q = 0;
    std::vector<int> rec;
    int osym = -1;
    std::vector<int> femit;
    int oemit = 0;
};

inline std::vector<int> apply_claims(const std::vector<int>& flags, int claims) {
    std::vector<int> out = flags;
    for (size_t i = 0; i < out.size(); ++i)
        if ((claims >> i) & 1) out[i] = 0;
    return out;
}

// No Z immediately west of a P on any counter layer.
inline bool shape_ok(const std::vector<int>& west, const std::vector<int>& east) {
    for (size_t i = 0; i < west.size(); ++i)
        if (west[i] == 0 && east[i] == 1) return false;
    return true;
}

inline std::optional<std::pair<std::vector<int>, std::vector<int>>> receive_t(
    const TPayload& pay, const std::vector<int>& below) {
    std::vector<int> pend = pay.pend;
    std::vector<int> flags = below;
    for (size_t i = 0; i < below.size(); ++i) {
        bool bh = pay.femit[i] == 1 && below[i] == 0;
        bool cl = (pay.claims >> i) & 1;
        if (cl) {
            if (!(pay.pend[i] == -1 && bh)) return std::nullopt;
            pend[i] = -2;
        } else if (bh) {
            if (pay.pend[i] == 1) {
                flags[i] = 1;
                pend[i] = -2;
            } else if (pay.pend[i] == -1) {
                return std::nullopt;
            }
        }
    }
    if (!shape_ok(apply_claims(pay.femit, pay.claims), flags)) return std::nullopt;
    return std::make_pair(pend, flags);
}

struct Gen {
    const CounterMachine m;
    bool with_halt;
    Interner colors;
    WangTileSet tiles;
    std::vector<CompiledMachine::Meta> meta;
    std::map<std::array<int, 4>, int> by_edges;
    int no = 1;
    int OUTV, GROW, APEX, CUT, OUTH, WALL, BORDER, BORDERH;

    Gen(const CounterMachine& mm, bool halt) : m(mm), with_halt(halt) {
        no = m.oracle_alphabet ? m.oracle_alphabet->size() : 1;
        OUTV = colors.intern("v!out");
        GROW = colors.intern("v!grow");
        APEX = colors.intern("v!apex");
        CUT = colors.intern("v!cut");
        OUTH = colors.intern("h!out");
        WALL = colors.intern("h!wall");
        BORDER = colors.intern("h!border");
        BORDERH = colors.intern("h!borderhalt");
        build();
    }

    int vcell(const ConeCell& c) { return colors.intern("v!" + cell_key(c)); }
    int lz(const std::vector<int>& f) { return colors.intern("h!L|" + vec_key(f)); }
    int rz(const std::vector<int>& f) { return colors.intern("h!R|" + vec_key(f)); }
    int t1(const TPayload& p) {
        return colors.intern("h!T1|" + std::to_string(p.q) + "|" + vec_key(p.pend) + "|" +
                             vec_key(p.femit) + "|" + std::to_string(p.claims));
    }
    int t2(const TPayload& p) {
        return colors.intern("h!T2|" + std::to_string(p.q) + "|" + vec_key(p.pend) + "|" +
                             vec_key(p.femit) + "|" + std::to_string(p.claims));
    }
    int tw(const WPayload& p) {
        return colors.intern("h!TW|" + std::to_string(p.q) + "|" + vec_key(p.rec) + "|" +
                             std::to_string(p.osym) + "|" + vec_key(p.femit) + "|" +
                             std::to_string(p.oemit));
    }
    int haltz(const std::vector<int>& f) { return colors.intern("h!HZ|" + vec_key(f)); }

    void emit(int e, int n, int w, int s, CompiledMachine::Meta mt) {
        std::array<int, 4> key{e, n, w, s};
        if (by_edges.count(key)) return;
        int idx = tiles.size();
        by_edges[key] = idx;
        tiles.add("t" + std::to_string(idx), e, n, w, s);
        meta.push_back(std::move(mt));
    }

    void emit_cell(int south, const ConeCell& c, int wcol, int ecol, bool apex = false,
                   bool halt_row = false, int westb = 0) {
        CompiledMachine::Meta mt;
        mt.apex = apex;
        mt.halt_row = halt_row;
        mt.west_boundaries = westb;
        mt.cell = c;
        emit(ecol, halt_row ? CUT : vcell(c), wcol, south, std::move(mt));
    }

    std::vector<std::vector<int>> all_flags() const {
        std::vector<std::vector<int>> out;
        for (int mask = 0; mask < (1 << m.k); ++mask) {
            std::vector<int> f(m.k);
            for (int i = 0; i < m.k; ++i) f[i] = (mask >> i) & 1;
            out.push_back(f);
        }
        return out;
    }

    std::vector<std::vector<int>> all_recs() const {
        std::vector<std::vector<int>> out{{}};
        std::function<void(int, std::vector<int>&)> go = [&](int used, std::vector<int>& cur) {
            for (int g = 1; g < (1 << m.k); ++g) {
                if (g & used) continue;
                cur.push_back(g);
                out.push_back(cur);
                go(used | g, cur);
                cur.pop_back();
            }
        };
        std::vector<int> cur;
        go(0, cur);
        return out;
    }

    std::vector<std::vector<int>> all_pends() const {
        std::set<std::vector<int>> set;
        for (const auto& r : m.rules)
            for (int mask = 0; mask < (1 << m.k); ++mask) {
                std::vector<int> p = r.deltas;
                for (int i = 0; i < m.k; ++i)
                    if ((mask >> i) & 1) p[i] = -2;
                set.insert(p);
            }
        return {set.begin(), set.end()};
    }

    std::string ordertype_of(const std::vector<int>& rec, int zeromask) const {
        int seen = zeromask;
        for (int g : rec) {
            if (g & seen) return "";
            seen |= g;
        }
        if (seen != (1 << m.k) - 1) return "";
        std::vector<int> rank(m.k, 0);
        int r = 1;
        if (zeromask) {
            for (int i = 0; i < m.k; ++i)
                if ((zeromask >> i) & 1) rank[i] = r;
            ++r;
        }
        for (auto it = rec.rbegin(); it != rec.rend(); ++it, ++r)
            for (int i = 0; i < m.k; ++i)
                if ((*it >> i) & 1) rank[i] = r;
        std::string s;
        for (int i = 0; i < m.k; ++i) s += static_cast<char>('0' + rank[i]);
        return s;
    }

    // applicable rules with their post-wall pend vectors and updated flags
    struct WallChoice {
        int rule = -1;
        std::vector<int> pend;
        std::vector<int> flags;
    };
    std::vector<WallChoice> wall_choices(const ConeCell& b) const {
        std::vector<WallChoice> out;
        int zeromask = 0;
        std::string zeros;
        for (int i = 0; i < m.k; ++i) {
            if (b.flags[i] == 0) zeromask |= 1 << i;
            zeros += b.flags[i] == 0 ? 'Z' : '-';
        }
        std::string order = ordertype_of(b.rec, zeromask);
        if (order.empty()) return out;
        std::string osym = "-";
        if (m.oracle_alphabet) {
            int obs = b.flags[m.oracle_counter] == 0 ? b.o : b.osym;
            if (obs < 0) return out;
            osym = m.oracle_alphabet->symbols[obs];
        }
        for (size_t ri = 0; ri < m.rules.size(); ++ri) {
            const CmRule& r = m.rules[ri];
            if (!rule_matches(m, r, b.q, order, zeros, osym)) continue;
            bool ok = true;
            for (int i = 0; i < m.k; ++i)
                if (r.deltas[i] == -1 && b.flags[i] == 0) ok = false;
            if (!ok) continue;
            WallChoice wc;
            wc.rule = static_cast<int>(ri);
            wc.pend = r.deltas;
            wc.flags = b.flags;
            for (int i = 0; i < m.k; ++i)
                if (r.deltas[i] == 1 && b.flags[i] == 0) {
                    wc.flags[i] = 1;
                    wc.pend[i] = -2;
                }
            out.push_back(std::move(wc));
        }
        return out;
    }

    void build() {
        auto flagsets = all_flags();
        auto recs = all_recs();
        auto pends = all_pends();
        int nstates = static_cast<int>(m.states.size());

        {
            CompiledMachine::Meta mo;
            mo.out = true;
            emit(OUTH, OUTV, OUTH, OUTV, mo);
            emit(WALL, OUTV, OUTH, OUTV, mo);
            emit(OUTH, GROW, BORDER, OUTV, mo);
            emit(OUTH, APEX, OUTH, OUTV, mo);
            if (with_halt) {
                emit(OUTH, OUTV, OUTH, CUT, mo);
                emit(OUTH, OUTV, BORDERH, OUTV, mo);
            }
        }
        for (int o = 0; o < no; ++o) {
            ConeCell c;
            c.role = ConeCell::HWALL;
            c.q = m.initial;
            c.flags.assign(m.k, 0);
            c.o = o;
            CompiledMachine::Meta mt;
            mt.apex = true;
            mt.cell = c;
            emit(BORDER, vcell(c), WALL, APEX, std::move(mt));
        }

        for (const auto& f : flagsets)
            for (int o = 0; o < no; ++o) {
                ConeCell L0{ConeCell::L, -1, {}, {}, -1, f, o};
                ConeCell R0{ConeCell::R, -1, {}, {}, -1, f, o};

                for (const auto& fw : flagsets) {
                    if (!shape_ok(fw, f)) continue;
                    emit_cell(vcell(L0), L0, lz(fw), lz(f));
                    emit_cell(vcell(R0), R0, rz(fw), rz(f));
                }
                emit_cell(vcell(L0), L0, WALL, lz(f));

                // above R: transit and mid landing
                for (const auto& pend : pends)
                    for (int q = 0; q < nstates; ++q)
                        for (const auto& fe : flagsets) {
                            if (!shape_ok(fe, f)) continue;
                            for (int cl = 0; cl < (1 << m.k); ++cl) {
                                TPayload pay{q, pend, fe, cl};
                                auto upd = receive_t(pay, f);
                                if (!upd) continue;
                                ConeCell c{ConeCell::L, -1, {}, {}, -1, upd->second, o};
                                int eligible = 0;
                                for (int i = 0; i < m.k; ++i)
                                    if (upd->first[i] == -1 && c.flags[i] == 1)
                                        eligible |= 1 << i;
                                for (int cl2 = 0;; cl2 = (cl2 - eligible) & eligible) {
                                    TPayload fwd{q, upd->first, f, cl2};
                                    ConeCell c2 = c;
                                    c2.flags = apply_claims(c.flags, cl2);
                                    emit_cell(vcell(R0), c2, t1(pay), t2(fwd));
                                    if (cl2 == eligible) break;
                                }
                                ConeCell hd{ConeCell::HE, q, upd->first, {}, -1, upd->second, o};
                                emit_cell(vcell(R0), hd, t2(pay), rz(hd.flags));
                            }
                        }

                // above HE: emit T1
                for (const auto& pend : pends)
                    for (int q = 0; q < nstates; ++q) {
                        ConeCell he{ConeCell::HE, q, pend, {}, -1, f, o};
                        int eligible = 0;
                        for (int i = 0; i < m.k; ++i)
                            if (pend[i] == -1 && f[i] == 1) eligible |= 1 << i;
                        for (int cl = 0;; cl = (cl - eligible) & eligible) {
                            TPayload pay{q, pend, f, cl};
                            ConeCell c{ConeCell::L, -1, {}, {}, -1, apply_claims(f, cl), o};
                            for (const auto& fw : flagsets) {
                                if (!shape_ok(fw, c.flags)) continue;
                                emit_cell(vcell(he), c, lz(fw), t1(pay));
                            }
                            if (cl == eligible) break;
                        }
                    }

                // above HW: become R, emit TW westward
                for (const auto& rec : recs)
                    for (int q = 0; q < nstates; ++q)
                        for (int osym = -1; osym < (m.oracle_alphabet ? no : 0); ++osym) {
                            ConeCell hw{ConeCell::HW, q, {}, rec, osym, f, o};
                            ConeCell c{ConeCell::R, -1, {}, {}, -1, f, o};
                            WPayload pay{q, rec, osym, f, o};
                            emit_cell(vcell(hw), c, tw(pay), rz(f));
                        }

                // above L: receive TW
                for (const auto& rec : recs)
                    for (int q = 0; q < nstates; ++q)
                        for (int osym = -1; osym < (m.oracle_alphabet ? no : 0); ++osym)
                            for (const auto& fe : flagsets)
                                for (int oe = 0; oe < no; ++oe) {
                                    if (!shape_ok(f, fe)) continue;
                                    int cross = 0;
                                    for (int i = 0; i < m.k; ++i)
                                        if (f[i] == 1 && fe[i] == 0) cross |= 1 << i;
                                    int used = 0;
                                    for (int g : rec) used |= g;
                                    if (cross & used) continue;
                                    std::vector<int> rec2 = rec;
                                    if (cross) rec2.push_back(cross);
                                    int osym2 = osym;
                                    if (m.oracle_alphabet && ((cross >> m.oracle_counter) & 1))
                                        osym2 = oe;
                                    WPayload pay{q, rec, osym, fe, oe};
                                    ConeCell c{ConeCell::HW, q, {}, rec2, osym2, f, o};
                                    for (const auto& fw : flagsets) {
                                        if (!shape_ok(fw, f)) continue;
                                        emit_cell(vcell(L0), c, lz(fw), tw(pay));
                                    }
                                    c.role = ConeCell::HWALL;
                                    emit_cell(vcell(L0), c, WALL, tw(pay));
                                }

                // above HWALL: the transition row (or the halting row)
                for (const auto& rec : recs)
                    for (int q = 0; q < nstates; ++q)
                        for (int osym = -1; osym < (m.oracle_alphabet ? no : 0); ++osym) {
                            ConeCell b{ConeCell::HWALL, q, {}, rec, osym, f, o};
                            int zeromask = 0;
                            for (int i = 0; i < m.k; ++i)
                                if (f[i] == 0) zeromask |= 1 << i;
                            for (const auto& wc : wall_choices(b)) {
                                if (with_halt && m.rules[wc.rule].to == m.final) {
                                    ConeCell c{ConeCell::HALTW, -1, {}, {}, -1, f, o};
                                    emit_cell(vcell(b), c, WALL, haltz(f), false, true,
                                              zeromask);
                                    continue;
                                }
                                TPayload pay{m.rules[wc.rule].to, wc.pend, f, 0};
                                int eligible = 0;
                                for (int i = 0; i < m.k; ++i)
                                    if (wc.pend[i] == -1 && wc.flags[i] == 1)
                                        eligible |= 1 << i;
                                for (int cl = 0;; cl = (cl - eligible) & eligible) {
                                    TPayload p2 = pay;
                                    p2.claims = cl;
                                    ConeCell c{ConeCell::L, -1, {}, {}, -1,
                                               apply_claims(wc.flags, cl), o};
                                    emit_cell(vcell(b), c, WALL, t1(p2));
                                    if (cl == eligible) break;
                                }
                            }
                        }

                // halt row east of the halting wall cell
                if (with_halt)
                    for (const auto& fe : flagsets) {
                        if (!shape_ok(fe, f)) continue;
                        int westb = 0;
                        for (int i = 0; i < m.k; ++i)
                            if (fe[i] == 1 && f[i] == 0) westb |= 1 << i;
                        ConeCell c{ConeCell::HALTC, -1, {}, {}, -1, f, o};
                        emit_cell(vcell(R0), c, haltz(fe), haltz(f), false, true, westb);
                    }
            }

        // grown border cell (below outside)
        for (int o = 0; o < no; ++o) {
            std::vector<int> zf(m.k, 0);
            for (const auto& fw : flagsets) {
                if (!shape_ok(fw, zf)) continue;
                ConeCell c{ConeCell::R, -1, {}, {}, -1, zf, o};
                emit_cell(GROW, c, rz(fw), BORDER);
            }
            for (const auto& pend : pends)
                for (int q = 0; q < static_cast<int>(m.states.size()); ++q)
                    for (const auto& fe : flagsets)
                        for (int cl = 0; cl < (1 << m.k); ++cl) {
                            TPayload pay{q, pend, fe, cl};
                            auto upd = receive_t(pay, zf);
                            if (!upd) continue;
                            bool clean = true;
                            for (int i = 0; i < m.k; ++i)
                                if (upd->first[i] == 1 || upd->first[i] == -1) clean = false;
                            if (!clean) continue;
                            ConeCell hd{ConeCell::HW, q, {}, {}, -1, upd->second, o};
                            emit_cell(GROW, hd, t2(pay), BORDER);
                            emit_cell(GROW, hd, t1(pay), BORDER);
                        }
            if (with_halt)
                for (const auto& fe : flagsets) {
                    int westb = 0;
                    for (int i = 0; i < m.k; ++i)
                        if (fe[i] == 1) westb |= 1 << i;
                    ConeCell hc{ConeCell::HALTC, -1, {}, {}, -1, zf, o};
                    emit_cell(GROW, hc, haltz(fe), BORDERH, false, true, westb);
                }
        }
        tiles.name = "cone";
        tiles.colors = static_cast<int>(colors.ids.size());
        tiles.validate();
    }
};

}  // namespace xm

struct XmImplHolder {
    std::shared_ptr<xm::Gen> gen;
};

CompiledMachine compile_to_tiles(const CounterMachine& m) {
    m.validate();
    if (m.bidirectional)
        throw std::invalid_argument("bidirectional cone compilation is not supported");
    int size_estimate = static_cast<int>(m.states.size()) *
                        std::max<int>(1, static_cast<int>(m.rules.size())) * (1 << m.k);
    if (size_estimate > CM_COMPILE_GUARD)
        throw GuardExceeded("machine too large for the compile guard");
    CompiledMachine out;
    out.machine = m;
    out.with_halt = false;
    auto gen = std::make_shared<xm::Gen>(m, false);
    out.meta = gen->meta;
    out.system = single_layer(gen->tiles);
    out.impl_holder = std::make_shared<XmImplHolder>(XmImplHolder{gen});
    return out;
}

// --- embedding ----------------------------------------------------------------
//
// The cone quadruples in width per machine step (speed-2/speed-1 sweeps on
// a border that grows one cell per row), so windows are built by streaming
// rows of a sparse simulation: per row only the border, the head and the
// counter boundaries are tracked, and cells inside the (possibly clipped)
// window are reconstructed analytically.

namespace {

struct RowState {
    long long e = 0;   // border column
    long long hx = 0;  // head position
    int dir = 0;       // 0 at the wall, 1 east, 2 west
    int q = 0;
    std::vector<int> pend;  // dir == 1
    std::vector<int> rec;   // dir in {0, 2}
    int osym = -1;
    std::vector<long long> v;  // counter values
};

struct EdgeInfo {
    long long t1_edge = -1, t2_edge = -1, tw_edge = -1;
    xm::TPayload t1, t2;
    xm::WPayload tw;
};

}  // namespace

PatternWindow embed_trace(const CompiledMachine& cm, const RunTrace& trace,
                          const BiInfiniteSpec* oracle, long long max_cols,
                          long long max_rows) {
    if (trace.states.empty()) throw std::invalid_argument("empty trace");
    xm::Gen& gen = *cm.impl_holder->gen;
    const CounterMachine& m = cm.machine;
    const int k = m.k;

    auto osym_at = [&](long long pos) { return oracle ? eval_biinfinite(*oracle, pos) : 0; };

    // first pass: row count (and the final width) of the cone
    long long rows_needed = 1;
    {
        RowState r;
        r.dir = 0;
        r.q = m.initial;
        r.v.assign(k, 0);
        size_t wall_rows = 1, consumed = 0;
        while (wall_rows < trace.states.size()) {
            if (rows_needed > max_rows)
                throw std::runtime_error("trace too long for a representable cone");
            long long e_new = r.e + 1;
            if (r.dir == 2 && r.hx > 0) {
                r.hx -= 1;
                if (r.hx == 0) {
                    r.dir = 0;
                    ++wall_rows;
                }
            } else if (r.dir == 0 || r.dir == 1) {
                long long start = r.dir == 0 ? 0 : r.hx;
                if (r.dir == 0) ++consumed;
                long long tgt = std::min(start + 2, e_new);
                r.hx = tgt;
                r.dir = tgt == e_new ? 2 : 1;
            }
            r.e = e_new;
            ++rows_needed;
        }
        (void)consumed;
    }

    long long cols = max_cols < 0 ? rows_needed : std::min(rows_needed, max_cols);
    PatternWindow win(-1, -1, static_cast<int>(cols) + 1, static_cast<int>(rows_needed) + 1);

    auto flags_of = [&](const std::vector<long long>& v, long long x) {
        std::vector<int> f(k);
        for (int i = 0; i < k; ++i) f[i] = x < v[i] ? 1 : 0;
        return f;
    };

    auto content_at = [&](const RowState& r, long long x) {
        ConeCell c;
        c.flags = flags_of(r.v, x);
        c.o = osym_at(x);
        if (x == r.hx) {
            if (r.dir == 0) {
                c.role = ConeCell::HWALL;
                c.q = r.q;
                c.rec = r.rec;
                c.osym = r.osym;
            } else if (r.dir == 1) {
                c.role = ConeCell::HE;
                c.q = r.q;
                c.pend = r.pend;
            } else {
                c.role = ConeCell::HW;
                c.q = r.q;
                c.rec = r.rec;
                c.osym = r.osym;
            }
        } else {
            c.role = x < r.hx ? ConeCell::L : ConeCell::R;
        }
        return c;
    };

    // horizontal edge color at position j (west edge of cell j) in a row
    auto edge_color = [&](const RowState& r, const EdgeInfo& ei, long long j) {
        if (j == 0) return gen.WALL;
        if (j == r.e + 1) return gen.BORDER;
        if (j > r.e + 1) return gen.OUTH;
        if (j == ei.t1_edge) return gen.t1(ei.t1);
        if (j == ei.t2_edge) return gen.t2(ei.t2);
        if (j == ei.tw_edge) return gen.tw(ei.tw);
        long long head = r.hx;
        if (j <= head) return gen.lz(flags_of(r.v, j - 1));
        return gen.rz(flags_of(r.v, j - 1));
    };

    // apex row
    RowState cur;
    cur.dir = 0;
    cur.q = m.initial;
    cur.v.assign(k, 0);
    {
        win.at(0, 0) = gen.by_edges.at({gen.OUTH, gen.OUTV, gen.OUTH, gen.OUTV});
        for (int xc = 1; xc <= cols; ++xc)
            win.at(xc, 0) = xc == 1
                                ? gen.by_edges.at({gen.OUTH, gen.APEX, gen.OUTH, gen.OUTV})
                                : gen.by_edges.at({gen.OUTH, gen.OUTV, gen.OUTH, gen.OUTV});
        ConeCell apex = content_at(cur, 0);
        win.at(0, 1) = gen.by_edges.at({gen.WALL, gen.OUTV, gen.OUTH, gen.OUTV});
        win.at(1, 1) = gen.by_edges.at({gen.BORDER, gen.vcell(apex), gen.WALL, gen.APEX});
        for (int xc = 2; xc <= cols; ++xc)
            win.at(xc, 1) = xc == 2
                                ? gen.by_edges.at({gen.OUTH, gen.GROW, gen.BORDER, gen.OUTV})
                                : gen.by_edges.at({gen.OUTH, gen.OUTV, gen.OUTH, gen.OUTV});
    }

    size_t wall_rows = 1, consumed = 0;
    long long t = 1;
    while (wall_rows < trace.states.size()) {
        RowState nxt = cur;
        EdgeInfo ei;
        long long e_new = cur.e + 1;
        nxt.e = e_new;

        if (cur.dir == 2 && cur.hx > 0) {
            // west sweep
            long long tgt = cur.hx - 1;
            int cross = 0;
            for (int i = 0; i < k; ++i)
                if (cur.v[i] == cur.hx) cross |= 1 << i;
            nxt.hx = tgt;
            nxt.dir = tgt == 0 ? 0 : 2;
            if (cross) nxt.rec.push_back(cross);
            if (m.oracle_alphabet && ((cross >> m.oracle_counter) & 1))
                nxt.osym = osym_at(cur.hx);
            ei.tw_edge = cur.hx;
            ei.tw = {cur.q, cur.rec, cur.osym, flags_of(cur.v, cur.hx),
                     osym_at(cur.hx)};
        } else {
            // east sweep, or the transition row above a wall head
            long long start;
            std::vector<int> pend;
            int q2;
            if (cur.dir == 0) {
                const CmRule& rule = m.rules.at(trace.rule_used.at(consumed));
                ++consumed;
                q2 = rule.to;
                pend = rule.deltas;
                start = 0;
                for (int i = 0; i < k; ++i)
                    if (rule.deltas[i] == 1 && cur.v[i] == 0) {
                        nxt.v[i] = 1;
                        pend[i] = -2;
                    }
                nxt.rec.clear();
                nxt.osym = -1;
            } else {
                q2 = cur.q;
                pend = cur.pend;
                start = cur.hx;
            }
            long long tgt = std::min(start + 2, e_new);
            // covered edges start+1 .. tgt with payload snapshots
            for (long long j = start + 1; j <= tgt; ++j) {
                xm::TPayload pay{q2, pend, flags_of(cur.v, j - 1), 0};
                for (int i = 0; i < k; ++i) {
                    if (cur.v[i] != j) continue;
                    if (pend[i] == 1) {
                        nxt.v[i] = cur.v[i] + 1;
                        pend[i] = -2;
                    } else if (pend[i] == -1) {
                        pay.claims |= 1 << i;
                        nxt.v[i] = cur.v[i] - 1;
                        pend[i] = -2;
                    }
                }
                if (j == start + 1) {
                    ei.t1_edge = j;
                    ei.t1 = pay;
                } else {
                    ei.t2_edge = j;
                    ei.t2 = pay;
                }
            }
            nxt.hx = tgt;
            nxt.q = q2;
            if (tgt == e_new) {
                nxt.dir = 2;
                nxt.rec.clear();
                nxt.osym = -1;
                for (int i = 0; i < k; ++i)
                    if (pend[i] == 1 || pend[i] == -1)
                        throw std::runtime_error("embed: pending delta at the border");
                nxt.pend.clear();
            } else {
                nxt.dir = 1;
                nxt.pend = pend;
            }
        }
        if (nxt.dir == 0) ++wall_rows;

        // window row t+1 (window y = t + 1), configuration row index t
        int yc = static_cast<int>(t) + 1;
        win.at(0, yc) = gen.by_edges.at({gen.WALL, gen.OUTV, gen.OUTH, gen.OUTV});
        for (int xc = 1; xc <= cols; ++xc) {
            long long x = xc - 1;
            int tile;
            if (x > nxt.e) {
                tile = x == nxt.e + 1
                           ? gen.by_edges.at({gen.OUTH, gen.GROW, gen.BORDER, gen.OUTV})
                           : gen.by_edges.at({gen.OUTH, gen.OUTV, gen.OUTH, gen.OUTV});
            } else {
                int south = x > cur.e ? gen.GROW : gen.vcell(content_at(cur, x));
                std::array<int, 4> key{edge_color(nxt, ei, x + 1), gen.vcell(content_at(nxt, x)),
                                       edge_color(nxt, ei, x), south};
                auto it = gen.by_edges.find(key);
                if (it == gen.by_edges.end())
                    throw std::runtime_error("embed produced a cell with no matching tile");
                tile = it->second;
            }
            win.at(xc, yc) = tile;
        }
        cur = std::move(nxt);
        ++t;
    }
    return win;
}

RunTrace decode_trace(const CompiledMachine& cm, const PatternWindow& window) {
    const auto& meta = cm.meta;
    int ax = -1, ay = -1;
    for (int y = 0; y < window.height; ++y)
        for (int x = 0; x < window.width; ++x)
            if (window.at(x, y) != HOLE && meta[window.at(x, y)].apex) {
                ax = x;
                ay = y;
            }
    if (ax < 0) throw std::runtime_error("window contains no cone");

    RunTrace tr;
    for (int y = ay; y < window.height; ++y) {
        int ci = window.at(ax, y);
        if (ci == HOLE) break;
        const auto& mt = meta[ci];
        if (mt.out) break;
        if (mt.cell.role != ConeCell::HWALL) continue;
        MachineState s;
        s.state = mt.cell.q;
        s.step = static_cast<int>(tr.states.size());
        s.counters.assign(cm.machine.k, 0);
        bool readable = true;
        for (int i = 0; i < cm.machine.k; ++i) {
            int v = 0;
            bool terminated = false;
            for (int x = ax; x < window.width; ++x) {
                int c2 = window.at(x, y);
                if (c2 == HOLE || meta[c2].out) {
                    terminated = true;
                    break;
                }
                if (meta[c2].cell.flags[i] == 1) ++v;
                else {
                    terminated = true;
                    break;
                }
            }
            if (!terminated) readable = false;  // run reaches the window edge
            s.counters[i] = v;
        }
        if (!readable) break;  // truncate at the last fully readable sweep
        tr.states.push_back(s);
    }
    if (tr.states.empty()) throw std::runtime_error("malformed cone: no wall rows visible");
    tr.status = tr.states.back().state == cm.machine.final ? RunStatus::Accepted
                                                           : RunStatus::Running;
    return tr;
}

CensusReport degenerate_census(const CompiledMachine& cm, int w, int h,
                               const SolveOptions& opts) {
    const auto& meta = cm.meta;
    CensusReport rep;
    // Sample windows along the southern boundary of the non-background
    // region: the south border is pinned outside, so every region visible
    // in the window roots inside it and the half-plane laws are
    // conclusive.  Without this, locally admissible fragments of two
    // different cones (whose collision lies above the window) would be
    // counted as violations even though they extend to no configuration.
    BoundaryCondition bc;
    bc.south = std::vector<std::vector<int>>(
        static_cast<size_t>(w), std::vector<int>{cm.impl_holder->gen->OUTV});
    enumerate_rect_cb(cm.system, w, h, bc, [&](const Tiling& t) {
        ++rep.windows;
        bool has_apex = false;
        for (int c : t.cells)
            if (meta[c].apex) has_apex = true;
        if (has_apex) return true;
        ++rep.degenerate;

        bool bad = false;
        std::vector<std::pair<int, int>> span(h, {-1, -1});
        for (int y = 0; y < h && !bad; ++y) {
            int heads = 0;
            int last = -2;
            for (int x = 0; x < w; ++x) {
                int c = t.at(x, y);
                if (meta[c].out) continue;
                if (span[y].first < 0) span[y].first = x;
                if (last >= 0 && x > last + 1) bad = true;  // row not contiguous
                last = x;
                span[y].second = x;
                auto role = meta[c].cell.role;
                if (role == ConeCell::HE || role == ConeCell::HW || role == ConeCell::HWALL)
                    ++heads;
            }
            if (heads > 1) bad = true;
        }
        int regions = 0;
        for (int y = 0; y < h && !bad; ++y) {
            if (span[y].first < 0) continue;
            if (y == 0 || span[y - 1].first < 0) ++regions;
            if (y > 0 && span[y - 1].first >= 0) {
                if (span[y - 1].first > 0 && span[y].first > 0 &&
                    span[y].first != span[y - 1].first)
                    bad = true;  // the west wall is vertical
                if (span[y - 1].second < w - 1 && span[y].second < w - 1 &&
                    span[y].second != span[y - 1].second + 1)
                    bad = true;  // the segment grows east by exactly one
            }
        }
        if (regions > 1) bad = true;
        if (bad) ++rep.violations;
        return true;
    }, opts);
    return rep;
}

AttachedSystem attach_to_grid(const CounterMachine& m, int n) {
    m.validate();
    if (m.bidirectional)
        throw std::invalid_argument("attach_to_grid needs a unidirectional machine");
    if (m.oracle_alphabet) throw std::invalid_argument("attach_to_grid uses a blank oracle tape");
    if (m.final < 0) throw std::invalid_argument("attach_to_grid needs an accepting state");
    for (const auto& r : m.rules)
        if (r.to == m.final)
            for (int d : r.deltas)
                if (d != 0) throw std::invalid_argument("halting rules must be delta-free");

    {
        // every branch must accept within the cell budget
        std::deque<MachineState> queue;
        MachineState s;
        s.state = m.initial;
        s.counters.assign(m.k, 0);
        queue.push_back(s);
        while (!queue.empty()) {
            MachineState cur = queue.front();
            queue.pop_front();
            if (cur.state == m.final) continue;
            if (cur.step >= n)
                throw std::invalid_argument("machine does not halt within the cell budget");
            auto succ = step(m, cur, nullptr);
            if (succ.empty()) throw std::invalid_argument("machine rejects on some branch");
            for (auto& [ri, nxt] : succ) {
                (void)ri;
                queue.push_back(nxt);
            }
        }
    }

    auto gen = std::make_shared<xm::Gen>(m, true);
    WangTileSet grid = grid_tileset();

    std::vector<std::string> mark_syms;
    for (int mask = 0; mask < (1 << m.k); ++mask) mark_syms.push_back("m" + std::to_string(mask));
    Alphabet marks(mark_syms, "m0");

    std::vector<CouplingTable> rules;
    {
        CouplingTable a1{"a1_place", {0, 1}, {}};
        for (int g = 0; g < grid.size(); ++g)
            for (int t = 0; t < gen->tiles.size(); ++t) {
                const auto& mt = gen->meta[t];
                bool wallcell = !mt.out && gen->tiles.tiles[t].west == gen->WALL && !mt.apex;
                bool ok;
                if (mt.apex) ok = grid.tiles[g].label == "vline_diag";
                else if (wallcell) ok = grid.tiles[g].label == "vline";
                else if (!mt.out) ok = !grid_has_hline(g) && !grid_has_vline(g);
                else ok = grid.tiles[g].label != "vline_diag";
                if (ok) a1.allowed.insert({grid.tiles[g].label, gen->tiles.tiles[t].label});
            }
        rules.push_back(std::move(a1));
    }
    {
        CouplingTable a2{"a2_marks", {SYMBOL_LAYER, 1}, {}};
        for (int s = 0; s < marks.size(); ++s)
            for (int t = 0; t < gen->tiles.size(); ++t) {
                const auto& mt = gen->meta[t];
                bool ok = !mt.halt_row ||
                          "m" + std::to_string(mt.west_boundaries) == marks.symbols[s];
                if (ok) a2.allowed.insert({marks.symbols[s], gen->tiles.tiles[t].label});
            }
        rules.push_back(std::move(a2));
    }

    AttachedSystem out;
    out.machine = m;
    out.system = product({grid, gen->tiles}, std::move(rules), marks);
    return out;
}

}  // namespace tilelab
