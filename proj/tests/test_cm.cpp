#include <cstdlib>
#include <deque>

#include "doctest.h"
#include "tilelab/cm.hpp"

using namespace tilelab;

namespace {

std::string fixture(const std::string& name) {
    const char* dir = std::getenv("TILELAB_FIXTURES");
    REQUIRE(dir != nullptr);
    return std::string(dir) + "/" + name;
}

CounterMachine load(const std::string& name) {
    return parse_machine(read_file(fixture("machines/" + name + ".cm")));
}

bool traces_equal(const RunTrace& a, const RunTrace& b) {
    if (a.states.size() != b.states.size()) return false;
    for (size_t i = 0; i < a.states.size(); ++i)
        if (a.states[i].state != b.states[i].state || a.states[i].counters != b.states[i].counters)
            return false;
    return true;
}

// Brute-force acceptance reachability over the explicit state graph with
// counters capped; independent of step()'s implementation.
bool brute_accepting(const CounterMachine& m, int max_steps, long long cap) {
    std::set<std::pair<int, std::vector<long long>>> seen;
    std::deque<std::pair<MachineState, int>> queue;
    MachineState s0;
    s0.state = m.initial;
    s0.counters.assign(m.k, 0);
    queue.push_back({s0, 0});
    while (!queue.empty()) {
        auto [s, depth] = queue.front();
        queue.pop_front();
        if (s.state == m.final) return true;
        if (depth >= max_steps) continue;
        std::string order = order_type(s.counters);
        std::string zeros;
        for (long long v : s.counters) zeros += v == 0 ? 'Z' : '-';
        for (const auto& r : m.rules) {
            if (r.from != s.state) continue;
            if (r.order != "*" && r.order != order) continue;
            if (r.zeros != "*" && r.zeros != zeros) continue;
            MachineState nxt = s;
            nxt.state = r.to;
            bool ok = true;
            for (int i = 0; i < m.k; ++i) {
                nxt.counters[i] += r.deltas[i];
                if (nxt.counters[i] < 0 || nxt.counters[i] > cap) ok = false;
            }
            if (ok && seen.insert({nxt.state, nxt.counters}).second)
                queue.push_back({nxt, depth + 1});
        }
    }
    return false;
}

}  // namespace

TEST_CASE("machine files round trip") {
    for (const char* name : {"count3", "seesaw", "loop", "trivial"}) {
        CounterMachine m = load(name);
        CHECK(serialize_machine(parse_machine(serialize_machine(m))) == serialize_machine(m));
    }
    CHECK_THROWS_AS(parse_machine("states q0\nrule q0 * * -: nowhere 0\n"), ParseError);
}

TEST_CASE("simulator basics") {
    // no transition from q0: immediate reject
    CounterMachine stuck = parse_machine("states q0\ncounters 1\noracle none\nbidir off\n");
    RunTrace tr = run(stuck, nullptr, 10);
    CHECK(tr.status == RunStatus::Rejected);
    CHECK(tr.states.size() == 1);

    // count3 accepts at step 4
    CounterMachine m = load("count3");
    tr = run(m, nullptr, 50);
    CHECK(tr.status == RunStatus::Accepted);
    CHECK(tr.states.size() == 5);
    CHECK(tr.states.back().counters[0] == 3);

    // the loop machine is still running at the step bound
    CounterMachine loop = load("loop");
    tr = run(loop, nullptr, 7);
    CHECK(tr.status == RunStatus::Running);

    // unidirectional machines cannot drive a counter below zero
    CounterMachine dec = parse_machine(
        "states q0 q1\ncounters 1\noracle none\nbidir off\nrule q0 * * -: q1 -1\n");
    CHECK(step(dec, MachineState{0, {0}, 0}, nullptr).empty());
    CounterMachine bidir = parse_machine(
        "states q0 q1\ncounters 1\noracle none\nbidir on\nrule q0 * * -: q1 -1\n");
    auto succ = step(bidir, MachineState{0, {0}, 0}, nullptr);
    REQUIRE(succ.size() == 1);
    CHECK(succ[0].second.counters[0] == -1);
}

TEST_CASE("oracle reading") {
    CounterMachine m = parse_machine(
        "states q0 qa qb\ncounters 1\noracle a b\noraclecounter 0\nbidir off\n"
        "rule q0 * * a: qa 0\nrule q0 * * b: qb 0\n");
    Alphabet ab({"a", "b"});
    BiInfiniteSpec all_a(Word::parse(ab, "a"), Word(), Word::parse(ab, "a"));
    BiInfiniteSpec all_b(Word::parse(ab, "b"), Word(), Word::parse(ab, "b"));
    MachineState s0{0, {0}, 0};
    auto sa = step(m, s0, &all_a);
    auto sb = step(m, s0, &all_b);
    REQUIRE(sa.size() == 1);
    REQUIRE(sb.size() == 1);
    CHECK(sa[0].second.state != sb[0].second.state);
    CHECK_THROWS_AS(step(m, s0, nullptr), std::invalid_argument);
}

TEST_CASE("exists_accepting agrees with the brute state graph search") {
    for (const char* name : {"count3", "seesaw", "loop", "trivial"}) {
        CounterMachine m = load(name);
        CHECK(exists_accepting(m, nullptr, 40) == brute_accepting(m, 40, 5));
    }
    // nondeterministic: the run policy rejects but an accepting branch exists
    CounterMachine branchy = parse_machine(
        "states q0 dead qf\nfinal qf\ncounters 1\noracle none\nbidir off\n"
        "rule q0 * * -: dead +1\nrule q0 * * -: qf 0\n");
    CHECK(run(branchy, nullptr, 10).status == RunStatus::Rejected);
    CHECK(exists_accepting(branchy, nullptr, 10));
    CHECK(brute_accepting(branchy, 10, 5));
}

TEST_CASE("decode of embed is the identity on fixture traces") {
    for (const char* name : {"count3", "seesaw", "loop"}) {
        CounterMachine m = load(name);
        CompiledMachine cm = compile_to_tiles(m);
        RunTrace full = run(m, nullptr, 10);
        for (size_t steps = 0; steps + 1 <= full.states.size(); ++steps) {
            RunTrace prefix;
            prefix.states.assign(full.states.begin(), full.states.begin() + steps + 1);
            prefix.rule_used.assign(full.rule_used.begin(), full.rule_used.begin() + steps);
            PatternWindow win = embed_trace(cm, prefix, nullptr, 24);
            if (steps <= 3) CHECK(locally_admissible(cm.system, win));
            RunTrace dec = decode_trace(cm, win);
            CHECK(traces_equal(dec, prefix));
        }
    }
}

TEST_CASE("embedding structure") {
    CounterMachine m = load("count3");
    CompiledMachine cm = compile_to_tiles(m);
    // round trip of the compiled tile set
    CHECK(parse_tileset(serialize_tileset(cm.system.layers[0])) == cm.system.layers[0]);

    RunTrace tr = run(m, nullptr, 10);
    PatternWindow win = embed_trace(cm, tr, nullptr, 24);
    CHECK(locally_admissible(cm.system, win));

    // corrupting one cone cell breaks admissibility
    PatternWindow bad = win;
    int cx = 1, cy = 1;  // the apex cell
    REQUIRE(cm.meta[bad.at(cx, cy)].apex);
    bad.at(cx, cy) = 0;
    CHECK_FALSE(locally_admissible(cm.system, bad));

    // a trace with a counter move shifts the P/Z boundary between sweeps
    RunTrace pre2;
    pre2.states.assign(tr.states.begin(), tr.states.begin() + 3);
    pre2.rule_used.assign(tr.rule_used.begin(), tr.rule_used.begin() + 2);
    RunTrace dec = decode_trace(cm, embed_trace(cm, pre2, nullptr, 24));
    REQUIRE(dec.states.size() == 3);
    CHECK(dec.states[1].counters[0] == 1);
    CHECK(dec.states[2].counters[0] == 2);

    // an all-outside window has no cone
    PatternWindow blank(0, 0, 3, 3);
    int out_tile = -1;
    for (int t = 0; t < (int)cm.meta.size(); ++t)
        if (cm.meta[t].out && cm.system.layers[0].tiles[t].east ==
                                  cm.system.layers[0].tiles[t].west)
            out_tile = t;
    REQUIRE(out_tile >= 0);
    for (auto& c : blank.cells) c = out_tile;
    CHECK_THROWS_AS(decode_trace(cm, blank), std::runtime_error);

    // empty trace: the minimal seed rows
    RunTrace seed;
    seed.states.push_back(tr.states.front());
    PatternWindow w0 = embed_trace(cm, seed);
    CHECK(locally_admissible(cm.system, w0));
    CHECK(decode_trace(cm, w0).states.size() == 1);
}

TEST_CASE("solver cones decode to step-valid traces with lawful kinematics") {
    for (const char* name : {"count3", "seesaw"}) {
        CounterMachine m = load(name);
        CompiledMachine cm = compile_to_tiles(m);
        int apex = -1;
        for (int t = 0; t < (int)cm.meta.size(); ++t)
            if (cm.meta[t].apex) apex = t;
        REQUIRE(apex >= 0);
        BoundaryCondition bc;
        bc.pins[{1, 1}] = apex;
        auto sol = solve_rect(cm.system, 16, 16, bc);
        REQUIRE(sol.has_value());
        PatternWindow win = sol->window();
        RunTrace dec = decode_trace(cm, win);
        CHECK(dec.states.size() >= 2);
        CHECK(dec.states.front().state == m.initial);
        for (size_t i = 0; i + 1 < dec.states.size(); ++i) {
            auto succ = step(m, dec.states[i], nullptr);
            bool found = false;
            for (auto& [ri, s2] : succ)
                if (s2.state == dec.states[i + 1].state && s2.counters == dec.states[i + 1].counters)
                    found = true;
            CHECK(found);
        }

        // head kinematics: east speed 2 (capped at the border), west speed 1
        auto head_of = [&](int y, int& x, ConeCell::Role& role, int& border) {
            x = -1;
            border = -1;
            for (int xc = 0; xc < win.width; ++xc) {
                int c = win.at(xc, y);
                if (c == HOLE || cm.meta[c].out) continue;
                border = xc;
                auto r = cm.meta[c].cell.role;
                if (r == ConeCell::HE || r == ConeCell::HW || r == ConeCell::HWALL) {
                    x = xc;
                    role = r;
                }
            }
            return x >= 0;
        };
        int checked = 0;
        for (int y = 1; y + 1 < win.height; ++y) {
            int x1, x2, b1, b2;
            ConeCell::Role r1, r2;
            if (!head_of(y, x1, r1, b1) || !head_of(y + 1, x2, r2, b2)) continue;
            if (b2 >= win.width - 1) continue;  // cone truncated by the window
            if (r1 == ConeCell::HE || r1 == ConeCell::HWALL) {
                CHECK(x2 == std::min(x1 + 2, b2));
                ++checked;
            } else if (r1 == ConeCell::HW && x1 > 1) {
                CHECK(x2 == x1 - 1);
                ++checked;
            }
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("degenerate census is clean at desk scale") {
    CounterMachine m = load("count3");
    CompiledMachine cm = compile_to_tiles(m);
    CensusReport rep = degenerate_census(cm, 6, 6);
    CHECK(rep.windows > 0);
    CHECK(rep.degenerate > 0);
    CHECK(rep.violations == 0);
}

TEST_CASE("grid attachment at desk scale") {
    CounterMachine triv = load("trivial");
    AttachedSystem at = attach_to_grid(triv, 4);

    // grid borders pin the cell alignment: one cell column, two cells tall
    const WangTileSet& grid = at.system.layers[0];
    int w = 5, h = 9, n = 4;
    auto borders = [&](BoundaryCondition& bc) {
        bc.west = std::vector<std::vector<int>>(h, std::vector<int>(2, -1));
        bc.east = bc.west;
        bc.north = std::vector<std::vector<int>>(w, std::vector<int>(2, -1));
        bc.south = bc.north;
        for (int y = 0; y < h; ++y) {
            (*bc.west)[y][0] = grid.tiles[x_grid_tile(n, 0, y)].west;
            (*bc.east)[y][0] = grid.tiles[x_grid_tile(n, w - 1, y)].east;
        }
        for (int x = 0; x < w; ++x) {
            (*bc.south)[x][0] = grid.tiles[x_grid_tile(n, x, 0)].south;
            (*bc.north)[x][0] = grid.tiles[x_grid_tile(n, x, h - 1)].north;
        }
    };
    {
        BoundaryCondition bc;
        borders(bc);
        auto sol = solve_rect(at.system, w, h, bc);
        REQUIRE(sol.has_value());  // both cells host accepting cones
    }
    {
        // conflicting mark on the wall column: the zero counters demand m3
        BoundaryCondition bc;
        borders(bc);
        bc.column_symbols = std::vector<int>(w, -1);
        (*bc.column_symbols)[0] = at.system.column_symbols->index_of("m0");
        CHECK_FALSE(solve_rect(at.system, w, h, bc).has_value());
        (*bc.column_symbols)[0] = at.system.column_symbols->index_of("m3");
        CHECK(solve_rect(at.system, w, h, bc).has_value());
    }
    {
        // a counter boundary forced one column east of the wall: no run of
        // the trivial machine puts a boundary there
        BoundaryCondition bc;
        borders(bc);
        bc.column_symbols = std::vector<int>(w, -1);
        (*bc.column_symbols)[1] = at.system.column_symbols->index_of("m1");
        CHECK_FALSE(solve_rect(at.system, w, h, bc).has_value());
    }

    // precondition checks
    CounterMachine loop = load("loop");
    CHECK_THROWS_AS(attach_to_grid(loop, 4), std::invalid_argument);
    CounterMachine deltafinal = parse_machine(
        "states q0 qf\nfinal qf\ncounters 1\noracle none\nbidir off\n"
        "rule q0 * * -: qf +1\n");
    CHECK_THROWS_AS(attach_to_grid(deltafinal, 4), std::invalid_argument);
}

TEST_CASE("compile guard and bidirectional bar") {
    CounterMachine big;
    big.states = {"a", "b"};
    big.k = 14;
    big.rules.push_back(CmRule{0, "*", "*", "-", 1, std::vector<int>(14, 0)});
    CHECK_THROWS_AS(compile_to_tiles(big), GuardExceeded);
    CounterMachine bd = parse_machine(
        "states q0\ncounters 1\noracle none\nbidir on\nrule q0 * * -: q0 +1\n");
    CHECK_THROWS_AS(compile_to_tiles(bd), std::invalid_argument);
}
