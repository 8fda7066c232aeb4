#include "tilelab/verify.hpp"

#include <chrono>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "tilelab/blocks.hpp"
#include "tilelab/cm.hpp"
#include "tilelab/gapshift.hpp"

namespace tilelab {

namespace {

using Clock = std::chrono::steady_clock;

struct Runner {
    VerifyReport& rep;
    void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        auto t0 = Clock::now();
        VerifyReport::Check c;
        c.name = name;
        try {
            auto [ok, detail] = fn();
            c.pass = ok;
            c.detail = detail;
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = std::string("exception: ") + e.what();
        }
        c.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        rep.checks.push_back(std::move(c));
    }
};

std::pair<bool, std::string> counted(bool ok, uint64_t n, const std::string& what) {
    return {ok, std::to_string(n) + " " + what};
}

void suite_grid(Runner& r) {
    for (int n = 2; n <= 5; ++n)
        r.check("dichotomy n=" + std::to_string(n), [n] {
            GridDichotomyReport rep = grid_dichotomy(n);
            std::ostringstream d;
            d << rep.total << " tilings, " << rep.grid_translates << " grids, " << rep.lineless
              << " lineless";
            return std::make_pair(rep.dichotomy, d.str());
        });
    r.check("x_grid windows admissible and periodic", [] {
        LayeredTileSet sys = single_layer(grid_tileset());
        for (int n = 2; n <= 5; ++n) {
            PatternWindow w = x_grid(n, -n, -n, 3 * n, 3 * n);
            if (!locally_admissible(sys, w)) return std::make_pair(false, std::string("n=") + std::to_string(n));
            PatternWindow s = x_grid(n, 0, 0, 2 * n, 2 * n);
            PatternWindow t = x_grid(n, n, n, 2 * n, 2 * n);
            if (s.cells != t.cells) return std::make_pair(false, std::string("periodicity"));
        }
        return std::make_pair(true, std::string("n in 2..5"));
    });
}

void suite_counting(Runner& r) {
    for (int n = 3; n <= 4; ++n)
        r.check("column bound n=" + std::to_string(n), [n] {
            uint64_t cases = 0;
            for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
                std::vector<int> pattern(n + 1, 0);
                int nz = 0;
                for (int i = 0; i < n - 1; ++i)
                    if ((mask >> i) & 1) {
                        pattern[i + 1] = 1;
                        ++nz;
                    }
                if (nz > n - 1) continue;
                bool want = nz <= n - 2;
                if (verify_column_bound(n, pattern) != want)
                    return std::make_pair(false, "pattern mask " + std::to_string(mask));
                ++cases;
            }
            return counted(true, cases, "patterns");
        });
    r.check("composite count equals the tuple filter", [] {
        Alphabet a = Alphabet::binary();
        CountingSystem cs = counting_system(a);
        uint64_t expect = 0;
        const auto& L = cs.base.layers;
        for (int s = 0; s < a.size(); ++s)
            for (int g = 0; g < L[0].size(); ++g)
                for (int c = 0; c < L[1].size(); ++c)
                    for (int y = 0; y < L[2].size(); ++y) {
                        CompositeTile t{s, {g, c, y}};
                        if (cs.base.passes_couplings(t)) ++expect;
                    }
        return counted(cs.base.num_composites() == static_cast<int>(expect), expect, "tuples");
    });
}

void suite_probe(Runner& r) {
    r.check("determinism m=3 over all valid rows", [] {
        Alphabet pq({"p", "q"});
        int m = 3;
        uint64_t consistent = 0, inconsistent = 0;
        // rows 0^z (a.xi)? 1^k 2^t truncated to a few segments
        for (int zeros = 0; zeros <= 1; ++zeros)
            for (int ia = 0; ia < 2; ++ia)
                for (int xi = 0; xi < 2; ++xi)
                    for (int k = 0; k <= m - 1; ++k) {
                        std::vector<std::string> row(zeros, "0");
                        std::string a = pq.symbols[ia] + "." + std::to_string(xi);
                        row.push_back(a);
                        for (int i = 0; i < k; ++i) row.push_back("1");
                        row.push_back("2");
                        int W = (static_cast<int>(row.size()) - 1) * m + 1;
                        int lcol = zeros * m;
                        int land = lcol + k;
                        std::vector<int> ap(W, 1 - ia);
                        bool ok_shape = xi == 1 ? k == m - 1 : k <= m - 2;
                        if (xi == 0) ap[lcol] = ia;
                        ap[land] = ia;
                        uint64_t c = verify_probe_determinism(m, ap, row, pq);
                        if (ok_shape) {
                            if (c != 1) return std::make_pair(false, "want 1: " + a);
                            ++consistent;
                        } else {
                            if (c != 0) return std::make_pair(false, "want 0: " + a);
                            ++inconsistent;
                        }
                        // break the probed symbol: never more than 0
                        ap[land] = 1 - ia;
                        if (xi == 0 && land != lcol) ap[lcol] = ia;
                        uint64_t c2 = verify_probe_determinism(m, ap, row, pq);
                        if (ok_shape && c2 != 0)
                            return std::make_pair(false, "mismatch accepted: " + a);
                    }
        return counted(true, consistent + inconsistent, "rows");
    });
}

void suite_widthrestrict(Runner& r) {
    r.check("solvable iff n <= d", [] {
        for (int d = 2; d <= 3; ++d)
            for (int n = 2; n <= 3; ++n)
                if (width_restriction_solvable(d, n) != (n <= d))
                    return std::make_pair(false,
                                          "d=" + std::to_string(d) + " n=" + std::to_string(n));
        return std::make_pair(true, std::string("d in 2..3, n in 2..3"));
    });
}

void suite_gapshift(Runner& r) {
    auto specs = [] {
        std::vector<std::pair<std::string, GapShiftSpec>> out;
        for (const char* f : {"expr: n", "expr: 2*n", "expr: n+1", "expr: 0", "expr: 3"})
            out.push_back({f, GapShiftSpec(Alphabet::binary(), GapFunction::parse(f))});
        return out;
    }();
    r.check("language equals the all-factors scan (len <= 10)", [&] {
        uint64_t words = 0;
        for (const auto& [name, spec] : specs)
            for (int len = 0; len <= 10; ++len)
                for (int bits = 0; bits < (1 << len); ++bits) {
                    std::vector<int> syms(len);
                    for (int i = 0; i < len; ++i) syms[i] = (bits >> i) & 1;
                    Word w{syms};
                    bool scan = true;
                    for (int i = 0; i < len && scan; ++i)
                        for (int j = i; j < len && scan; ++j) {
                            Word f{std::vector<int>(w.syms.begin() + i, w.syms.begin() + j + 1)};
                            if (is_forbidden(f, spec)) scan = false;
                        }
                    if (word_in_language(w, spec) != scan)
                        return std::make_pair(false, name + " at " + w.str(spec.alphabet));
                    ++words;
                }
        return counted(true, words, "words");
    });
    r.check("recovery identity where f(n) >= 1", [&] {
        Alphabet b = Alphabet::binary();
        uint64_t points = 0;
        for (const auto& [name, spec] : specs) {
            const GapShiftSpec& s = spec;
            MembershipOracle oracle = [&s](const BiInfiniteSpec& c) {
                return biinfinite_membership(c, s);
            };
            for (uint64_t n = 0; n <= 8; ++n) {
                uint64_t got = recover_f(oracle, b, "1", n);
                uint64_t want = std::max<uint64_t>(s.f(n), 1);
                if (got != want) return std::make_pair(false, name);
                ++points;
            }
        }
        return counted(true, points, "points");
    });
    r.check("generalized membership vs exhaustive skeletons (core <= 5)", [] {
        Alphabet abc({"p", "q", "r"});
        GeneralizedGapSpec g(abc, GapFunction::parse("expr: n"), 1);
        Word zero = Word::parse(abc, "p");
        uint64_t cases = 0;
        for (int len = 0; len <= 5; ++len) {
            long long total = 1;
            for (int i = 0; i < len; ++i) total *= 3;
            for (long long code = 0; code < total; ++code) {
                long long c = code;
                std::vector<int> mid(len);
                for (int i = 0; i < len; ++i) {
                    mid[i] = c % 3;
                    c /= 3;
                }
                BiInfiniteSpec cfg(zero, Word{mid}, zero);
                bool got = generalized_membership(cfg, g);
                // oracle: brute skeleton search over a wide window
                bool want = false;
                int lo = -4, hi = len + 3;
                int width = hi - lo + 1;
                for (long long mask = 0; mask < (1ll << width) && !want; ++mask) {
                    std::vector<long long> ones;
                    for (int i = 0; i < width; ++i)
                        if ((mask >> i) & 1) ones.push_back(lo + i);
                    uint64_t kk = ones.size();
                    bool ok = true;
                    for (size_t i = 1; i < ones.size() && ok; ++i) {
                        uint64_t gap = static_cast<uint64_t>(ones[i] - ones[i - 1] - 1);
                        if (kk > g.f(gap)) ok = false;
                    }
                    auto val = [&](long long x) { return eval_biinfinite(cfg, x); };
                    auto run_per = [&](long long a2, long long b2) {
                        if (a2 > b2) return true;
                        for (long long x = a2; x + 1 <= b2; ++x)
                            if (val(x) != val(x + 1)) return false;
                        return true;
                    };
                    if (ok) {
                        // b = 1: all runs must be constant
                        long long check_lo = lo - 8, check_hi = hi + 8;
                        if (ones.empty()) {
                            ok = run_per(check_lo, check_hi);
                        } else {
                            ok = run_per(check_lo, ones.front() - 2) &&
                                 run_per(ones.back() + 2, check_hi);
                            for (size_t i = 1; i < ones.size() && ok; ++i)
                                ok = run_per(ones[i - 1] + 2, ones[i] - 2);
                        }
                    }
                    if (ok) want = true;
                }
                if (got != want)
                    return std::make_pair(false, "core " + Word{mid}.str(abc));
                ++cases;
            }
        }
        return counted(true, cases, "configurations");
    });
}

void suite_cm(Runner& r) {
    auto count3 = parse_machine(
        "states q0 q1 q2 q3 qf\nfinal qf\ncounters 1\noracle none\nbidir off\n"
        "rule q0 * * -: q1 +1\nrule q1 * * -: q2 +1\nrule q2 * * -: q3 +1\n"
        "rule q3 * * -: qf 0\n");
    r.check("machine and tile set round trips", [&] {
        CounterMachine back = parse_machine(serialize_machine(count3));
        if (serialize_machine(back) != serialize_machine(count3))
            return std::make_pair(false, std::string("machine file"));
        CompiledMachine cm = compile_to_tiles(count3);
        if (!(parse_tileset(serialize_tileset(cm.system.layers[0])) == cm.system.layers[0]))
            return std::make_pair(false, std::string("tile file"));
        return std::make_pair(true, std::to_string(cm.system.layers[0].size()) + " tiles");
    });
    r.check("decode of embed on run prefixes", [&] {
        CompiledMachine cm = compile_to_tiles(count3);
        RunTrace full = run(count3, nullptr, 6);
        for (size_t s = 0; s + 1 <= full.states.size(); ++s) {
            RunTrace p;
            p.states.assign(full.states.begin(), full.states.begin() + s + 1);
            p.rule_used.assign(full.rule_used.begin(), full.rule_used.begin() + s);
            RunTrace dec = decode_trace(cm, embed_trace(cm, p, nullptr, 16));
            if (dec.states.size() != p.states.size())
                return std::make_pair(false, "prefix " + std::to_string(s));
            for (size_t i = 0; i < p.states.size(); ++i)
                if (dec.states[i].state != p.states[i].state ||
                    dec.states[i].counters != p.states[i].counters)
                    return std::make_pair(false, "prefix " + std::to_string(s));
        }
        return counted(true, full.states.size(), "prefixes");
    });
    r.check("solver cone decodes step-valid", [&] {
        CompiledMachine cm = compile_to_tiles(count3);
        int apex = -1;
        for (int t = 0; t < static_cast<int>(cm.meta.size()); ++t)
            if (cm.meta[t].apex) apex = t;
        BoundaryCondition bc;
        bc.pins[{1, 1}] = apex;
        auto sol = solve_rect(cm.system, 16, 16, bc);
        if (!sol) return std::make_pair(false, std::string("no cone"));
        RunTrace dec = decode_trace(cm, sol->window());
        for (size_t i = 0; i + 1 < dec.states.size(); ++i) {
            bool found = false;
            for (auto& [ri, s2] : step(count3, dec.states[i], nullptr))
                if (s2.state == dec.states[i + 1].state &&
                    s2.counters == dec.states[i + 1].counters)
                    found = true;
            if (!found) return std::make_pair(false, std::string("invalid step"));
        }
        return counted(true, dec.states.size(), "decoded states");
    });
    r.check("degenerate census 5x5", [&] {
        CompiledMachine cm = compile_to_tiles(count3);
        CensusReport rep = degenerate_census(cm, 5, 5);
        std::ostringstream d;
        d << rep.degenerate << " degenerate windows, " << rep.violations << " violations";
        return std::make_pair(rep.violations == 0, d.str());
    });
}

}  // namespace

std::string VerifyReport::text() const {
    std::ostringstream out;
    out << "suite " << suite << "\n";
    for (const auto& c : checks) {
        out << (c.pass ? "  pass  " : "  FAIL  ") << c.name;
        if (!c.detail.empty()) out << " (" << c.detail << ")";
        char buf[32];
        snprintf(buf, sizeof buf, " [%.0f ms]", c.ms);
        out << buf << "\n";
    }
    out << (pass() ? "PASS" : "FAIL") << " " << suite << "\n";
    return out.str();
}

std::string VerifyReport::json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["pass"] = pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back(
            {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"ms", c.ms}});
    return j.dump(2) + "\n";
}

std::vector<std::string> suite_names() {
    return {"grid", "counting", "probe", "widthrestrict", "gapshift", "cm", "all"};
}

VerifyReport run_suite(const std::string& suite) {
    VerifyReport rep;
    rep.suite = suite;
    Runner r{rep};
    if (suite == "grid") suite_grid(r);
    else if (suite == "counting") suite_counting(r);
    else if (suite == "probe") suite_probe(r);
    else if (suite == "widthrestrict") suite_widthrestrict(r);
    else if (suite == "gapshift") suite_gapshift(r);
    else if (suite == "cm") suite_cm(r);
    else if (suite == "all") {
        suite_grid(r);
        suite_counting(r);
        suite_probe(r);
        suite_widthrestrict(r);
        suite_gapshift(r);
        suite_cm(r);
    } else {
        throw std::invalid_argument("unknown suite: " + suite);
    }
    return rep;
}

}  // namespace tilelab
