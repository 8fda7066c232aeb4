// Command-line front end: parsing, solving, rendering and the
// verification suites.  Exit codes: 0 success / solved / member,
// 1 well-formed negative (unsolvable, not a member, suite failed),
// 2 usage or parse errors.

#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tilelab/blocks.hpp"
#include "tilelab/cm.hpp"
#include "tilelab/gapshift.hpp"
#include "tilelab/render.hpp"
#include "tilelab/tiler.hpp"
#include "tilelab/verify.hpp"

using namespace tilelab;

namespace {

struct Global {
    uint64_t guard = 200'000'000;
    int threads = 0;
    uint64_t seed = 0;  // reserved; affects nothing semantic
    std::string format = "text";
};

SolveOptions solve_opts(const Global& g) {
    SolveOptions o;
    o.node_guard = g.guard;
    o.threads = g.threads;
    return o;
}

LayeredTileSet load_system(const std::string& path, bool layered) {
    std::string text = read_file(path);
    if (layered || text.rfind("layer", 0) == 0 || text.find("\nlayer ") != std::string::npos ||
        text.rfind("symbols", 0) == 0)
        return parse_layered(text);
    return single_layer(parse_tileset(text));
}

Alphabet parse_alphabet(const std::string& spec, bool with_zero) {
    std::vector<std::string> syms;
    std::istringstream in(spec);
    std::string s;
    while (in >> s) syms.push_back(s);
    if (syms.empty()) syms = {"0", "1"};
    return Alphabet(syms, with_zero ? std::optional<std::string>(syms.front()) : std::nullopt);
}

int negative(const Global& g, const std::string& msg) {
    if (g.format == "json")
        std::cout << nlohmann::json{{"result", false}, {"detail", msg}}.dump() << "\n";
    else
        std::cout << msg << "\n";
    return 1;
}

int positive(const Global& g, const std::string& msg) {
    if (g.format == "json")
        std::cout << nlohmann::json{{"result", true}, {"detail", msg}}.dump() << "\n";
    else
        std::cout << msg << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tilelab: gap width shifts, layered Wang tile systems and their solvers"};
    app.require_subcommand(1);

    Global g;
    app.add_option("--guard", g.guard, "search node guard");
    app.add_option("--threads", g.threads, "worker threads (0 = default)");
    app.add_option("--seed", g.seed, "reserved; no semantic effect");
    app.add_option("--format", g.format, "report format: text|json")
        ->check(CLI::IsMember({"text", "json"}));

    // tileset check
    auto* ts_cmd = app.add_subcommand("tileset", "tile set file operations");
    auto* ts_check = ts_cmd->add_subcommand("check", "parse and validate a tile set file");
    std::string ts_file;
    bool ts_layered = false;
    ts_check->add_option("file", ts_file)->required();
    ts_check->add_flag("--layered", ts_layered, "force the layered grammar");

    // solve / count / enumerate
    std::string s_tileset, s_bc, s_out;
    int s_w = 1, s_h = 1;
    bool s_torus = false, s_layered = false;
    uint64_t s_limit = 0;
    auto add_solver_opts = [&](CLI::App* c, bool with_out) {
        c->add_option("--tileset", s_tileset, "tile set file")->required();
        c->add_flag("--layered", s_layered, "force the layered grammar");
        c->add_option("--width", s_w)->required();
        c->add_option("--height", s_h)->required();
        c->add_flag("--torus", s_torus, "wrap adjacency on both axes");
        c->add_option("--bc", s_bc, "boundary condition file");
        if (with_out) c->add_option("--out", s_out, "write the tiling here");
    };
    auto* solve_cmd = app.add_subcommand("solve", "find one tiling");
    add_solver_opts(solve_cmd, true);
    auto* count_cmd = app.add_subcommand("count", "count all tilings exactly");
    add_solver_opts(count_cmd, false);
    auto* enum_cmd = app.add_subcommand("enumerate", "list all tilings");
    add_solver_opts(enum_cmd, true);
    enum_cmd->add_option("--limit", s_limit, "stop after this many");

    // render
    auto* render_cmd = app.add_subcommand("render", "render a tiling file");
    std::string r_tileset, r_tiling, r_format = "ascii", r_out, r_layers;
    bool r_layered = false;
    int r_cell = 16;
    render_cmd->add_option("--tileset", r_tileset)->required();
    render_cmd->add_flag("--layered", r_layered);
    render_cmd->add_option("--tiling", r_tiling)->required();
    render_cmd->add_option("--render-format", r_format)->check(CLI::IsMember({"ascii", "svg"}));
    render_cmd->add_option("--cell-size", r_cell);
    render_cmd->add_option("--layers", r_layers, "visibility mask like 101");
    render_cmd->add_option("--out", r_out);

    // gap subcommands
    auto* gap_cmd = app.add_subcommand("gap", "gap width shift operations");
    std::string gp_f = "expr: n", gp_word, gp_left = "0", gp_mid, gp_right = "0";
    std::string gp_alpha = "0 1", gp_a = "", gp_cores;
    uint64_t gp_n = 0, gp_budget = 1u << 20;
    int gp_b = 1;
    auto* gap_member = gap_cmd->add_subcommand("member", "word or configuration membership");
    gap_member->add_option("--f", gp_f, "gap function");
    gap_member->add_option("--word", gp_word);
    gap_member->add_option("--left", gp_left);
    gap_member->add_option("--mid", gp_mid);
    gap_member->add_option("--right", gp_right);
    gap_member->add_option("--alphabet", gp_alpha);
    auto* gap_recover =
        gap_cmd->add_subcommand("recover", "recover f(n) from the membership oracle");
    gap_recover->add_option("--f", gp_f);
    gap_recover->add_option("--n", gp_n)->required();
    gap_recover->add_option("--a", gp_a, "nonzero probe symbol");
    gap_recover->add_option("--alphabet", gp_alpha);
    auto* gap_fx = gap_cmd->add_subcommand("fx", "gap function of an enumerated subshift");
    gap_fx->add_option("--f", gp_f, "ambient gap function");
    gap_fx->add_option("--cores", gp_cores, "comma-separated core words")->required();
    gap_fx->add_option("--n", gp_n)->required();
    gap_fx->add_option("--budget", gp_budget);
    gap_fx->add_option("--alphabet", gp_alpha);
    auto* gap_gm = gap_cmd->add_subcommand("gmember", "generalized gap shift membership");
    gap_gm->add_option("--f", gp_f);
    gap_gm->add_option("--b", gp_b)->required();
    gap_gm->add_option("--alphabet", gp_alpha)->required();
    gap_gm->add_option("--left", gp_left)->required();
    gap_gm->add_option("--mid", gp_mid);
    gap_gm->add_option("--right", gp_right)->required();

    // cm subcommands
    auto* cm_cmd = app.add_subcommand("cm", "counter machine operations");
    std::string cm_file, cm_out, cm_oleft, cm_omid, cm_oright;
    int cm_steps = 64;
    auto* cm_run = cm_cmd->add_subcommand("run", "run under the lowest-rule policy");
    bool cm_exists = false;
    cm_run->add_option("--machine", cm_file)->required();
    cm_run->add_option("--steps", cm_steps);
    cm_run->add_flag("--exists", cm_exists,
                     "breadth-first search over all nondeterministic branches");
    cm_run->add_option("--oracle-left", cm_oleft);
    cm_run->add_option("--oracle-mid", cm_omid);
    cm_run->add_option("--oracle-right", cm_oright);
    auto* cm_compile = cm_cmd->add_subcommand("compile", "compile to a Wang tile system");
    cm_compile->add_option("--machine", cm_file)->required();
    cm_compile->add_option("--out", cm_out, "write the serialized tile set");
    auto* cm_verify = cm_cmd->add_subcommand("verify", "round trip, embedding and census checks");
    cm_verify->add_option("--machine", cm_file)->required();
    cm_verify->add_option("--steps", cm_steps);

    // verify suites
    auto* verify_cmd = app.add_subcommand("verify", "run a named verification suite");
    std::string suite;
    verify_cmd->add_option("suite", suite, "grid|counting|probe|widthrestrict|gapshift|cm|all")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ts_check) {
            LayeredTileSet sys = load_system(ts_file, ts_layered);
            std::ostringstream d;
            d << sys.num_layers() << " layers, " << sys.num_composites() << " composite tiles";
            return positive(g, d.str());
        }
        if (*solve_cmd || *count_cmd || *enum_cmd) {
            LayeredTileSet sys = load_system(s_tileset, s_layered);
            BoundaryCondition bc;
            if (!s_bc.empty()) bc = parse_bc(sys, read_file(s_bc), s_w, s_h);
            if (*solve_cmd) {
                auto sol = s_torus ? solve_torus(sys, s_w, s_h, solve_opts(g))
                                   : solve_rect(sys, s_w, s_h, bc, solve_opts(g));
                if (!sol) return negative(g, "unsolvable");
                if (!s_out.empty()) write_file(s_out, serialize_tiling(sys, *sol));
                else std::cout << serialize_tiling(sys, *sol);
                return 0;
            }
            if (*count_cmd) {
                if (s_torus)
                    return positive(
                        g, std::to_string(enumerate_torus(sys, s_w, s_h, solve_opts(g)).size()));
                return positive(g, std::to_string(count_rect(sys, s_w, s_h, bc, solve_opts(g))));
            }
            uint64_t shown = 0;
            std::ostringstream out;
            auto emit = [&](const Tiling& t) {
                out << serialize_tiling(sys, t) << "\n";
                ++shown;
                return s_limit == 0 || shown < s_limit;
            };
            if (s_torus) {
                for (const auto& t : enumerate_torus(sys, s_w, s_h, solve_opts(g)))
                    if (!emit(t)) break;
            } else {
                enumerate_rect_cb(sys, s_w, s_h, bc, emit, solve_opts(g));
            }
            if (!s_out.empty()) write_file(s_out, out.str());
            else std::cout << out.str();
            std::cout << shown << " tilings\n";
            return 0;
        }
        if (*render_cmd) {
            LayeredTileSet sys = load_system(r_tileset, r_layered);
            Tiling t = parse_tiling(sys, read_file(r_tiling));
            RenderSpec spec;
            spec.cell_size = r_cell;
            spec.format = r_format == "svg" ? RenderSpec::Format::Svg : RenderSpec::Format::Ascii;
            for (char c : r_layers) spec.layer_visible.push_back(c == '1');
            std::string out = spec.format == RenderSpec::Format::Svg ? render_svg(sys, t, spec)
                                                                     : render_ascii(sys, t, spec);
            if (!r_out.empty()) write_file(r_out, out);
            else std::cout << out;
            return 0;
        }
        if (*gap_member) {
            GapShiftSpec spec(parse_alphabet(gp_alpha, true), GapFunction::parse(gp_f));
            bool member;
            if (gap_member->count("--word")) {
                member = word_in_language(Word::parse(spec.alphabet, gp_word), spec);
            } else {
                BiInfiniteSpec cfg(Word::parse(spec.alphabet, gp_left),
                                   Word::parse(spec.alphabet, gp_mid),
                                   Word::parse(spec.alphabet, gp_right));
                member = biinfinite_membership(cfg, spec);
            }
            return member ? positive(g, "member") : negative(g, "not a member");
        }
        if (*gap_recover) {
            GapShiftSpec spec(parse_alphabet(gp_alpha, true), GapFunction::parse(gp_f));
            std::string a = gp_a.empty() ? spec.alphabet.symbols[1] : gp_a;
            MembershipOracle oracle = [&](const BiInfiniteSpec& c) {
                return biinfinite_membership(c, spec);
            };
            return positive(g, std::to_string(recover_f(oracle, spec.alphabet, a, gp_n)));
        }
        if (*gap_fx) {
            GapShiftSpec spec(parse_alphabet(gp_alpha, true), GapFunction::parse(gp_f));
            EnumeratedSubshift X(spec);
            std::istringstream in(gp_cores);
            std::string core;
            while (std::getline(in, core, ',')) X.insert(Word::parse(spec.alphabet, core));
            return positive(g, std::to_string(gap_function(X, gp_n, gp_budget)));
        }
        if (*gap_gm) {
            GeneralizedGapSpec spec(parse_alphabet(gp_alpha, false), GapFunction::parse(gp_f),
                                    gp_b);
            BiInfiniteSpec cfg(Word::parse(spec.alphabet, gp_left),
                               Word::parse(spec.alphabet, gp_mid),
                               Word::parse(spec.alphabet, gp_right));
            return generalized_membership(cfg, spec) ? positive(g, "member")
                                                     : negative(g, "not a member");
        }
        if (*cm_run) {
            CounterMachine m = parse_machine(read_file(cm_file));
            std::optional<BiInfiniteSpec> oracle;
            if (m.oracle_alphabet) {
                const std::string& z = m.oracle_alphabet->symbols[0];
                oracle = BiInfiniteSpec(
                    Word::parse(*m.oracle_alphabet, cm_oleft.empty() ? z : cm_oleft),
                    Word::parse(*m.oracle_alphabet, cm_omid),
                    Word::parse(*m.oracle_alphabet, cm_oright.empty() ? z : cm_oright));
            }
            if (cm_exists) {
                bool acc = exists_accepting(m, oracle ? &*oracle : nullptr, cm_steps);
                return acc ? positive(g, "an accepting branch exists")
                           : negative(g, "no accepting branch within the step bound");
            }
            RunTrace tr = run(m, oracle ? &*oracle : nullptr, cm_steps);
            for (const auto& s : tr.states) {
                std::cout << s.step << ": " << m.states[s.state];
                for (long long c : s.counters) std::cout << " " << c;
                std::cout << "\n";
            }
            const char* status = tr.status == RunStatus::Accepted   ? "accepted"
                                 : tr.status == RunStatus::Rejected ? "rejected"
                                                                    : "running";
            std::cout << status << "\n";
            return tr.status == RunStatus::Rejected ? 1 : 0;
        }
        if (*cm_compile) {
            CounterMachine m = parse_machine(read_file(cm_file));
            CompiledMachine cm = compile_to_tiles(m);
            std::string text = serialize_tileset(cm.system.layers[0]);
            if (!cm_out.empty()) write_file(cm_out, text);
            std::ostringstream d;
            d << cm.system.layers[0].size() << " tiles, " << cm.system.layers[0].colors
              << " colors";
            return positive(g, d.str());
        }
        if (*cm_verify) {
            CounterMachine m = parse_machine(read_file(cm_file));
            CompiledMachine cm = compile_to_tiles(m);
            bool ok = parse_tileset(serialize_tileset(cm.system.layers[0])) == cm.system.layers[0];
            RunTrace full = run(m, nullptr, std::min(cm_steps, 6));
            for (size_t s = 0; ok && s + 1 <= full.states.size(); ++s) {
                RunTrace p;
                p.states.assign(full.states.begin(), full.states.begin() + s + 1);
                p.rule_used.assign(full.rule_used.begin(), full.rule_used.begin() + s);
                PatternWindow win = embed_trace(cm, p, nullptr, 16);
                RunTrace dec = decode_trace(cm, win);
                ok = dec.states.size() == p.states.size();
                for (size_t i = 0; ok && i < p.states.size(); ++i)
                    ok = dec.states[i].state == p.states[i].state &&
                         dec.states[i].counters == p.states[i].counters;
            }
            // head kinematics on a solver-produced cone
            bool kin = true;
            {
                int apex = -1;
                for (int t = 0; t < static_cast<int>(cm.meta.size()); ++t)
                    if (cm.meta[t].apex) apex = t;
                BoundaryCondition pc;
                pc.pins[{1, 1}] = apex;
                auto sol = solve_rect(cm.system, 14, 14, pc, solve_opts(g));
                kin = sol.has_value();
                if (kin) {
                    PatternWindow win = sol->window();
                    auto head_of = [&](int y, int& x, ConeCell::Role& role, int& border) {
                        x = border = -1;
                        role = ConeCell::L;
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
                    for (int y = 1; y + 1 < win.height && kin; ++y) {
                        int x1, x2, b1, b2;
                        ConeCell::Role r1, r2;
                        if (!head_of(y, x1, r1, b1) || !head_of(y + 1, x2, r2, b2)) continue;
                        if (b2 >= win.width - 1) continue;
                        if (r1 == ConeCell::HE || r1 == ConeCell::HWALL)
                            kin = x2 == std::min(x1 + 2, b2);
                        else if (r1 == ConeCell::HW && x1 > 1)
                            kin = x2 == x1 - 1;
                    }
                }
            }
            CensusReport rep = degenerate_census(cm, 5, 5, solve_opts(g));
            std::ostringstream d;
            d << "round trip and embedding " << (ok ? "ok" : "BROKEN") << "; kinematics "
              << (kin ? "ok" : "BROKEN") << "; census " << rep.degenerate << " windows, "
              << rep.violations << " violations";
            bool pass = ok && kin && rep.violations == 0;
            return pass ? positive(g, d.str()) : negative(g, d.str());
        }
        if (*verify_cmd) {
            VerifyReport rep = run_suite(suite);
            std::cout << (g.format == "json" ? rep.json() : rep.text());
            return rep.pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
