#pragma once

// Nondeterministic k-counter machines with optional oracle tape, a direct
// simulator, a compiler embedding computations into Wang tile systems as
// growing zig-zag cones, a decoder, a degenerate-configuration census and
// a desk-scale grid attachment.

#include <memory>

#include "tilelab/blocks.hpp"
#include "tilelab/core.hpp"
#include "tilelab/tiler.hpp"

namespace tilelab {

struct CmRule {
    int from = 0;
    std::string order;   // ranks per counter ("12", "11", ...) or "*"
    std::string zeros;   // 'Z'/'-' per counter, or "*"
    std::string osym;    // oracle symbol, "*" wildcard, "-" none
    int to = 0;
    std::vector<int> deltas;  // per counter, each in {-1, 0, +1}
};

struct CounterMachine {
    std::vector<std::string> states;
    int initial = 0;
    int final = -1;  // -1: no accepting state
    int k = 1;
    std::optional<Alphabet> oracle_alphabet;
    int oracle_counter = -1;
    bool bidirectional = false;
    std::vector<CmRule> rules;

    int state_index(const std::string& name) const;
    void validate() const;
};

CounterMachine parse_machine(const std::string& text);
std::string serialize_machine(const CounterMachine& m);

struct MachineState {
    int state = 0;
    std::vector<long long> counters;
    int step = 0;
    bool operator==(const MachineState&) const = default;
};

enum class RunStatus { Accepted, Rejected, Running };

struct RunTrace {
    std::vector<MachineState> states;
    std::vector<int> rule_used;  // per step, index into machine rules
    RunStatus status = RunStatus::Running;
};

// Rank string of the counters ("12" = first strictly below second, ...).
std::string order_type(const std::vector<long long>& counters);

// All successors under the transition relation; empty set = rejecting.
// The oracle, when present, is read at the oracle counter's position.
std::vector<std::pair<int, MachineState>> step(const CounterMachine& m, const MachineState& s,
                                               const BiInfiniteSpec* oracle);

// One run under the fixed policy (lowest-indexed applicable rule).
RunTrace run(const CounterMachine& m, const BiInfiniteSpec* oracle, int max_steps);

// Breadth-first search over all nondeterministic branches.
bool exists_accepting(const CounterMachine& m, const BiInfiniteSpec* oracle, int max_steps);

// --- tile embedding ----------------------------------------------------------
//
// Cell contents of the compiled system.  One row of the cone per tile row;
// the head zig-zags at speed 2 east / 1 west, one west-to-east-and-back
// sweep per machine step, transitions chosen at the west wall.

struct ConeCell {
    enum Role { L, R, HE, HW, HWALL, HALTW, HALTC };
    Role role = L;
    int q = -1;
    std::vector<int> pend;    // HE: -2 applied, else pending delta
    std::vector<int> rec;     // HW/HWALL: boundary-crossing groups, east first
    int osym = -1;            // HW/HWALL: recorded oracle symbol
    std::vector<int> flags;   // 1 = P, 0 = Z per counter
    int o = 0;                // oracle layer symbol
    auto operator<=>(const ConeCell&) const = default;
};

struct XmImplHolder;

struct CompiledMachine {
    CounterMachine machine;
    LayeredTileSet system;  // single layer
    bool with_halt = false;

    // per-tile metadata
    struct Meta {
        bool out = false;
        bool apex = false;
        bool halt_row = false;
        int west_boundaries = 0;  // halt row: counters whose boundary sits on the west edge
        ConeCell cell;            // valid when !out
    };
    std::vector<Meta> meta;
    std::shared_ptr<XmImplHolder> impl_holder;
};

// Compile guard: states * rules * 2^k bounded by this.
inline constexpr int CM_COMPILE_GUARD = 4096;

CompiledMachine compile_to_tiles(const CounterMachine& m);

// Window containing the cone that encodes the trace prefix, padded by one
// outside row/column on the south and west.  The oracle fills the tape
// layer; blank when absent.  The cone quadruples in width per step, so
// max_cols clips the window on the east (negative: keep the full cone);
// the wall column and every counter run stay visible as long as max_cols
// exceeds the largest counter value.  Throws when more than max_rows rows
// would be needed.
PatternWindow embed_trace(const CompiledMachine& cm, const RunTrace& trace,
                          const BiInfiniteSpec* oracle = nullptr, long long max_cols = -1,
                          long long max_rows = 1 << 21);

// Reads the wall column of the cone back into a trace; partial final
// sweeps are truncated.  Throws std::runtime_error when the window holds
// no cone apex or the cone is malformed.
RunTrace decode_trace(const CompiledMachine& cm, const PatternWindow& window);

struct CensusReport {
    uint64_t windows = 0;     // admissible windows enumerated
    uint64_t degenerate = 0;  // windows without a cone apex
    uint64_t violations = 0;  // degenerate windows breaking the shape laws
};

// Enumerates admissible w x h windows without a cone apex and checks each
// has at most one connected non-background region shaped like a growing
// cone fragment with at most one head per row.
CensusReport degenerate_census(const CompiledMachine& cm, int w, int h,
                               const SolveOptions& opts = {});

// Grid attachment at desk scale: one cone per grid cell (apex on the
// V-line, one row above the cross), cones cut at acceptance, and the final
// counter values exported to a vertically constant mark layer, which
// synchronizes the counters of all machines in a column of cells.
// Requires every branch of m to accept within the cell budget with
// delta-free halting rules.
struct AttachedSystem {
    CounterMachine machine;
    LayeredTileSet system;  // layers: [grid, cone]; symbol layer: boundary marks
};

AttachedSystem attach_to_grid(const CounterMachine& m, int n);

}  // namespace tilelab
