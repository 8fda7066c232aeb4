#pragma once

// Gap width shifts G(A,f): forbidden-pattern family, language and
// bi-infinite membership, recovery of f from a membership oracle, gap
// functions of enumerated subshifts, semicomputability approximation
// harnesses, and the generalized shifts G(A,f,b).

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>

#include "tilelab/core.hpp"

namespace tilelab {

// Total function N -> N, given either as a table with a default rule
// beyond it, or as a closed-form expression over {constants, n, +, *, max}.
//
// Text forms:  "table: 0->3 1->3 2->5 default: n+5"   or   "expr: 2*n+1"
class GapFunction {
  public:
    static GapFunction parse(const std::string& text);
    static GapFunction table(std::vector<uint64_t> values, const std::string& default_expr);
    static GapFunction expr(const std::string& expression);

    uint64_t operator()(uint64_t n) const;
    bool nondecreasing() const { return nondecreasing_; }
    std::string str() const;

  private:
    std::vector<uint64_t> table_;
    std::string default_expr_;          // empty iff pure expression form
    std::string expr_;
    bool nondecreasing_ = false;
    void check_monotone();
};

struct GapShiftSpec {
    Alphabet alphabet;  // zero designated
    GapFunction f;

    GapShiftSpec(Alphabet a, GapFunction fn);
};

struct GeneralizedGapSpec {
    Alphabet alphabet;  // zero not required
    GapFunction f;
    int b = 1;

    GeneralizedGapSpec(Alphabet a, GapFunction fn, int bound);
};

// Maximal zero runs strictly between two nonzero symbols; n = 0 gaps
// (adjacent nonzero symbols) included.
std::vector<int> internal_gaps(const Word& w, int zero);
int nonzero_count(const Word& w, int zero);

// True iff w decomposes as u a 0^n b v with a, b nonzero and
// |w|_{!=0} > f(n) for some internal gap n.
bool is_forbidden(const Word& w, const GapShiftSpec& spec);

// True iff no factor of w is forbidden.  A word contains a forbidden
// factor iff it is itself forbidden (the whole word maximizes the nonzero
// count over factors containing any fixed gap), so this is a whole-word
// check; the exhaustive all-factors scan lives in the test suite.
bool word_in_language(const Word& w, const GapShiftSpec& spec);

// Membership of ^inf(u) v (w)^inf in G(f): both periodic tails must be
// all-zero, then the gap check applies to the finite nonzero core.
bool biinfinite_membership(const BiInfiniteSpec& spec01, const GapShiftSpec& spec);

using MembershipOracle = std::function<bool(const BiInfiniteSpec&)>;

// Least k such that ^inf0 a (0^n a)^k 0^inf is rejected by the oracle.
// Over the membership oracle of G(f) this equals f(n) whenever f(n) >= 1;
// the k = 0 probe carries a single nonzero symbol and no gap, so no
// membership oracle can reject it, and the least rejected k is
// max(f(n), 1).  Throws GapRecoveryCapExceeded past the search cap.
struct GapRecoveryCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
uint64_t recover_f(const MembershipOracle& member, const Alphabet& alphabet,
                   const std::string& a, uint64_t n, uint64_t cap = 1u << 16);

// Finite presentation of a subshift of G(f): a list of cores v, each
// denoting ^inf0 v 0^inf with all translates implied.  Inserts are checked
// against the ambient shift.
class EnumeratedSubshift {
  public:
    explicit EnumeratedSubshift(GapShiftSpec ambient) : ambient_(std::move(ambient)) {}
    void insert(const Word& core);
    const std::vector<Word>& cores() const { return cores_; }
    const GapShiftSpec& ambient() const { return ambient_; }

  private:
    GapShiftSpec ambient_;
    std::vector<Word> cores_;
};

// Lower estimate of the gap function f_X(n): max of |v|_{!=0} over the
// first `budget` cores containing some a 0^m b with m <= n; 0 when no
// witness exists (empty-max convention).
uint64_t gap_function(const EnumeratedSubshift& X, uint64_t n, uint64_t budget);

// Enumerator of F(f) in a fixed order: words over the alphabet in
// length-lexicographic order, filtered by is_forbidden.
class ForbiddenEnumerator {
  public:
    explicit ForbiddenEnumerator(GapShiftSpec spec);
    Word next();

  private:
    GapShiftSpec spec_;
    std::vector<int> current_;  // next candidate word, length-lex order
    void advance();
};

inline constexpr uint64_t NO_BOUND_YET = std::numeric_limits<uint64_t>::max();

// Min over the first k enumerated members of F(f) of the form a (0^n a)^j
// of j; NO_BOUND_YET when none seen.  Nonincreasing in k; stabilizes at
// max(f(n), 1) for the canonical enumerator.
uint64_t upper_approx_f(ForbiddenEnumerator& en, const Alphabet& alphabet, uint64_t n,
                        uint64_t k);

// Membership of an ultimately periodic configuration in G(A,f,b): true iff
// some skeleton in G(f,{0,1}) together with independent replacements
// (arbitrary symbols within distance b of a 1, equal-length patterns with
// period <= b on the remaining zero runs) produces the configuration.
// The search places skeleton ones inside the nonperiodic core widened by
// b + max tail period; cap guards pathological cores.
bool generalized_membership(const BiInfiniteSpec& config, const GeneralizedGapSpec& gspec,
                            uint64_t cap = 1u << 22);

}  // namespace tilelab
