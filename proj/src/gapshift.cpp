#include "tilelab/gapshift.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace tilelab {

// --- gap function expressions -----------------------------------------------
//
// expr := term ('+' term)* ; term := factor ('*' factor)* ;
// factor := INT | 'n' | 'max' '(' expr ',' expr ')' | '(' expr ')'
// Every operation is monotone on N, so expression-form functions are
// nondecreasing by construction.

namespace {

struct ExprNode {
    enum Kind { Const, Var, Add, Mul, Max } kind;
    uint64_t value = 0;
    std::shared_ptr<ExprNode> a, b;
};
using ExprPtr = std::shared_ptr<ExprNode>;

struct ExprParser {
    const std::string& s;
    size_t pos = 0;

    explicit ExprParser(const std::string& text) : s(text) {}

    void skip() {
        while (pos < s.size() && isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    ExprPtr parse() {
        ExprPtr e = expr();
        skip();
        if (pos != s.size()) throw std::invalid_argument("trailing input in expression: " + s);
        return e;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        while (eat('+')) {
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Add;
            n->a = e;
            n->b = term();
            e = n;
        }
        return e;
    }

    ExprPtr term() {
        ExprPtr e = factor();
        while (eat('*')) {
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Mul;
            n->a = e;
            n->b = factor();
            e = n;
        }
        return e;
    }

    ExprPtr factor() {
        skip();
        if (pos >= s.size()) throw std::invalid_argument("unexpected end of expression: " + s);
        if (isdigit(static_cast<unsigned char>(s[pos]))) {
            uint64_t v = 0;
            while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos])))
                v = v * 10 + (s[pos++] - '0');
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Const;
            n->value = v;
            return n;
        }
        if (s.compare(pos, 3, "max") == 0) {
            pos += 3;
            if (!eat('(')) throw std::invalid_argument("max needs '('");
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Max;
            n->a = expr();
            if (!eat(',')) throw std::invalid_argument("max needs two arguments");
            n->b = expr();
            if (!eat(')')) throw std::invalid_argument("max needs ')'");
            return n;
        }
        if (s[pos] == 'n') {
            ++pos;
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Var;
            return n;
        }
        if (eat('(')) {
            ExprPtr e = expr();
            if (!eat(')')) throw std::invalid_argument("missing ')'");
            return e;
        }
        throw std::invalid_argument("bad expression token in: " + s);
    }
};

uint64_t eval_expr(const ExprNode& e, uint64_t n) {
    switch (e.kind) {
        case ExprNode::Const: return e.value;
        case ExprNode::Var: return n;
        case ExprNode::Add: return eval_expr(*e.a, n) + eval_expr(*e.b, n);
        case ExprNode::Mul: return eval_expr(*e.a, n) * eval_expr(*e.b, n);
        case ExprNode::Max: return std::max(eval_expr(*e.a, n), eval_expr(*e.b, n));
    }
    return 0;
}

uint64_t eval_expr_str(const std::string& text, uint64_t n) {
    ExprParser p(text);
    return eval_expr(*p.parse(), n);
}

}  // namespace

GapFunction GapFunction::expr(const std::string& expression) {
    GapFunction f;
    f.expr_ = expression;
    eval_expr_str(expression, 0);  // validate now
    f.nondecreasing_ = true;       // all grammar operations are monotone
    return f;
}

GapFunction GapFunction::table(std::vector<uint64_t> values, const std::string& default_expr) {
    GapFunction f;
    f.table_ = std::move(values);
    f.default_expr_ = default_expr;
    eval_expr_str(default_expr, 0);
    f.check_monotone();
    return f;
}

void GapFunction::check_monotone() {
    nondecreasing_ = true;
    for (size_t i = 1; i < table_.size(); ++i)
        if (table_[i] < table_[i - 1]) nondecreasing_ = false;
    if (!table_.empty() && nondecreasing_) {
        uint64_t next = eval_expr_str(default_expr_, table_.size());
        if (next < table_.back()) nondecreasing_ = false;
    }
}

GapFunction GapFunction::parse(const std::string& text) {
    std::string s = text;
    auto trim = [](std::string& v) {
        size_t a = v.find_first_not_of(" \t");
        size_t b = v.find_last_not_of(" \t");
        v = a == std::string::npos ? "" : v.substr(a, b - a + 1);
    };
    trim(s);
    if (s.rfind("expr:", 0) == 0) {
        std::string e = s.substr(5);
        trim(e);
        return expr(e);
    }
    if (s.rfind("table:", 0) == 0) {
        std::string body = s.substr(6);
        size_t dpos = body.find("default:");
        if (dpos == std::string::npos)
            throw std::invalid_argument("table form needs 'default:'");
        std::string entries = body.substr(0, dpos);
        std::string def = body.substr(dpos + 8);
        trim(def);
        std::istringstream in(entries);
        std::string tok;
        std::map<uint64_t, uint64_t> map;
        while (in >> tok) {
            size_t arrow = tok.find("->");
            if (arrow == std::string::npos)
                throw std::invalid_argument("table entry must be n->v, got " + tok);
            uint64_t n = std::stoull(tok.substr(0, arrow));
            uint64_t v = std::stoull(tok.substr(arrow + 2));
            map[n] = v;
        }
        std::vector<uint64_t> values;
        for (auto& [n, v] : map) {
            if (n != values.size())
                throw std::invalid_argument("table entries must cover 0..k contiguously");
            values.push_back(v);
        }
        return table(std::move(values), def);
    }
    // bare expression accepted as shorthand
    return expr(s);
}

uint64_t GapFunction::operator()(uint64_t n) const {
    if (n < table_.size()) return table_[n];
    return eval_expr_str(default_expr_.empty() ? expr_ : default_expr_, n);
}

std::string GapFunction::str() const {
    if (table_.empty() && default_expr_.empty()) return "expr: " + expr_;
    std::ostringstream out;
    out << "table:";
    for (size_t i = 0; i < table_.size(); ++i) out << " " << i << "->" << table_[i];
    out << " default: " << default_expr_;
    return out.str();
}

GapShiftSpec::GapShiftSpec(Alphabet a, GapFunction fn) : alphabet(std::move(a)), f(std::move(fn)) {
    if (!alphabet.zero) throw std::invalid_argument("gap shift alphabet needs a zero symbol");
}

GeneralizedGapSpec::GeneralizedGapSpec(Alphabet a, GapFunction fn, int bound)
    : alphabet(std::move(a)), f(std::move(fn)), b(bound) {
    if (b < 1) throw std::invalid_argument("bound b must be >= 1");
}

std::vector<int> internal_gaps(const Word& w, int zero) {
    std::vector<int> gaps;
    int prev = -1;
    for (int i = 0; i < w.size(); ++i) {
        if (w[i] == zero) continue;
        if (prev >= 0) gaps.push_back(i - prev - 1);
        prev = i;
    }
    return gaps;
}

int nonzero_count(const Word& w, int zero) {
    int c = 0;
    for (int s : w.syms)
        if (s != zero) ++c;
    return c;
}

static void check_alphabet(const Word& w, const GapShiftSpec& spec) {
    for (int s : w.syms)
        if (s < 0 || s >= spec.alphabet.size())
            throw std::invalid_argument("word symbol outside alphabet");
}

bool is_forbidden(const Word& w, const GapShiftSpec& spec) {
    check_alphabet(w, spec);
    int zero = spec.alphabet.zero_index();
    int count = nonzero_count(w, zero);
    if (count < 2) return false;
    for (int n : internal_gaps(w, zero))
        if (static_cast<uint64_t>(count) > spec.f(static_cast<uint64_t>(n))) return true;
    return false;
}

bool word_in_language(const Word& w, const GapShiftSpec& spec) {
    return !is_forbidden(w, spec);
}

bool biinfinite_membership(const BiInfiniteSpec& spec01, const GapShiftSpec& spec) {
    int zero = spec.alphabet.zero_index();
    check_alphabet(spec01.left, spec);
    check_alphabet(spec01.mid, spec);
    check_alphabet(spec01.right, spec);
    // A nonzero tail means infinitely many nonzero symbols.
    if (nonzero_count(spec01.left, zero) > 0) return false;
    if (nonzero_count(spec01.right, zero) > 0) return false;
    return word_in_language(spec01.mid, spec);
}

uint64_t recover_f(const MembershipOracle& member, const Alphabet& alphabet,
                   const std::string& a, uint64_t n, uint64_t cap) {
    int zi = alphabet.zero_index();
    int ai = alphabet.index_of(a);
    if (zi < 0) throw std::invalid_argument("alphabet needs a zero symbol");
    if (ai < 0 || ai == zi) throw std::invalid_argument("a must be a nonzero symbol");
    Word zeroes(std::vector<int>{zi});
    for (uint64_t k = 0; k <= cap; ++k) {
        std::vector<int> mid;
        mid.push_back(ai);
        for (uint64_t j = 0; j < k; ++j) {
            for (uint64_t z = 0; z < n; ++z) mid.push_back(zi);
            mid.push_back(ai);
        }
        if (!member(BiInfiniteSpec(zeroes, Word(std::move(mid)), zeroes)))
            return k;
    }
    throw GapRecoveryCapExceeded("no rejected probe below the search cap; suspicious oracle");
}

void EnumeratedSubshift::insert(const Word& core) {
    int zi = ambient_.alphabet.zero_index();
    Word zeroes(std::vector<int>{zi});
    if (!biinfinite_membership(BiInfiniteSpec(zeroes, core, zeroes), ambient_))
        throw std::invalid_argument("core configuration not in the ambient gap width shift");
    cores_.push_back(core);
}

uint64_t gap_function(const EnumeratedSubshift& X, uint64_t n, uint64_t budget) {
    int zero = X.ambient().alphabet.zero_index();
    uint64_t best = 0;
    uint64_t limit = std::min<uint64_t>(budget, X.cores().size());
    for (uint64_t i = 0; i < limit; ++i) {
        const Word& v = X.cores()[i];
        bool witness = false;
        for (int g : internal_gaps(v, zero))
            if (static_cast<uint64_t>(g) <= n) witness = true;
        if (witness)
            best = std::max<uint64_t>(best, static_cast<uint64_t>(nonzero_count(v, zero)));
    }
    return best;
}

ForbiddenEnumerator::ForbiddenEnumerator(GapShiftSpec spec) : spec_(std::move(spec)) {}

void ForbiddenEnumerator::advance() {
    int radix = spec_.alphabet.size();
    int i = static_cast<int>(current_.size()) - 1;
    while (i >= 0 && current_[i] == radix - 1) current_[i--] = 0;
    if (i < 0)
        current_.assign(current_.size() + 1, 0);
    else
        ++current_[i];
}

Word ForbiddenEnumerator::next() {
    while (true) {
        advance();
        Word w{current_};
        if (is_forbidden(w, spec_)) return w;
    }
}

uint64_t upper_approx_f(ForbiddenEnumerator& en, const Alphabet& alphabet, uint64_t n,
                        uint64_t k) {
    int zi = alphabet.zero_index();
    int ai = -1;
    for (int i = 0; i < alphabet.size(); ++i)
        if (i != zi) {
            ai = i;
            break;
        }
    auto probe_j = [&](const Word& w) -> std::optional<uint64_t> {
        // matches a (0^n a)^j ?
        if (w.empty() || w[0] != ai || w[w.size() - 1] != ai) return std::nullopt;
        uint64_t count = 0;
        for (int s : w.syms) {
            if (s == ai) ++count;
            else if (s != zi) return std::nullopt;
        }
        if (static_cast<uint64_t>(w.size()) != count + (count - 1) * n) return std::nullopt;
        for (int g : internal_gaps(w, zi))
            if (static_cast<uint64_t>(g) != n) return std::nullopt;
        return count - 1;
    };
    uint64_t best = NO_BOUND_YET;
    for (uint64_t i = 0; i < k; ++i) {
        Word w = en.next();
        if (auto j = probe_j(w)) best = std::min(best, *j);
    }
    return best;
}

// --- generalized gap shifts G(A,f,b) -----------------------------------------

namespace {

// True iff the bi-infinite periodic word tail^inf has period q.
bool tail_periodic(const Word& tail, int q) {
    int p = tail.size();
    for (int i = 0; i < p; ++i)
        if (tail[i] != tail[((i + q) % p + p) % p]) return false;
    return true;
}

struct GenSearch {
    const BiInfiniteSpec& cfg;
    const GeneralizedGapSpec& g;
    long long lo_check, hi_check;  // sampled range for periodicity checks
    long long core_lo, core_hi;    // candidate window for skeleton ones
    std::vector<bool> left_tail_ok, right_tail_ok;  // index q-1
    uint64_t budget;

    int val(long long i) const { return eval_biinfinite(cfg, i); }

    bool range_periodic(long long from, long long to, int q) const {
        for (long long i = from; i + q <= to; ++i)
            if (val(i) != val(i + q)) return false;
        return true;
    }

    // left-infinite run (-inf, e]
    bool left_run_ok(long long e) const {
        for (int q = 1; q <= g.b; ++q)
            if (left_tail_ok[q - 1] && range_periodic(lo_check, e, q)) return true;
        return false;
    }
    // right-infinite run [s, +inf)
    bool right_run_ok(long long s) const {
        for (int q = 1; q <= g.b; ++q)
            if (right_tail_ok[q - 1] && range_periodic(s, hi_check, q)) return true;
        return false;
    }
    // finite run [s, e]; empty intervals pass
    bool finite_run_ok(long long s, long long e) const {
        if (s > e) return true;
        for (int q = 1; q <= g.b; ++q)
            if (range_periodic(s, e, q)) return true;
        return false;
    }

    bool whole_line_ok() const {
        for (int q = 1; q <= g.b; ++q)
            if (left_tail_ok[q - 1] && right_tail_ok[q - 1] &&
                range_periodic(lo_check, hi_check, q))
                return true;
        return false;
    }

    // ones chosen so far, ascending; prev runs already verified
    bool dfs(long long next_pos, std::vector<long long>& ones) {
        if (budget-- == 0) throw std::runtime_error("generalized membership search cap exceeded");
        if (next_pos > core_hi) {
            // complete skeleton
            if (ones.empty()) return whole_line_ok();
            uint64_t k = ones.size();
            if (k >= 2)
                for (size_t i = 1; i < ones.size(); ++i) {
                    uint64_t gap = static_cast<uint64_t>(ones[i] - ones[i - 1] - 1);
                    if (k > g.f(gap)) return false;
                }
            if (!left_run_ok(ones.front() - g.b - 1)) return false;
            if (!right_run_ok(ones.back() + g.b + 1)) return false;
            return true;
        }
        // skip this position
        if (dfs(next_pos + 1, ones)) return true;
        // place a one here; check the finite run since the previous one
        if (!ones.empty()) {
            long long s = ones.back() + g.b + 1;
            long long e = next_pos - g.b - 1;
            if (!finite_run_ok(s, e)) {
                // placing later ones only lengthens this run; still must try
                // other placements of the previous one, so just reject here
                return false;
            }
        }
        ones.push_back(next_pos);
        bool found = dfs(next_pos + 1, ones);
        ones.pop_back();
        return found;
    }
};

}  // namespace

bool generalized_membership(const BiInfiniteSpec& config, const GeneralizedGapSpec& gspec,
                            uint64_t cap) {
    for (const Word* w : {&config.left, &config.mid, &config.right})
        for (int s : w->syms)
            if (s < 0 || s >= gspec.alphabet.size())
                throw std::invalid_argument("configuration symbol outside alphabet");

    GenSearch gs{config, gspec, 0, 0, 0, 0, {}, {}, cap};
    long long P = std::max<long long>({config.left.size(), config.right.size(),
                                       static_cast<long long>(gspec.b)});
    long long D = gspec.b + P;
    gs.core_lo = -D;
    gs.core_hi = (config.mid.size() ? config.mid.size() - 1 : 0) + D;
    long long pad = gspec.b + 2 * (P + gspec.b) + 2;
    gs.lo_check = gs.core_lo - pad;
    gs.hi_check = gs.core_hi + pad;
    for (int q = 1; q <= gspec.b; ++q) {
        gs.left_tail_ok.push_back(tail_periodic(config.left, q));
        gs.right_tail_ok.push_back(tail_periodic(config.right, q));
    }
    std::vector<long long> ones;
    return gs.dfs(gs.core_lo, ones);
}

}  // namespace tilelab
