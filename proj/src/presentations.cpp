#include "loopforms/presentations.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <deque>
#include <functional>
#include <map>
#include <sstream>

#include "loopforms/errors.hpp"
#include "loopforms/util.hpp"

namespace loopforms {
namespace alg {

/******** monomials ********/

bool Monomial::is_one() const
{
    if (odd_mask != 0)
        return false;
    for (int e : even_exp)
        if (e)
            return false;
    return true;
}

int Monomial::poly_weight() const
{
    int w = std::popcount(odd_mask);
    for (int e : even_exp)
        w += e;
    return w;
}

bool mono_less(const Monomial& a, const Monomial& b)
{
    int wa = a.poly_weight(), wb = b.poly_weight();
    if (wa != wb)
        return wa < wb;
    /* lex with the first declared even generator most significant */
    for (size_t i = 0; i < a.even_exp.size(); ++i)
        if (a.even_exp[i] != b.even_exp[i])
            return a.even_exp[i] < b.even_exp[i];
    return a.odd_mask < b.odd_mask;
}

bool mono_divides(const Monomial& d, const Monomial& m)
{
    if ((d.odd_mask & m.odd_mask) != d.odd_mask)
        return false;
    for (size_t i = 0; i < d.even_exp.size(); ++i)
        if (d.even_exp[i] > m.even_exp[i])
            return false;
    return true;
}

std::optional<std::pair<Monomial, int>> mono_mul(const Monomial& a, const Monomial& b)
{
    if (a.odd_mask & b.odd_mask)
        return std::nullopt;  // odd square
    Monomial m;
    m.even_exp.resize(a.even_exp.size());
    for (size_t i = 0; i < a.even_exp.size(); ++i)
        m.even_exp[i] = a.even_exp[i] + b.even_exp[i];
    m.odd_mask = a.odd_mask | b.odd_mask;
    /* Koszul sign: count inversions between a's and b's odd factors */
    int inv = 0;
    uint64_t bm = b.odd_mask;
    while (bm) {
        int j = std::countr_zero(bm);
        bm &= bm - 1;
        uint64_t higher = a.odd_mask >> (j + 1);
        inv += std::popcount(higher);
    }
    return std::make_pair(std::move(m), (inv % 2) ? -1 : 1);
}

/******** free element arithmetic ********/

bool AlgebraElement::operator==(const AlgebraElement& o) const
{
    if (terms.size() != o.terms.size())
        return false;
    for (size_t i = 0; i < terms.size(); ++i)
        if (!(terms[i].mon == o.terms[i].mon) || terms[i].coef != o.terms[i].coef)
            return false;
    return true;
}

AlgebraElement e_zero()
{
    return {};
}

AlgebraElement e_term(Monomial m, Rational c)
{
    AlgebraElement e;
    if (!c.is_zero())
        e.terms.push_back({std::move(m), std::move(c)});
    return e;
}

static AlgebraElement normalize_terms(std::vector<Term> ts)
{
    std::sort(ts.begin(), ts.end(), [](const Term& a, const Term& b) { return mono_less(b.mon, a.mon); });
    AlgebraElement out;
    for (auto& t : ts) {
        if (t.coef.is_zero())
            continue;
        if (!out.terms.empty() && out.terms.back().mon == t.mon) {
            out.terms.back().coef += t.coef;
            if (out.terms.back().coef.is_zero())
                out.terms.pop_back();
        } else {
            out.terms.push_back(std::move(t));
        }
    }
    return out;
}

AlgebraElement e_add(const AlgebraElement& a, const AlgebraElement& b)
{
    std::vector<Term> ts = a.terms;
    ts.insert(ts.end(), b.terms.begin(), b.terms.end());
    return normalize_terms(std::move(ts));
}

AlgebraElement e_sub(const AlgebraElement& a, const AlgebraElement& b)
{
    std::vector<Term> ts = a.terms;
    for (const auto& t : b.terms)
        ts.push_back({t.mon, -t.coef});
    return normalize_terms(std::move(ts));
}

AlgebraElement e_scale(const AlgebraElement& a, const Rational& c)
{
    if (c.is_zero())
        return {};
    AlgebraElement out = a;
    for (auto& t : out.terms)
        t.coef *= c;
    return out;
}

AlgebraElement e_mul_mono(const AlgebraElement& a, const Monomial& m, const Rational& c)
{
    std::vector<Term> ts;
    for (const auto& t : a.terms) {
        auto p = mono_mul(t.mon, m);
        if (!p)
            continue;
        ts.push_back({p->first, t.coef * c * Rational(p->second)});
    }
    return normalize_terms(std::move(ts));
}

AlgebraElement e_mul(const AlgebraElement& a, const AlgebraElement& b)
{
    std::vector<Term> ts;
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms) {
            auto p = mono_mul(ta.mon, tb.mon);
            if (!p)
                continue;
            ts.push_back({p->first, ta.coef * tb.coef * Rational(p->second)});
        }
    return normalize_terms(std::move(ts));
}

/******** algebra queries ********/

int GCAlgebra::gen_index(const std::string& n) const
{
    for (size_t i = 0; i < gens.size(); ++i)
        if (gens[i].name == n)
            return int(i);
    return -1;
}

int GCAlgebra::coh_degree(const Monomial& m) const
{
    int d = 0;
    for (size_t i = 0; i < m.even_exp.size(); ++i)
        d += m.even_exp[i] * gens[even_gens[i]].coh_degree;
    uint64_t mask = m.odd_mask;
    while (mask) {
        int j = std::countr_zero(mask);
        mask &= mask - 1;
        d += gens[odd_gens[j]].coh_degree;
    }
    return d;
}

int GCAlgebra::form_weight(const Monomial& m) const
{
    int w = 0;
    for (size_t i = 0; i < m.even_exp.size(); ++i)
        w += m.even_exp[i] * gens[even_gens[i]].form_weight;
    uint64_t mask = m.odd_mask;
    while (mask) {
        int j = std::countr_zero(mask);
        mask &= mask - 1;
        w += gens[odd_gens[j]].form_weight;
    }
    return w;
}

Monomial GCAlgebra::one() const
{
    Monomial m;
    m.even_exp.assign(n_even(), 0);
    return m;
}

Monomial GCAlgebra::gen_monomial(int gi) const
{
    Monomial m = one();
    const Generator& g = gens[gi];
    if (g.is_odd()) {
        for (int j = 0; j < n_odd(); ++j)
            if (odd_gens[j] == gi)
                m.odd_mask = uint64_t(1) << j;
    } else {
        for (int i = 0; i < n_even(); ++i)
            if (even_gens[i] == gi)
                m.even_exp[i] = 1;
    }
    return m;
}

bool GCAlgebra::is_weight_graded() const
{
    for (const auto& g : rewrite) {
        int w = g.lead().mon.poly_weight();
        for (const auto& t : g.terms)
            if (t.mon.poly_weight() != w)
                return false;
    }
    return true;
}

/******** reduction and completion ********/

static AlgebraElement reduce_full(AlgebraElement work, const std::vector<AlgebraElement>& basis)
{
    std::vector<Term> done;
    while (!work.is_zero()) {
        const Term& t = work.lead();
        const AlgebraElement* g = nullptr;
        for (const auto& cand : basis)
            if (!cand.is_zero() && mono_divides(cand.lead().mon, t.mon)) {
                g = &cand;
                break;
            }
        if (!g) {
            done.push_back(t);
            work.terms.erase(work.terms.begin());
            continue;
        }
        Monomial u;
        u.even_exp.resize(t.mon.even_exp.size());
        for (size_t i = 0; i < u.even_exp.size(); ++i)
            u.even_exp[i] = t.mon.even_exp[i] - g->lead().mon.even_exp[i];
        u.odd_mask = t.mon.odd_mask & ~g->lead().mon.odd_mask;
        AlgebraElement h = e_mul_mono(*g, u, Rational(1));
        /* lead of h is t.mon (order is multiplication-compatible) */
        Rational factor = t.coef / h.lead().coef;
        work = e_sub(work, e_scale(h, factor));
    }
    AlgebraElement out;
    out.terms = std::move(done);
    return out;
}

static AlgebraElement make_monic(AlgebraElement e)
{
    if (!e.is_zero())
        e = e_scale(e, e.lead().coef.inverse());
    return e;
}

std::vector<AlgebraElement> buchberger(const GCAlgebra& shape, std::vector<AlgebraElement> input, int cap)
{
    std::vector<AlgebraElement> basis;
    std::deque<AlgebraElement> pending(input.begin(), input.end());

    auto enqueue_spairs = [&](size_t new_idx) {
        const AlgebraElement& f = basis[new_idx];
        for (size_t i = 0; i < new_idx; ++i) {
            const AlgebraElement& g = basis[i];
            const Monomial& lf = f.lead().mon;
            const Monomial& lg = g.lead().mon;
            Monomial uf, ug;
            uf.even_exp.resize(lf.even_exp.size());
            ug.even_exp.resize(lf.even_exp.size());
            for (size_t k = 0; k < lf.even_exp.size(); ++k) {
                int l = std::max(lf.even_exp[k], lg.even_exp[k]);
                uf.even_exp[k] = l - lf.even_exp[k];
                ug.even_exp[k] = l - lg.even_exp[k];
            }
            uf.odd_mask = lg.odd_mask & ~lf.odd_mask;
            ug.odd_mask = lf.odd_mask & ~lg.odd_mask;
            AlgebraElement hf = e_mul_mono(f, uf, Rational(1));
            AlgebraElement hg = e_mul_mono(g, ug, Rational(1));
            if (hf.is_zero() || hg.is_zero())
                continue;
            AlgebraElement s = e_sub(e_scale(hf, hf.lead().coef.inverse()),
                                     e_scale(hg, hg.lead().coef.inverse()));
            if (!s.is_zero())
                pending.push_back(std::move(s));
        }
        /* odd saturation: products where the lead dies are genuinely new */
        for (int j = 0; j < int(shape.odd_gens.size()); ++j) {
            Monomial theta = shape.one();
            theta.odd_mask = uint64_t(1) << j;
            AlgebraElement h = e_mul_mono(f, theta, Rational(1));
            if (!h.is_zero() && (f.lead().mon.odd_mask >> j) & 1)
                pending.push_back(std::move(h));
        }
    };

    while (!pending.empty()) {
        AlgebraElement e = std::move(pending.front());
        pending.pop_front();
        e = make_monic(reduce_full(std::move(e), basis));
        if (e.is_zero())
            continue;
        basis.push_back(std::move(e));
        if (int(basis.size()) > cap)
            throw NonterminationGuard("basis size " + std::to_string(basis.size()));
        enqueue_spairs(basis.size() - 1);
    }

    /* inter-reduce to the unique reduced basis */
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < basis.size(); ++i) {
            AlgebraElement self = std::move(basis[i]);
            basis[i] = e_zero();
            AlgebraElement r = make_monic(reduce_full(self, basis));
            if (!(r == self))
                changed = true;
            basis[i] = std::move(r);
        }
        basis.erase(std::remove_if(basis.begin(), basis.end(),
                                   [](const AlgebraElement& g) { return g.is_zero(); }),
                    basis.end());
    }
    std::sort(basis.begin(), basis.end(),
              [](const AlgebraElement& a, const AlgebraElement& b) { return mono_less(a.lead().mon, b.lead().mon); });
    return basis;
}

AlgebraElement GCAlgebra::normal_form(const AlgebraElement& e) const
{
    return reduce_full(e, rewrite);
}

AlgebraElement GCAlgebra::mul_nf(const AlgebraElement& a, const AlgebraElement& b) const
{
    return normal_form(e_mul(a, b));
}

GCAlgebra make_algebra(std::string name, std::vector<Generator> gens,
                       std::vector<AlgebraElement> raw_relations)
{
    GCAlgebra a;
    a.name = std::move(name);
    a.gens = std::move(gens);
    for (size_t i = 0; i < a.gens.size(); ++i) {
        for (size_t j = i + 1; j < a.gens.size(); ++j)
            if (a.gens[i].name == a.gens[j].name)
                throw GradingError("duplicate generator name " + a.gens[i].name);
        if (a.gens[i].is_odd())
            a.odd_gens.push_back(int(i));
        else
            a.even_gens.push_back(int(i));
    }
    if (a.odd_gens.size() > 62)
        throw GradingError("too many odd generators");

    for (auto& r : raw_relations) {
        /* the element arithmetic already applied odd squares and signs */
        if (r.is_zero())
            throw SignError("relation normalizes to zero (odd squares vanish implicitly)");
        int coh = a.coh_degree(r.terms.front().mon);
        int fw = a.form_weight(r.terms.front().mon);
        for (const auto& t : r.terms)
            if (a.coh_degree(t.mon) != coh || a.form_weight(t.mon) != fw)
                throw GradingError("relation is inhomogeneous in (degree, weight)");
        a.relations.push_back(r);
    }
    a.rewrite = buchberger(a, a.relations);
    return a;
}

/******** bases ********/

static void enumerate_even(const GCAlgebra& a, int slot, int remaining, Monomial& cur,
                           const std::function<void(const Monomial&)>& yield)
{
    if (slot == a.n_even()) {
        yield(cur);
        return;
    }
    for (int e = 0; e <= remaining; ++e) {
        cur.even_exp[slot] = e;
        enumerate_even(a, slot + 1, remaining - e, cur, yield);
    }
    cur.even_exp[slot] = 0;
}

static bool is_normal(const GCAlgebra& a, const Monomial& m)
{
    for (const auto& g : a.rewrite)
        if (mono_divides(g.lead().mon, m))
            return false;
    return true;
}

static std::vector<Monomial> enumerate_basis(const GCAlgebra& a, int cap,
                                             const std::function<bool(const Monomial&)>& keep)
{
    if (cap < 0)
        throw InfiniteBasis("a poly-weight cap is required; uncapped bidegree slices can be "
                            "infinite-dimensional");
    std::vector<Monomial> out;
    long slot_cap = max_basis_cap();
    for (uint64_t mask = 0; mask < (uint64_t(1) << a.n_odd()); ++mask) {
        int oc = std::popcount(mask);
        if (oc > cap)
            continue;
        Monomial cur = a.one();
        cur.odd_mask = mask;
        enumerate_even(a, 0, cap - oc, cur, [&](const Monomial& m) {
            if (keep(m) && is_normal(a, m)) {
                out.push_back(m);
                if (long(out.size()) > slot_cap)
                    throw SlotCapExceeded("basis slot larger than LOOPFORMS_MAX_BASIS");
            }
        });
    }
    std::sort(out.begin(), out.end(), mono_less);
    return out;
}

std::vector<Monomial> weight_basis(const GCAlgebra& a, int coh_degree, int weight, int cap)
{
    return enumerate_basis(a, cap, [&](const Monomial& m) {
        return a.coh_degree(m) == coh_degree && a.form_weight(m) == weight;
    });
}

std::vector<Monomial> basis_exact_weight(const GCAlgebra& a, int coh_degree, int weight, int w)
{
    return enumerate_basis(a, w, [&](const Monomial& m) {
        return m.poly_weight() == w && a.coh_degree(m) == coh_degree && a.form_weight(m) == weight;
    });
}

std::vector<Monomial> monomials_of_weight(const GCAlgebra& a, int w)
{
    return enumerate_basis(a, w, [&](const Monomial& m) { return m.poly_weight() == w; });
}

/******** printing ********/

std::string GCAlgebra::monomial_str(const Monomial& m) const
{
    std::ostringstream os;
    bool first = true;
    for (size_t gi = 0; gi < gens.size(); ++gi) {
        int exp = 0;
        if (gens[gi].is_odd()) {
            for (int j = 0; j < n_odd(); ++j)
                if (odd_gens[j] == int(gi) && ((m.odd_mask >> j) & 1))
                    exp = 1;
        } else {
            for (int i = 0; i < n_even(); ++i)
                if (even_gens[i] == int(gi))
                    exp = m.even_exp[i];
        }
        if (!exp)
            continue;
        if (!first)
            os << "*";
        os << gens[gi].name;
        if (exp > 1)
            os << "^" << exp;
        first = false;
    }
    if (first)
        os << "1";
    return os.str();
}

std::string GCAlgebra::element_str(const AlgebraElement& e) const
{
    if (e.is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : e.terms) {
        Rational c = t.coef;
        if (first) {
            if (c.sign() < 0) {
                os << "-";
                c = -c;
            }
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
            c = c.abs();
        }
        if (t.mon.is_one())
            os << c.str();
        else {
            if (!c.is_one())
                os << c.str() << "*";
            os << monomial_str(t.mon);
        }
        first = false;
    }
    return os.str();
}

/******** DSL parsing ********/

namespace {

struct Token {
    enum Kind { Ident, Int, Sym, End } kind;
    std::string text;
    long value = 0;
    int line = 1, col = 1;
};

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1, col = 1;
    Token cur;

    explicit Lexer(const std::string& s) : src(s) { advance(); }

    void bump(char c)
    {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void advance()
    {
        while (pos < src.size()) {
            char c = src[pos];
            if (c == '#') {
                while (pos < src.size() && src[pos] != '\n')
                    bump(src[pos]);
            } else if (std::isspace(uint8_t(c))) {
                bump(c);
            } else {
                break;
            }
        }
        cur.line = line;
        cur.col = col;
        if (pos >= src.size()) {
            cur.kind = Token::End;
            cur.text.clear();
            return;
        }
        char c = src[pos];
        if (std::isalpha(uint8_t(c)) || c == '_') {
            std::string t;
            while (pos < src.size() && (std::isalnum(uint8_t(src[pos])) || src[pos] == '_')) {
                t += src[pos];
                bump(src[pos]);
            }
            cur.kind = Token::Ident;
            cur.text = t;
        } else if (std::isdigit(uint8_t(c))) {
            std::string t;
            while (pos < src.size() && std::isdigit(uint8_t(src[pos]))) {
                t += src[pos];
                bump(src[pos]);
            }
            cur.kind = Token::Int;
            cur.text = t;
            cur.value = std::stol(t);
        } else if (uint8_t(c) == 0xCE && pos + 1 < src.size() && uint8_t(src[pos + 1]) == 0x93) {
            /* UTF-8 capital gamma, used for connection matrices */
            bump(c);
            bump(src[pos]);
            cur.kind = Token::Ident;
            cur.text = "G";
        } else {
            cur.kind = Token::Sym;
            cur.text = std::string(1, c);
            bump(c);
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(cur.line, cur.col, msg); }

    bool is_sym(const char* s) const { return cur.kind == Token::Sym && cur.text == s; }
    bool is_ident(const char* s) const { return cur.kind == Token::Ident && cur.text == s; }

    void expect_sym(const char* s)
    {
        if (!is_sym(s))
            fail(std::string("expected '") + s + "'");
        advance();
    }
    void expect_ident(const char* s)
    {
        if (!is_ident(s))
            fail(std::string("expected '") + s + "'");
        advance();
    }
    std::string take_ident()
    {
        if (cur.kind != Token::Ident)
            fail("expected identifier");
        std::string t = cur.text;
        advance();
        return t;
    }
    long take_int()
    {
        bool neg = false;
        if (is_sym("-")) {
            neg = true;
            advance();
        }
        if (cur.kind != Token::Int)
            fail("expected integer");
        long v = cur.value;
        advance();
        return neg ? -v : v;
    }
};

/* expression parser over a declared algebra; `strict_odd` raises SignError
 * on odd squares written in the source (used for relation lists) */
struct ExprParser {
    Lexer& lx;
    const GCAlgebra& a;
    bool strict_odd;

    AlgebraElement parse() { return sum(); }

    AlgebraElement sum()
    {
        AlgebraElement e = lx.is_sym("-") ? (lx.advance(), e_scale(product(), Rational(-1))) : product();
        while (lx.is_sym("+") || lx.is_sym("-")) {
            bool plus = lx.is_sym("+");
            lx.advance();
            AlgebraElement r = product();
            e = plus ? e_add(e, r) : e_sub(e, r);
        }
        return e;
    }

    AlgebraElement mul_checked(const AlgebraElement& x, const AlgebraElement& y)
    {
        if (strict_odd) {
            for (const auto& tx : x.terms)
                for (const auto& ty : y.terms)
                    if (tx.mon.odd_mask & ty.mon.odd_mask)
                        throw SignError("odd generator squared in relation");
        }
        return e_mul(x, y);
    }

    AlgebraElement product()
    {
        AlgebraElement e = power();
        while (lx.is_sym("*")) {
            lx.advance();
            e = mul_checked(e, power());
        }
        return e;
    }

    AlgebraElement power()
    {
        AlgebraElement base = atom();
        if (lx.is_sym("^")) {
            lx.advance();
            long n = lx.take_int();
            if (n < 0)
                lx.fail("negative exponent");
            AlgebraElement e = e_term(a.one(), Rational(1));
            for (long i = 0; i < n; ++i)
                e = mul_checked(e, base);
            return e;
        }
        return base;
    }

    AlgebraElement atom()
    {
        if (lx.is_sym("(")) {
            lx.advance();
            AlgebraElement e = sum();
            lx.expect_sym(")");
            return e;
        }
        if (lx.is_sym("-")) {
            lx.advance();
            return e_scale(atom(), Rational(-1));
        }
        if (lx.cur.kind == Token::Int) {
            long num = lx.take_int();
            if (lx.is_sym("/")) {
                lx.advance();
                long den = lx.take_int();
                if (den == 0)
                    lx.fail("zero denominator");
                return e_term(a.one(), Rational(num, den));
            }
            return e_term(a.one(), Rational(num));
        }
        if (lx.cur.kind == Token::Ident) {
            int line = lx.cur.line, col = lx.cur.col;
            std::string name = lx.take_ident();
            int gi = a.gen_index(name);
            if (gi < 0)
                throw UnknownGenerator(name + " (at " + std::to_string(line) + ":" + std::to_string(col) + ")");
            return e_term(a.gen_monomial(gi), Rational(1));
        }
        lx.fail("expected expression");
    }
};

std::vector<Generator> parse_genlist(Lexer& lx)
{
    std::vector<Generator> gens;
    while (true) {
        Generator g;
        g.name = lx.take_ident();
        lx.expect_sym(":");
        lx.expect_sym("(");
        g.coh_degree = int(lx.take_int());
        lx.expect_sym(",");
        g.form_weight = int(lx.take_int());
        lx.expect_sym(")");
        gens.push_back(std::move(g));
        if (lx.is_sym(",")) {
            lx.advance();
            continue;
        }
        break;
    }
    return gens;
}

GCAlgebra parse_algebra_body(Lexer& lx)
{
    std::string name = lx.take_ident();
    lx.expect_sym("{");
    lx.expect_ident("gens");
    lx.expect_sym(":");
    std::vector<Generator> gens = parse_genlist(lx);
    lx.expect_sym(";");

    /* gens must be known before relation expressions parse */
    GCAlgebra shape = make_algebra(name, gens);

    std::vector<AlgebraElement> rels;
    if (lx.is_ident("rels")) {
        lx.advance();
        lx.expect_sym(":");
        while (true) {
            ExprParser ep{lx, shape, /*strict_odd=*/true};
            rels.push_back(ep.parse());
            if (lx.is_sym(",")) {
                lx.advance();
                continue;
            }
            break;
        }
        lx.expect_sym(";");
    }
    lx.expect_sym("}");
    return make_algebra(name, gens, std::move(rels));
}

ConnectionDecl parse_module_body(Lexer& lx)
{
    ConnectionDecl m;
    m.name = lx.take_ident();
    lx.expect_ident("over");
    m.base = lx.take_ident();
    lx.expect_sym("{");
    lx.expect_ident("rank");
    lx.expect_sym(":");
    m.rank = int(lx.take_int());
    if (m.rank < 1)
        lx.fail("rank must be >= 1");
    lx.expect_sym(";");
    while (lx.is_ident("conn")) {
        lx.advance();
        lx.expect_sym(":");
        while (true) {
            std::string g = lx.take_ident();
            if (g != "G" && g != "Gamma")
                lx.fail("connection entries are written G[i][j] = expr");
            ConnectionDecl::ConnEntry e;
            lx.expect_sym("[");
            e.i = int(lx.take_int());
            lx.expect_sym("]");
            lx.expect_sym("[");
            e.j = int(lx.take_int());
            lx.expect_sym("]");
            lx.expect_sym("=");
            /* capture the raw expression text up to ',' or ';' at depth 0 */
            std::ostringstream raw;
            int depth = 0;
            while (!(depth == 0 && (lx.is_sym(",") || lx.is_sym(";")))) {
                if (lx.cur.kind == Token::End)
                    lx.fail("unterminated connection entry");
                if (lx.is_sym("("))
                    ++depth;
                if (lx.is_sym(")"))
                    --depth;
                raw << lx.cur.text << " ";
                lx.advance();
            }
            e.expr = raw.str();
            if (e.i < 0 || e.i >= m.rank || e.j < 0 || e.j >= m.rank)
                lx.fail("connection index out of range");
            m.entries.push_back(std::move(e));
            if (lx.is_sym(",")) {
                lx.advance();
                continue;
            }
            break;
        }
        lx.expect_sym(";");
    }
    lx.expect_sym("}");
    return m;
}

}  // namespace

ParsedFile parse_file(const std::string& text)
{
    Lexer lx(text);
    ParsedFile out;
    while (lx.cur.kind != Token::End) {
        if (lx.is_ident("algebra")) {
            lx.advance();
            out.algebras.push_back(parse_algebra_body(lx));
        } else if (lx.is_ident("module")) {
            lx.advance();
            out.modules.push_back(parse_module_body(lx));
        } else {
            lx.fail("expected 'algebra' or 'module'");
        }
    }
    for (const auto& m : out.modules) {
        bool found = false;
        for (const auto& a : out.algebras)
            if (a.name == m.base)
                found = true;
        if (!found)
            throw ParseError(1, 1, "module " + m.name + " over unknown algebra " + m.base);
    }
    return out;
}

GCAlgebra parse_algebra(const std::string& text)
{
    ParsedFile f = parse_file(text);
    if (f.algebras.empty())
        throw ParseError(1, 1, "no algebra item in input");
    return f.algebras.front();
}

AlgebraElement parse_element(const GCAlgebra& a, const std::string& expr)
{
    Lexer lx(expr);
    ExprParser ep{lx, a, /*strict_odd=*/false};
    AlgebraElement e = ep.parse();
    if (lx.cur.kind != Token::End)
        lx.fail("trailing input after expression");
    return a.normal_form(e);
}

}  // namespace alg
}  // namespace loopforms
