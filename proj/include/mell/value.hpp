#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mell {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An atom of A' : a plain name with an optional index sequence.
struct Atom {
    std::string name;
    std::vector<int> loc;

    bool plain() const { return loc.empty(); }
    auto operator<=>(const Atom&) const = default;
    bool operator==(const Atom&) const = default;
};

enum class Kind : std::uint8_t { Atom, Unit, Pair, Bag };

class Value;
using Multiset = std::vector<Value>;  // always kept sorted
using Tuple = std::vector<Value>;

class Value {
    struct Rep {
        Kind kind;
        bool pos;
        Atom atom;
        std::vector<Value> items;
        std::size_t hash;
        std::size_t shape;
        std::size_t size;
        bool has_atoms;
    };
    std::shared_ptr<const Rep> rep_;

    explicit Value(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}

    static std::size_t mix(std::size_t h, std::size_t v) {
        return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }

    static Value make(Kind k, bool pos, Atom a, std::vector<Value> items) {
        std::size_t h = mix(static_cast<std::size_t>(k), pos ? 7 : 3);
        // shape ignores atom names and bag order
        std::size_t sh = k == Kind::Atom ? 0x51ed27ULL : h;
        std::size_t bagsum = 0;
        std::size_t size = 1;
        bool atoms = (k == Kind::Atom);
        if (k == Kind::Atom) {
            h = mix(h, std::hash<std::string>{}(a.name));
            for (int i : a.loc) h = mix(h, static_cast<std::size_t>(i));
        }
        for (const auto& v : items) {
            h = mix(h, v.hash());
            if (k == Kind::Bag) bagsum += mix(0x2545f491ULL, v.shape());
            else sh = mix(sh, v.shape());
            size += v.size();
            atoms = atoms || v.has_atoms();
        }
        if (k == Kind::Bag) sh = mix(mix(sh, bagsum), items.size());
        auto r = std::make_shared<Rep>(Rep{k, pos, std::move(a), std::move(items), h, sh, size, atoms});
        return Value(std::move(r));
    }

public:
    Value() : Value(unit(true)) {}

    static Value atom(Atom a) { return make(Kind::Atom, false, std::move(a), {}); }
    static Value atom(std::string name, std::vector<int> loc = {}) {
        return atom(Atom{std::move(name), std::move(loc)});
    }
    static Value unit(bool pos) { return make(Kind::Unit, pos, {}, {}); }
    static Value pair(bool pos, Value a, Value b) {
        return make(Kind::Pair, pos, {}, {std::move(a), std::move(b)});
    }
    static Value bag(bool pos, Multiset items) {
        std::sort(items.begin(), items.end());
        return make(Kind::Bag, pos, {}, std::move(items));
    }

    Kind kind() const { return rep_->kind; }
    bool pos() const { return rep_->pos; }
    bool is_atom() const { return kind() == Kind::Atom; }
    bool is_unit() const { return kind() == Kind::Unit; }
    bool is_pair() const { return kind() == Kind::Pair; }
    bool is_bag() const { return kind() == Kind::Bag; }
    const Atom& as_atom() const { return rep_->atom; }
    const Value& left() const { return rep_->items.at(0); }
    const Value& right() const { return rep_->items.at(1); }
    const std::vector<Value>& items() const { return rep_->items; }
    std::size_t hash() const { return rep_->hash; }
    std::size_t shape() const { return rep_->shape; }
    std::size_t size() const { return rep_->size; }
    bool has_atoms() const { return rep_->has_atoms; }
    const void* identity() const { return rep_.get(); }

    friend bool operator==(const Value& a, const Value& b) {
        if (a.rep_ == b.rep_) return true;
        if (a.hash() != b.hash() || a.size() != b.size()) return false;
        return (a <=> b) == 0;
    }

    friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
        if (a.rep_ == b.rep_) return std::strong_ordering::equal;
        if (auto c = a.kind() <=> b.kind(); c != 0) return c;
        if (a.kind() == Kind::Atom) return a.as_atom() <=> b.as_atom();
        if (auto c = a.pos() <=> b.pos(); c != 0) return c;
        const auto& x = a.items();
        const auto& y = b.items();
        if (auto c = x.size() <=> y.size(); c != 0) return c;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (auto c = x[i] <=> y[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }
};

inline Multiset normalized(Multiset a) {
    std::sort(a.begin(), a.end());
    return a;
}

inline Multiset msum(const Multiset& a, const Multiset& b) {
    Multiset out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// a - b, throws if b is not contained in a
inline Multiset mdiff(const Multiset& a, const Multiset& b) {
    Multiset out;
    std::size_t j = 0;
    for (const auto& v : a) {
        if (j < b.size() && b[j] == v) {
            ++j;
            continue;
        }
        out.push_back(v);
    }
    if (j != b.size()) throw Error("multiset difference: not a sub-multiset");
    return out;
}

inline std::size_t multiplicity(const Multiset& a, const Value& v) {
    auto [lo, hi] = std::equal_range(a.begin(), a.end(), v);
    return static_cast<std::size_t>(hi - lo);
}

inline Multiset support(const Multiset& a) {
    Multiset s;
    for (const auto& v : a)
        if (s.empty() || !(s.back() == v)) s.push_back(v);
    return s;
}

// ---- orthogonality -------------------------------------------------------

inline Value orthogonal(const Value& v) {
    switch (v.kind()) {
        case Kind::Atom: return v;
        case Kind::Unit: return Value::unit(!v.pos());
        case Kind::Pair: return Value::pair(!v.pos(), orthogonal(v.left()), orthogonal(v.right()));
        case Kind::Bag: {
            Multiset xs;
            xs.reserve(v.items().size());
            for (const auto& x : v.items()) xs.push_back(orthogonal(x));
            return Value::bag(!v.pos(), std::move(xs));
        }
    }
    return v;
}

// ---- atoms ---------------------------------------------------------------

inline void collect_atoms(const Value& v, std::set<Atom>& out) {
    if (!v.has_atoms()) return;
    if (v.is_atom()) {
        out.insert(v.as_atom());
        return;
    }
    for (const auto& x : v.items()) collect_atoms(x, out);
}

inline std::set<Atom> atoms_of(const Value& v) {
    std::set<Atom> s;
    collect_atoms(v, s);
    return s;
}

inline std::set<Atom> atoms_of(const std::vector<Value>& xs) {
    std::set<Atom> s;
    for (const auto& x : xs) collect_atoms(x, s);
    return s;
}

inline std::set<Atom> atoms_of(const std::vector<Multiset>& xs) {
    std::set<Atom> s;
    for (const auto& a : xs)
        for (const auto& x : a) collect_atoms(x, s);
    return s;
}

// a = a^At + a^*
inline Multiset atom_part(const Multiset& a) {
    Multiset out;
    for (const auto& v : a)
        if (v.has_atoms()) out.push_back(v);
    return out;
}

inline Multiset star_part(const Multiset& a) {
    Multiset out;
    for (const auto& v : a)
        if (!v.has_atoms()) out.push_back(v);
    return out;
}

// ---- dig -----------------------------------------------------------------

inline Value dig_step(const std::vector<int>& s, const Value& v) {
    if (s.empty() || !v.has_atoms()) return v;
    switch (v.kind()) {
        case Kind::Atom: {
            Atom a = v.as_atom();
            a.loc.insert(a.loc.end(), s.begin(), s.end());
            return Value::atom(std::move(a));
        }
        case Kind::Unit: return v;
        case Kind::Pair: return Value::pair(v.pos(), dig_step(s, v.left()), dig_step(s, v.right()));
        case Kind::Bag: {
            Multiset xs;
            xs.reserve(v.items().size());
            for (const auto& x : v.items()) xs.push_back(dig_step(s, x));
            return Value::bag(v.pos(), std::move(xs));
        }
    }
    return v;
}

inline Value dig_step(int j, const Value& v) { return dig_step(std::vector<int>{j}, v); }

// all s in [k]^d in lexicographic order
inline std::vector<std::vector<int>> index_sequences(int k, int d) {
    std::vector<std::vector<int>> out{{}};
    for (int i = 0; i < d; ++i) {
        std::vector<std::vector<int>> next;
        for (const auto& s : out)
            for (int j = 1; j <= k; ++j) {
                auto t = s;
                t.push_back(j);
                next.push_back(std::move(t));
            }
        out = std::move(next);
    }
    return out;
}

inline Multiset dig_multi(int k, int d, const Multiset& a) {
    if (d == 0) return normalized(a);
    if (k < 1) throw Error("dig_multi: k must be at least 1");
    Multiset out;
    for (const auto& s : index_sequences(k, d))
        for (const auto& v : a) out.push_back(dig_step(s, v));
    return normalized(std::move(out));
}

namespace detail {

// trailing index shared by every atom of v, or -1 when they disagree
inline int trailing_index(const Value& v) {
    auto atoms = atoms_of(v);
    int t = 0;
    for (const auto& a : atoms) {
        if (a.loc.empty()) return -1;
        if (t == 0) t = a.loc.back();
        else if (t != a.loc.back()) return -1;
    }
    return t;
}

inline Value strip_trailing(const Value& v) {
    if (!v.has_atoms()) return v;
    switch (v.kind()) {
        case Kind::Atom: {
            Atom a = v.as_atom();
            a.loc.pop_back();
            return Value::atom(std::move(a));
        }
        case Kind::Unit: return v;
        case Kind::Pair: return Value::pair(v.pos(), strip_trailing(v.left()), strip_trailing(v.right()));
        case Kind::Bag: {
            Multiset xs;
            for (const auto& x : v.items()) xs.push_back(strip_trailing(x));
            return Value::bag(v.pos(), std::move(xs));
        }
    }
    return v;
}

}  // namespace detail

// the unique b with a = sum_{j in [k]} dig(j) . b
inline Multiset undig(int k, const Multiset& a) {
    if (k < 1) throw Error("undig: k must be at least 1");
    Multiset b;
    for (const auto& v : support(a)) {
        std::size_t m = multiplicity(a, v);
        if (!v.has_atoms()) {
            if (m % static_cast<std::size_t>(k) != 0)
                throw Error("undig: atom-free element multiplicity not divisible by k");
            for (std::size_t i = 0; i < m / static_cast<std::size_t>(k); ++i) b.push_back(v);
            continue;
        }
        int t = detail::trailing_index(v);
        if (t < 1) throw Error("undig: atoms of one element disagree on their trailing index");
        if (t > k) throw Error("undig: trailing index exceeds k");
        if (t == 1)
            for (std::size_t i = 0; i < m; ++i) b.push_back(detail::strip_trailing(v));
    }
    b = normalized(std::move(b));
    if (dig_multi(k, 1, b) != a) throw Error("undig: multiset is not a k-fold dig layer");
    return b;
}

// ---- partial injections --------------------------------------------------

using PInj = std::map<Atom, Atom>;

inline bool is_injective(const PInj& rho) {
    std::set<Atom> img;
    for (const auto& [a, b] : rho)
        if (!img.insert(b).second) return false;
    return true;
}

inline PInj inverse(const PInj& rho) {
    PInj inv;
    for (const auto& [a, b] : rho) inv[b] = a;
    return inv;
}

// rho2 after rho1
inline PInj compose(const PInj& rho2, const PInj& rho1) {
    PInj out;
    for (const auto& [a, b] : rho1) {
        auto it = rho2.find(b);
        if (it != rho2.end()) out[a] = it->second;
    }
    return out;
}

inline Value apply_pinj(const PInj& rho, const Value& v) {
    if (!v.has_atoms()) return v;
    switch (v.kind()) {
        case Kind::Atom: {
            auto it = rho.find(v.as_atom());
            if (it == rho.end()) throw Error("apply_pinj: atom outside the domain");
            return Value::atom(it->second);
        }
        case Kind::Unit: return v;
        case Kind::Pair: return Value::pair(v.pos(), apply_pinj(rho, v.left()), apply_pinj(rho, v.right()));
        case Kind::Bag: {
            Multiset xs;
            xs.reserve(v.items().size());
            for (const auto& x : v.items()) xs.push_back(apply_pinj(rho, x));
            return Value::bag(v.pos(), std::move(xs));
        }
    }
    return v;
}

inline std::vector<Value> apply_pinj(const PInj& rho, const std::vector<Value>& xs) {
    std::vector<Value> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(apply_pinj(rho, x));
    return out;
}

inline Multiset apply_pinj_bag(const PInj& rho, const Multiset& a) {
    return normalized(apply_pinj(rho, a));
}

// ---- points --------------------------------------------------------------

namespace detail {

inline void count_atoms(const Value& v, std::map<Atom, int>& n) {
    if (v.is_atom()) {
        ++n[v.as_atom()];
        return;
    }
    for (const auto& x : v.items()) count_atoms(x, n);
}

inline bool positive_bags_sized(const Value& v, std::size_t k) {
    if (v.is_bag() && v.pos() && v.items().size() != k) return false;
    for (const auto& x : v.items())
        if (!positive_bags_sized(x, k)) return false;
    return true;
}

}  // namespace detail

inline bool is_k_point(const Tuple& r, int k) {
    for (const auto& v : r)
        if (!detail::positive_bags_sized(v, static_cast<std::size_t>(k))) return false;
    return true;
}

inline bool is_injective_point(const Tuple& r) {
    std::map<Atom, int> n;
    for (const auto& v : r) detail::count_atoms(v, n);
    for (const auto& [a, c] : n)
        if (c != 2) return false;
    return true;
}

// ---- substitution --------------------------------------------------------

using Substitution = std::map<std::string, Value>;

inline Value substitute(const Substitution& sigma, const Value& v) {
    if (!v.has_atoms()) return v;
    switch (v.kind()) {
        case Kind::Atom: {
            if (!v.as_atom().plain()) return v;
            auto it = sigma.find(v.as_atom().name);
            return it == sigma.end() ? v : it->second;
        }
        case Kind::Unit: return v;
        case Kind::Pair: return Value::pair(v.pos(), substitute(sigma, v.left()), substitute(sigma, v.right()));
        case Kind::Bag: {
            Multiset xs;
            for (const auto& x : v.items()) xs.push_back(substitute(sigma, x));
            return Value::bag(v.pos(), std::move(xs));
        }
    }
    return v;
}

// ---- text syntax ---------------------------------------------------------
// atoms g3 or g3@[1,2], units +* / -*, pairs +(x,y), bags -[x,y,y]

inline std::string to_string(const Atom& a) {
    std::string out = a.name;
    if (!a.loc.empty()) {
        out += "@[";
        for (std::size_t i = 0; i < a.loc.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(a.loc[i]);
        }
        out += "]";
    }
    return out;
}

inline std::string to_string(const Value& v) {
    switch (v.kind()) {
        case Kind::Atom: return to_string(v.as_atom());
        case Kind::Unit: return v.pos() ? "+*" : "-*";
        case Kind::Pair: return std::string(v.pos() ? "+" : "-") + "(" + to_string(v.left()) + "," + to_string(v.right()) + ")";
        case Kind::Bag: {
            std::string out = v.pos() ? "+[" : "-[";
            for (std::size_t i = 0; i < v.items().size(); ++i) {
                if (i) out += ",";
                out += to_string(v.items()[i]);
            }
            return out + "]";
        }
    }
    return "?";
}

inline std::string to_string(const Tuple& r) {
    std::string out = "(";
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ", ";
        out += to_string(r[i]);
    }
    return out + ")";
}

inline std::string bag_string(const Multiset& a) {
    std::string out = "[";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ",";
        out += to_string(a[i]);
    }
    return out + "]";
}

namespace detail {

inline bool atom_char(char c) {
    return !(c == ',' || c == '(' || c == ')' || c == '[' || c == ']' || c == '@' || c == ' ' || c == '\t' ||
             c == '\n' || c == '\r' || c == '*');
}

struct ValueParser {
    const std::string& src;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw Error("value syntax error at offset " + std::to_string(pos) + ": " + what);
    }
    void skip() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' || src[pos] == '\r')) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    int number() {
        skip();
        std::size_t start = pos;
        while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') ++pos;
        if (start == pos) fail("expected a number");
        return std::stoi(src.substr(start, pos - start));
    }
    Value value() {
        skip();
        if (pos >= src.size()) fail("unexpected end of input");
        char c = src[pos];
        if (c == '+' || c == '-') {
            ++pos;
            bool pol = c == '+';
            if (eat('*')) return Value::unit(pol);
            if (eat('(')) {
                Value a = value();
                expect(',');
                Value b = value();
                expect(')');
                return Value::pair(pol, a, b);
            }
            if (eat('[')) {
                Multiset xs;
                if (!eat(']')) {
                    do xs.push_back(value());
                    while (eat(','));
                    expect(']');
                }
                return Value::bag(pol, std::move(xs));
            }
            fail("expected '*', '(' or '[' after polarity");
        }
        std::size_t start = pos;
        while (pos < src.size() && atom_char(src[pos])) ++pos;
        if (start == pos) fail("expected a value");
        Atom a{src.substr(start, pos - start), {}};
        if (eat('@')) {
            expect('[');
            if (!eat(']')) {
                do a.loc.push_back(number());
                while (eat(','));
                expect(']');
            }
        }
        return Value::atom(std::move(a));
    }
};

}  // namespace detail

inline Value parse_value(const std::string& text) {
    detail::ValueParser p{text};
    Value v = p.value();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing characters");
    return v;
}

}  // namespace mell
