#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "ruth/error.hpp"
#include "ruth/rat.hpp"

namespace ruth {

using Vars = std::vector<std::string>;
using VarsPtr = std::shared_ptr<const Vars>;

inline VarsPtr make_vars(std::vector<std::string> names) {
    return std::make_shared<const Vars>(std::move(names));
}

// Exponent vector; length equals the number of chart coordinates.
using Mono = std::vector<unsigned>;

inline unsigned mono_degree(const Mono& m) {
    return std::accumulate(m.begin(), m.end(), 0u);
}

// Descending graded-lexicographic order: leading term first, so map iteration
// order is the canonical print order.
struct GrlexGreater {
    bool operator()(const Mono& a, const Mono& b) const {
        const unsigned da = mono_degree(a), db = mono_degree(b);
        if (da != db) return da > db;
        return a > b;
    }
};

/*
** Exact multivariate polynomial over Rat in the chart coordinates.
** Invariants: no stored zero coefficients; all exponent vectors have length m;
** canonical (graded-lex) term order, so structural equality is mathematical
** equality.
*/
class Poly {
public:
    Poly() = default;
    explicit Poly(VarsPtr vars) : vars_(std::move(vars)) {}

    static Poly zero(VarsPtr vars) { return Poly(std::move(vars)); }

    static Poly constant(VarsPtr vars, const Rat& c) {
        Poly p(std::move(vars));
        if (!c.is_zero()) p.terms_[Mono(p.nvars(), 0)] = c;
        return p;
    }

    static Poly variable(VarsPtr vars, std::size_t idx) {
        Poly p(vars);
        if (idx >= p.nvars()) throw Error("variable index out of range");
        Mono m(p.nvars(), 0);
        m[idx] = 1;
        p.terms_[m] = Rat(1);
        return p;
    }

    static Poly term(VarsPtr vars, Mono m, const Rat& c) {
        Poly p(std::move(vars));
        if (m.size() != p.nvars()) throw Error("exponent vector has wrong length");
        if (!c.is_zero()) p.terms_[std::move(m)] = c;
        return p;
    }

    const VarsPtr& vars() const { return vars_; }
    std::size_t nvars() const { return vars_ ? vars_->size() : 0; }
    const std::map<Mono, Rat, GrlexGreater>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && mono_degree(terms_.begin()->first) == 0);
    }
    Rat constant_value() const {
        if (terms_.empty()) return Rat(0);
        if (!is_constant()) throw Error("polynomial is not constant: " + str());
        return terms_.begin()->second;
    }
    unsigned degree() const {  // degree of the zero polynomial reported as 0
        return terms_.empty() ? 0 : mono_degree(terms_.begin()->first);
    }

    Poly& operator+=(const Poly& o) {
        check_same_vars(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check_same_vars(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    Poly operator-() const {
        Poly r(vars_);
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_same_vars(b);
        Poly r(a.vars_);
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                Mono m(ma.size());
                for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
                r.add_term(m, ca * cb);
            }
        }
        return r;
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly& scale(const Rat& c) {
        if (c.is_zero()) {
            terms_.clear();
        } else {
            for (auto& [m, v] : terms_) v *= c;
        }
        return *this;
    }
    friend Poly operator*(const Rat& c, Poly p) { return p.scale(c); }

    friend bool operator==(const Poly& a, const Poly& b) {
        a.check_same_vars(b);
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    // Formal partial derivative with respect to coordinate `idx`.
    Poly partial(std::size_t idx) const {
        if (idx >= nvars()) throw Error("partial: coordinate index out of range");
        Poly r(vars_);
        for (const auto& [m, c] : terms_) {
            if (m[idx] == 0) continue;
            Mono d = m;
            d[idx] -= 1;
            r.add_term(d, c * Rat(static_cast<long>(m[idx])));
        }
        return r;
    }

    /*
    ** Canonical printing, leading term first.  Terms after the first are
    ** joined with " + "/" - "; a leading negative coefficient prints as an
    ** explicit signed rational ("-1*x") so that print(p) re-parses under the
    ** manifest grammar.
    */
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            if (first) {
                out += term_str(m, c);
                first = false;
                continue;
            }
            out += (c.sign() < 0) ? " - " : " + ";
            out += term_str(m, c.sign() < 0 ? -c : c);
        }
        return out;
    }

private:
    void check_same_vars(const Poly& o) const {
        const bool ok = (vars_ == o.vars_) || (vars_ && o.vars_ && *vars_ == *o.vars_);
        if (!ok) throw Error("polynomial variable lists differ");
    }

    void add_term(const Mono& m, const Rat& c) {
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (!c.is_zero()) terms_.emplace(m, c);
            return;
        }
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }

    std::string term_str(const Mono& m, const Rat& c) const {
        std::string vars_part;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (!vars_part.empty()) vars_part += "*";
            vars_part += (*vars_)[i];
            if (m[i] > 1) vars_part += "^" + std::to_string(m[i]);
        }
        if (vars_part.empty()) return c.str();
        if (c.is_one()) return vars_part;
        return c.str() + "*" + vars_part;
    }

    VarsPtr vars_;
    std::map<Mono, Rat, GrlexGreater> terms_;
};

inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.str(); }

}  // namespace ruth
