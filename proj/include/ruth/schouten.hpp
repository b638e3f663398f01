#pragma once

#include <map>
#include <vector>

#include "ruth/algebroid.hpp"

namespace ruth {

/*
** Multivector fields Gamma(Lambda^* A) with polynomial coefficients, stored
** on strictly increasing frame-index tuples (the empty tuple holds the
** function part).
*/
struct Multivector {
    AlgebroidPtr A;
    std::map<std::vector<int>, Poly> terms;

    explicit Multivector(AlgebroidPtr alg) : A(std::move(alg)) {}

    static Multivector function(AlgebroidPtr A, Poly f) {
        Multivector m(std::move(A));
        m.add_term({}, std::move(f));
        return m;
    }

    static Multivector from_section(AlgebroidPtr A, const Section& s) {
        Multivector m(A);
        for (int i = 0; i < A->rank; ++i) m.add_term({i}, s[i]);
        return m;
    }

    bool is_zero() const { return terms.empty(); }

    void add_term(std::vector<int> idx, Poly c) {
        if (c.is_zero()) return;
        for (std::size_t i = 0; i + 1 < idx.size(); ++i)
            if (idx[i] >= idx[i + 1]) throw Error("multivector tuple not strictly increasing");
        auto it = terms.find(idx);
        if (it == terms.end()) {
            terms.emplace(std::move(idx), std::move(c));
        } else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    void add_term_signed(std::vector<int> idx, Poly c) {
        long inv = 0;
        for (std::size_t i = 0; i + 1 < idx.size(); ++i)
            for (std::size_t j = i + 1; j < idx.size(); ++j) {
                if (idx[i] == idx[j]) return;
                if (idx[i] > idx[j]) ++inv;
            }
        std::sort(idx.begin(), idx.end());
        if (inv % 2 != 0) c.scale(Rat(-1));
        add_term(std::move(idx), std::move(c));
    }

    Multivector& operator+=(const Multivector& o) {
        for (const auto& [t, c] : o.terms) add_term(t, c);
        return *this;
    }
    Multivector& operator-=(const Multivector& o) {
        for (const auto& [t, c] : o.terms) add_term(t, -c);
        return *this;
    }
    friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
    friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
    friend bool operator==(const Multivector& a, const Multivector& b) {
        return a.terms == b.terms;
    }

    Multivector& scale(const Poly& f) {
        std::map<std::vector<int>, Poly> out;
        for (auto& [t, c] : terms) {
            Poly w = c * f;
            if (!w.is_zero()) out.emplace(t, std::move(w));
        }
        terms = std::move(out);
        return *this;
    }

    std::string str() const {
        if (terms.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [t, c] : terms) {
            if (!first) out += " + ";
            first = false;
            out += "(" + c.str() + ")";
            for (int i : t) out += "^e" + std::to_string(i + 1);
        }
        return out;
    }
};

inline Multivector mv_wedge(const Multivector& a, const Multivector& b) {
    Multivector out(a.A);
    for (const auto& [ta, ca] : a.terms)
        for (const auto& [tb, cb] : b.terms) {
            std::vector<int> t = ta;
            t.insert(t.end(), tb.begin(), tb.end());
            out.add_term_signed(std::move(t), ca * cb);
        }
    return out;
}

/*
** Schouten bracket Gamma(Lambda^p A) x Gamma(Lambda^q A) -> Gamma(Lambda^{p+q-1} A),
** the biderivation extending the bracket and the anchor action:
**   [e_I, e_J]   = sum_{s,t} (-1)^{s+t} [e_{i_s}, e_{j_t}] ^ e_{I\s} ^ e_{J\t}
**   [e_I, g]     = sum_s (-1)^{p-s} rho(e_{i_s})(g) e_{I\s}
**   [f e_I, g e_J] = fg [e_I,e_J] + (-1)^{p(q-1)} g [f,e_J]^e_I + f [e_I,g]^e_J
** (1-based positions s, t; signs from the sign oracle).
*/
inline Multivector schouten(const Multivector& P, const Multivector& Q) {
    const AlgebroidPtr& A = P.A;
    Multivector out(A);
    for (const auto& [I, f] : P.terms) {
        const long p = static_cast<long>(I.size());
        for (const auto& [J, g] : Q.terms) {
            const long q = static_cast<long>(J.size());

            // fg [e_I, e_J]
            for (std::size_t s = 0; s < I.size(); ++s)
                for (std::size_t t = 0; t < J.size(); ++t) {
                    const Section br = A->structure(I[s], J[t]);
                    std::vector<int> rest;
                    for (std::size_t u = 0; u < I.size(); ++u)
                        if (u != s) rest.push_back(I[u]);
                    for (std::size_t u = 0; u < J.size(); ++u)
                        if (u != t) rest.push_back(J[u]);
                    const int sgn = signs::schouten_pair(static_cast<long>(s) + 1,
                                                         static_cast<long>(t) + 1);
                    for (int k = 0; k < A->rank; ++k) {
                        if (br[k].is_zero()) continue;
                        std::vector<int> tuple = {k};
                        tuple.insert(tuple.end(), rest.begin(), rest.end());
                        Poly c = f * g * br[k];
                        c.scale(Rat(sgn));
                        out.add_term_signed(std::move(tuple), std::move(c));
                    }
                }

            // (-1)^{p(q-1)} g [f, e_J] ^ e_I,  [f,e_J] = (-1)^q [e_J, f]
            for (std::size_t s = 0; s < J.size(); ++s) {
                const Poly df = anchor_apply(*A, basis_section(*A, J[s]), f);
                if (df.is_zero()) continue;
                std::vector<int> tuple;
                for (std::size_t u = 0; u < J.size(); ++u)
                    if (u != s) tuple.push_back(J[u]);
                tuple.insert(tuple.end(), I.begin(), I.end());
                const int sgn = signs::schouten_coeff(p, q) * signs::schouten_flip0(q) *
                                signs::schouten_fn(q, static_cast<long>(s) + 1);
                Poly c = g * df;
                c.scale(Rat(sgn));
                out.add_term_signed(std::move(tuple), std::move(c));
            }

            // f [e_I, g] ^ e_J
            for (std::size_t s = 0; s < I.size(); ++s) {
                const Poly dg = anchor_apply(*A, basis_section(*A, I[s]), g);
                if (dg.is_zero()) continue;
                std::vector<int> tuple;
                for (std::size_t u = 0; u < I.size(); ++u)
                    if (u != s) tuple.push_back(I[u]);
                tuple.insert(tuple.end(), J.begin(), J.end());
                const int sgn = signs::schouten_fn(p, static_cast<long>(s) + 1);
                Poly c = f * dg;
                c.scale(Rat(sgn));
                out.add_term_signed(std::move(tuple), std::move(c));
            }
        }
    }
    return out;
}

}  // namespace ruth
