#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ruth/error.hpp"
#include "ruth/poly.hpp"
#include "ruth/signs.hpp"

namespace ruth {

/*
** Free bigraded-commutative algebra over the polynomial ring: generators
** carry a bidegree (p, q); commutation is governed by the parity of the
** total degree p + q.  Odd generators anticommute and square to zero, even
** generators are central.
*/
struct GcaGen {
    std::string name;
    int p = 0, q = 0;
    int total() const { return p + q; }
    bool odd() const { return ((p + q) % 2 + 2) % 2 == 1; }
};

struct Gca {
    VarsPtr chart;
    std::vector<GcaGen> gens;
};

using GcaPtr = std::shared_ptr<const Gca>;

inline GcaPtr make_gca(VarsPtr chart, std::vector<GcaGen> gens) {
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j)
            if (gens[i].name == gens[j].name)
                throw Error("duplicate algebra generator '" + gens[i].name + "'");
    auto g = std::make_shared<Gca>();
    g->chart = std::move(chart);
    g->gens = std::move(gens);
    return g;
}

// Monomial: strictly increasing word of odd generators plus exponents of the
// even ones (dense, zero at odd positions).
struct GcaMono {
    std::vector<int> odd;
    std::vector<unsigned> even;

    friend bool operator<(const GcaMono& a, const GcaMono& b) {
        if (a.odd != b.odd) return a.odd < b.odd;
        return a.even < b.even;
    }
    friend bool operator==(const GcaMono& a, const GcaMono& b) {
        return a.odd == b.odd && a.even == b.even;
    }
};

class GcaElement {
public:
    GcaElement() = default;
    explicit GcaElement(GcaPtr alg) : alg_(std::move(alg)) {}

    static GcaElement unit(GcaPtr alg, const Poly& coeff) {
        GcaElement e(alg);
        e.add_term(GcaMono{{}, std::vector<unsigned>(e.alg_->gens.size(), 0)}, coeff);
        return e;
    }

    static GcaElement generator(GcaPtr alg, std::size_t g) {
        GcaElement e(alg);
        GcaMono m{{}, std::vector<unsigned>(e.alg_->gens.size(), 0)};
        if (alg->gens.at(g).odd()) {
            m.odd.push_back(static_cast<int>(g));
        } else {
            m.even[g] = 1;
        }
        e.add_term(m, Poly::constant(alg->chart, Rat(1)));
        return e;
    }

    const GcaPtr& alg() const { return alg_; }
    const std::map<GcaMono, Poly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(GcaMono m, Poly c) {
        if (c.is_zero()) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(std::move(m), std::move(c));
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    GcaElement& operator+=(const GcaElement& o) {
        check(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    GcaElement& operator-=(const GcaElement& o) {
        check(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend GcaElement operator+(GcaElement a, const GcaElement& b) { return a += b; }
    friend GcaElement operator-(GcaElement a, const GcaElement& b) { return a -= b; }

    GcaElement& scale(const Rat& c) {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, v] : terms_) v.scale(c);
        return *this;
    }
    GcaElement& scale(const Poly& p) {
        std::map<GcaMono, Poly> out;
        for (auto& [m, v] : terms_) {
            Poly w = v * p;
            if (!w.is_zero()) out.emplace(m, std::move(w));
        }
        terms_ = std::move(out);
        return *this;
    }

    friend GcaElement operator*(const GcaElement& a, const GcaElement& b) {
        a.check(b);
        GcaElement out(a.alg_);
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                bool clash = false;
                for (int g : ma.odd)
                    for (int g2 : mb.odd)
                        if (g == g2) clash = true;
                if (clash) continue;
                const int sgn = signs::merge_sign(ma.odd, mb.odd);
                GcaMono m;
                m.odd.reserve(ma.odd.size() + mb.odd.size());
                std::merge(ma.odd.begin(), ma.odd.end(), mb.odd.begin(), mb.odd.end(),
                           std::back_inserter(m.odd));
                m.even = ma.even;
                for (std::size_t i = 0; i < m.even.size(); ++i) m.even[i] += mb.even[i];
                Poly c = ca * cb;
                c.scale(Rat(sgn));
                out.add_term(std::move(m), std::move(c));
            }
        }
        return out;
    }

    friend bool operator==(const GcaElement& a, const GcaElement& b) {
        a.check(b);
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const GcaElement& a, const GcaElement& b) { return !(a == b); }

    std::pair<int, int> mono_bidegree(const GcaMono& m) const {
        int p = 0, q = 0;
        for (int g : m.odd) {
            p += alg_->gens[g].p;
            q += alg_->gens[g].q;
        }
        for (std::size_t g = 0; g < m.even.size(); ++g) {
            p += static_cast<int>(m.even[g]) * alg_->gens[g].p;
            q += static_cast<int>(m.even[g]) * alg_->gens[g].q;
        }
        return {p, q};
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            if (!first) out += " + ";
            first = false;
            std::string word;
            for (int g : m.odd) word += "*" + alg_->gens[g].name;
            for (std::size_t g = 0; g < m.even.size(); ++g) {
                if (m.even[g] == 0) continue;
                word += "*" + alg_->gens[g].name;
                if (m.even[g] > 1) word += "^" + std::to_string(m.even[g]);
            }
            if (word.empty())
                out += c.str();
            else if (c == Poly::constant(alg_->chart, Rat(1)))
                out += word.substr(1);
            else
                out += "(" + c.str() + ")" + word;
        }
        return out;
    }

private:
    void check(const GcaElement& o) const {
        if (alg_ != o.alg_) throw Error("algebra elements live over different algebras");
    }

    GcaPtr alg_;
    std::map<GcaMono, Poly> terms_;
};

/*
** A derivation of fixed bidegree (dp, dq) given by a generator-action table
** plus its action on the chart coordinates.  Extended to the whole algebra by
** the graded Leibniz rule D(xy) = D(x)y + (-1)^{|D||x|} x D(y).
*/
struct GcaDerivation {
    GcaPtr alg;
    int dp = 0, dq = 0;
    bool bigraded = true;  // when false, only the total degree shift dp+dq is enforced
    std::vector<GcaElement> gen_images;    // one per generator
    std::vector<GcaElement> coord_images;  // one per chart coordinate

    int total() const { return dp + dq; }
};

inline GcaDerivation make_derivation_impl(GcaPtr alg, int dp, int dq, bool bigraded,
                                          std::vector<GcaElement> gen_images,
                                          std::vector<GcaElement> coord_images) {
    GcaDerivation d{alg, dp, dq, bigraded, std::move(gen_images), std::move(coord_images)};
    if (d.gen_images.size() != alg->gens.size())
        throw Error("derivation table: generator image count mismatch");
    if (d.coord_images.size() != (alg->chart ? alg->chart->size() : 0))
        throw Error("derivation table: coordinate image count mismatch");
    for (std::size_t g = 0; g < d.gen_images.size(); ++g) {
        for (const auto& [m, c] : d.gen_images[g].terms()) {
            auto [p, q] = d.gen_images[g].mono_bidegree(m);
            const bool ok = bigraded ? (p == alg->gens[g].p + dp && q == alg->gens[g].q + dq)
                                     : (p + q == alg->gens[g].p + alg->gens[g].q + dp + dq);
            if (!ok)
                throw Error("derivation table: inconsistent degree shift at generator '" +
                            alg->gens[g].name + "'");
        }
    }
    for (std::size_t a = 0; a < d.coord_images.size(); ++a) {
        for (const auto& [m, c] : d.coord_images[a].terms()) {
            auto [p, q] = d.coord_images[a].mono_bidegree(m);
            const bool ok = bigraded ? (p == dp && q == dq) : (p + q == dp + dq);
            if (!ok)
                throw Error("derivation table: inconsistent degree shift on coordinate '" +
                            (*alg->chart)[a] + "'");
        }
    }
    return d;
}

inline GcaDerivation make_derivation(GcaPtr alg, int dp, int dq,
                                     std::vector<GcaElement> gen_images,
                                     std::vector<GcaElement> coord_images) {
    return make_derivation_impl(std::move(alg), dp, dq, true, std::move(gen_images),
                                std::move(coord_images));
}

// Derivation homogeneous only in the total degree (e.g. a total differential).
inline GcaDerivation make_total_derivation(GcaPtr alg, int total,
                                           std::vector<GcaElement> gen_images,
                                           std::vector<GcaElement> coord_images) {
    return make_derivation_impl(std::move(alg), total, 0, false, std::move(gen_images),
                                std::move(coord_images));
}

inline GcaElement apply_derivation(const GcaDerivation& d, const GcaElement& x) {
    GcaElement out(d.alg);
    const auto& gens = d.alg->gens;
    for (const auto& [m, c] : x.terms()) {
        // explicit factor word, canonical order: odd ascending, then evens
        std::vector<int> word(m.odd.begin(), m.odd.end());
        for (std::size_t g = 0; g < m.even.size(); ++g)
            for (unsigned k = 0; k < m.even[g]; ++k) word.push_back(static_cast<int>(g));

        // coefficient part: D(f) w
        if (x.alg()->chart) {
            for (std::size_t a = 0; a < x.alg()->chart->size(); ++a) {
                const Poly df = c.partial(a);
                if (df.is_zero() || d.coord_images[a].is_zero()) continue;
                GcaElement piece = d.coord_images[a];
                piece.scale(df);
                GcaElement wrest = GcaElement::unit(d.alg, Poly::constant(d.alg->chart, Rat(1)));
                for (int g : word) wrest = wrest * GcaElement::generator(d.alg, g);
                out += piece * wrest;
            }
        }

        // generator part: sum over factors with the Leibniz sign
        long prefix_degree = 0;
        for (std::size_t k = 0; k < word.size(); ++k) {
            const GcaElement& img = d.gen_images[word[k]];
            if (!img.is_zero()) {
                GcaElement prefix = GcaElement::unit(d.alg, c);
                for (std::size_t j = 0; j < k; ++j)
                    prefix = prefix * GcaElement::generator(d.alg, word[j]);
                GcaElement piece = prefix * img;
                for (std::size_t j = k + 1; j < word.size(); ++j)
                    piece = piece * GcaElement::generator(d.alg, word[j]);
                piece.scale(Rat(signs::leibniz(d.total(), prefix_degree)));
                out += piece;
            }
            prefix_degree += gens[word[k]].total();
        }
    }
    return out;
}

}  // namespace ruth
