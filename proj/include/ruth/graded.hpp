#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ruth/error.hpp"
#include "ruth/poly.hpp"
#include "ruth/signs.hpp"

namespace ruth {

/*
** A graded vector bundle over the chart, trivialized: a finite list of named
** generators with integer degrees.  Each degree class is a free module over
** the polynomial ring.
*/
struct GradedBundle {
    VarsPtr chart;
    std::vector<std::pair<std::string, int>> gens;

    std::size_t size() const { return gens.size(); }
    int degree(std::size_t i) const { return gens.at(i).second; }
    const std::string& name(std::size_t i) const { return gens.at(i).first; }

    std::optional<std::size_t> index_of(const std::string& name) const {
        for (std::size_t i = 0; i < gens.size(); ++i)
            if (gens[i].first == name) return i;
        return std::nullopt;
    }

    std::vector<int> degrees_present() const {
        std::vector<int> ds;
        for (const auto& [n, d] : gens)
            if (std::find(ds.begin(), ds.end(), d) == ds.end()) ds.push_back(d);
        std::sort(ds.begin(), ds.end());
        return ds;
    }

    std::vector<std::size_t> gens_of_degree(int d) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < gens.size(); ++i)
            if (gens[i].second == d) out.push_back(i);
        return out;
    }
};

using BundlePtr = std::shared_ptr<const GradedBundle>;

inline BundlePtr make_bundle(VarsPtr chart, std::vector<std::pair<std::string, int>> gens) {
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j)
            if (gens[i].first == gens[j].first)
                throw Error("duplicate generator name '" + gens[i].first + "'");
    auto b = std::make_shared<GradedBundle>();
    b->chart = std::move(chart);
    b->gens = std::move(gens);
    return b;
}

// Trivial line bundle in degree zero; scalar forms live here.
inline BundlePtr trivial_bundle(VarsPtr chart) { return make_bundle(std::move(chart), {{"1", 0}}); }

/*
** Hom(E, F): one generator per ordered pair, graded by degree(tgt) -
** degree(src).  Keeps the index bookkeeping between pair and flat index.
*/
struct HomBundle {
    BundlePtr src, tgt;
    BundlePtr bundle;

    std::size_t index(std::size_t s, std::size_t t) const { return s * tgt->size() + t; }
    std::pair<std::size_t, std::size_t> pair_of(std::size_t i) const {
        return {i / tgt->size(), i % tgt->size()};
    }
};

inline HomBundle make_hom(BundlePtr src, BundlePtr tgt) {
    std::vector<std::pair<std::string, int>> gens;
    for (std::size_t s = 0; s < src->size(); ++s)
        for (std::size_t t = 0; t < tgt->size(); ++t)
            gens.push_back({tgt->name(t) + "<-" + src->name(s), tgt->degree(t) - src->degree(s)});
    HomBundle h;
    h.src = src;
    h.tgt = tgt;
    h.bundle = make_bundle(src->chart, std::move(gens));
    return h;
}

inline HomBundle make_end(BundlePtr e) { return make_hom(e, e); }

// Dual bundle: generator i dual to generator i of the primal, degree negated.
inline BundlePtr make_dual(const BundlePtr& e) {
    std::vector<std::pair<std::string, int>> gens;
    for (std::size_t i = 0; i < e->size(); ++i) gens.push_back({e->name(i) + "*", -e->degree(i)});
    return make_bundle(e->chart, std::move(gens));
}

/*
** An element of Omega(A; E): polynomial coefficients on the basis of
** Lambda A^* (x) E, stored on strictly increasing index tuples (antisymmetry
** normalized away; Koszul signs re-emerge at multiplication time).
*/
struct FormKey {
    std::vector<int> idx;  // strictly increasing, entries in [0, rank)
    std::size_t gen;

    friend bool operator<(const FormKey& a, const FormKey& b) {
        if (a.idx != b.idx) return a.idx < b.idx;
        return a.gen < b.gen;
    }
    friend bool operator==(const FormKey& a, const FormKey& b) {
        return a.idx == b.idx && a.gen == b.gen;
    }
};

class FormElement {
public:
    FormElement() = default;
    FormElement(BundlePtr bundle, int rank) : bundle_(std::move(bundle)), rank_(rank) {}

    static FormElement single(BundlePtr bundle, int rank, std::vector<int> idx, std::size_t gen,
                              Poly coeff) {
        FormElement f(std::move(bundle), rank);
        f.add_term(std::move(idx), gen, std::move(coeff));
        return f;
    }

    // Degree-zero element from generator coefficients.
    static FormElement section(BundlePtr bundle, int rank, const std::vector<Poly>& coeffs) {
        FormElement f(bundle, rank);
        if (coeffs.size() != bundle->size()) throw Error("section coefficient count mismatch");
        for (std::size_t g = 0; g < coeffs.size(); ++g) f.add_term({}, g, coeffs[g]);
        return f;
    }

    const BundlePtr& bundle() const { return bundle_; }
    int rank() const { return rank_; }
    const std::map<FormKey, Poly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(std::vector<int> idx, std::size_t gen, Poly coeff) {
        if (coeff.is_zero()) return;
        if (gen >= bundle_->size()) throw Error("form term: generator index out of range");
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] < 0 || idx[i] >= rank_) throw Error("form term: index out of range");
            if (i + 1 < idx.size() && idx[i] >= idx[i + 1])
                throw Error("form term: index tuple not strictly increasing");
        }
        FormKey key{std::move(idx), gen};
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(std::move(key), std::move(coeff));
        } else {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    // Accepts an unsorted tuple, normalizing with the antisymmetry sign.
    void add_term_signed(std::vector<int> idx, std::size_t gen, Poly coeff) {
        long inversions = 0;
        for (std::size_t i = 0; i + 1 < idx.size(); ++i)
            for (std::size_t j = i + 1; j < idx.size(); ++j) {
                if (idx[i] == idx[j]) return;
                if (idx[i] > idx[j]) ++inversions;
            }
        std::sort(idx.begin(), idx.end());
        if (inversions % 2 != 0) coeff.scale(Rat(-1));
        add_term(std::move(idx), gen, std::move(coeff));
    }

    Poly coeff(const std::vector<int>& idx, std::size_t gen) const {
        auto it = terms_.find(FormKey{idx, gen});
        return it == terms_.end() ? Poly::zero(bundle_->chart) : it->second;
    }

    FormElement& operator+=(const FormElement& o) {
        check_compatible(o);
        for (const auto& [k, c] : o.terms_) add_term(k.idx, k.gen, c);
        return *this;
    }
    FormElement& operator-=(const FormElement& o) {
        check_compatible(o);
        for (const auto& [k, c] : o.terms_) add_term(k.idx, k.gen, -c);
        return *this;
    }
    friend FormElement operator+(FormElement a, const FormElement& b) { return a += b; }
    friend FormElement operator-(FormElement a, const FormElement& b) { return a -= b; }

    FormElement& scale(const Rat& c) {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, v] : terms_) v.scale(c);
        return *this;
    }
    FormElement& scale(const Poly& p) {
        std::map<FormKey, Poly> out;
        for (auto& [k, v] : terms_) {
            Poly w = v * p;
            if (!w.is_zero()) out.emplace(k, std::move(w));
        }
        terms_ = std::move(out);
        return *this;
    }

    friend bool operator==(const FormElement& a, const FormElement& b) {
        a.check_compatible(b);
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const FormElement& a, const FormElement& b) { return !(a == b); }

    // Total degree if homogeneous (form degree + generator degree).
    std::optional<int> total_degree() const {
        std::optional<int> d;
        for (const auto& [k, c] : terms_) {
            const int t = static_cast<int>(k.idx.size()) + bundle_->degree(k.gen);
            if (!d) {
                d = t;
            } else if (*d != t) {
                return std::nullopt;
            }
        }
        return d;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first) out += " + ";
            first = false;
            out += "(" + c.str() + ")";
            for (int i : k.idx) out += "*th" + std::to_string(i + 1);
            out += "*" + bundle_->name(k.gen);
        }
        return out;
    }

private:
    void check_compatible(const FormElement& o) const {
        if (bundle_ != o.bundle_ && !(bundle_ && o.bundle_ && bundle_->gens == o.bundle_->gens))
            throw Error("form elements live over different bundles");
        if (rank_ != o.rank_) throw Error("form elements have different algebroid ranks");
    }

    BundlePtr bundle_;
    int rank_ = 0;
    std::map<FormKey, Poly> terms_;
};

/*
** Generic wedge product omega ^_h eta.  The pairing expands h on generator
** pairs; the engine supplies the shuffle sign and the (-1)^{q i} prefactor of
** the graded wedge (q the form degree of the eta term, i the internal degree
** of the omega term).
*/
using PairingFn =
    std::function<std::vector<std::pair<std::size_t, Rat>>(std::size_t, std::size_t)>;

inline FormElement wedge(const FormElement& w, const FormElement& e, const PairingFn& h,
                         BundlePtr target) {
    if (w.rank() != e.rank()) throw Error("wedge: mismatched algebroid ranks");
    FormElement out(std::move(target), w.rank());
    for (const auto& [kw, cw] : w.terms()) {
        const int iw = w.bundle()->degree(kw.gen);
        for (const auto& [ke, ce] : e.terms()) {
            bool disjoint = true;
            for (int a : kw.idx)
                if (std::binary_search(ke.idx.begin(), ke.idx.end(), a)) {
                    disjoint = false;
                    break;
                }
            if (!disjoint) continue;
            const int sgn = signs::merge_sign(kw.idx, ke.idx) *
                            signs::wedge_prefactor(static_cast<long>(ke.idx.size()), iw);
            const auto targets = h(kw.gen, ke.gen);
            if (targets.empty()) continue;
            std::vector<int> merged;
            merged.reserve(kw.idx.size() + ke.idx.size());
            std::merge(kw.idx.begin(), kw.idx.end(), ke.idx.begin(), ke.idx.end(),
                       std::back_inserter(merged));
            Poly prod = cw * ce;
            prod.scale(Rat(sgn));
            for (const auto& [gt, coeff] : targets) {
                Poly c = prod;
                c.scale(coeff);
                out.add_term(merged, gt, std::move(c));
            }
        }
    }
    return out;
}

// --- The pairings of the paper's list ---

// scalar * module (left action of Omega(A) on Omega(A;E))
inline FormElement wedge_scalar(const FormElement& scalar, const FormElement& e) {
    PairingFn h = [](std::size_t, std::size_t ge) {
        return std::vector<std::pair<std::size_t, Rat>>{{ge, Rat(1)}};
    };
    return wedge(scalar, e, h, e.bundle());
}

// module * scalar (right action; the graded sign appears via the engine)
inline FormElement wedge_scalar_right(const FormElement& e, const FormElement& scalar) {
    PairingFn h = [](std::size_t ge, std::size_t) {
        return std::vector<std::pair<std::size_t, Rat>>{{ge, Rat(1)}};
    };
    return wedge(e, scalar, h, e.bundle());
}

inline void check_over(const FormElement& f, const BundlePtr& b, const char* what) {
    if (f.bundle() != b && f.bundle()->gens != b->gens)
        throw Error(std::string(what) + ": incompatible bundle for the chosen pairing");
}

// evaluation: Hom(E,F)-valued wedge E-valued -> F-valued
inline FormElement wedge_ev(const HomBundle& hom, const FormElement& t, const FormElement& e) {
    check_over(t, hom.bundle, "wedge_ev");
    check_over(e, hom.src, "wedge_ev");
    PairingFn h = [&hom](std::size_t gt, std::size_t ge) {
        auto [s, tt] = hom.pair_of(gt);
        std::vector<std::pair<std::size_t, Rat>> out;
        if (s == ge) out.push_back({tt, Rat(1)});
        return out;
    };
    return wedge(t, e, h, hom.tgt);
}

// twisted evaluation: E-valued wedge Hom(E,F)-valued -> F-valued
inline FormElement wedge_ev_twisted(const HomBundle& hom, const FormElement& e,
                                    const FormElement& t) {
    PairingFn h = [&hom](std::size_t ge, std::size_t gt) {
        auto [s, tt] = hom.pair_of(gt);
        std::vector<std::pair<std::size_t, Rat>> out;
        if (s == ge) {
            const int sgn = signs::swap_sign(hom.src->degree(ge),
                                             hom.bundle->degree(gt));
            out.push_back({tt, Rat(sgn)});
        }
        return out;
    };
    return wedge(e, t, h, hom.tgt);
}

// composition: Hom(F,G) wedge Hom(E,F) -> Hom(E,G)
inline FormElement wedge_comp(const HomBundle& fg, const HomBundle& ef, const HomBundle& eg,
                              const FormElement& t, const FormElement& s) {
    check_over(t, fg.bundle, "wedge_comp");
    check_over(s, ef.bundle, "wedge_comp");
    PairingFn h = [&](std::size_t gt, std::size_t gs) {
        auto [f1, g1] = fg.pair_of(gt);
        auto [e1, f2] = ef.pair_of(gs);
        std::vector<std::pair<std::size_t, Rat>> out;
        if (f1 == f2) out.push_back({eg.index(e1, g1), Rat(1)});
        return out;
    };
    return wedge(t, s, h, eg.bundle);
}

// graded commutator [T, S] = T ^ S - (-1)^{|T||S|} S ^ T on End(E)-valued
// forms; |T|, |S| are total degrees (both must be homogeneous).
inline FormElement wedge_comm(const HomBundle& end, const FormElement& t, const FormElement& s) {
    auto dt = t.total_degree(), ds = s.total_degree();
    if (t.is_zero() || s.is_zero()) return FormElement(end.bundle, t.rank());
    if (!dt || !ds) throw Error("graded commutator needs homogeneous arguments");
    FormElement ts = wedge_comp(end, end, end, t, s);
    FormElement st = wedge_comp(end, end, end, s, t);
    st.scale(Rat(signs::swap_sign(*dt, *ds)));
    return ts - st;
}

// duality pairing: Omega(A;E*) wedge Omega(A;E) -> Omega(A)
inline FormElement wedge_dual_pair(const FormElement& eta_star, const FormElement& eta,
                                   BundlePtr trivial) {
    PairingFn h = [](std::size_t gd, std::size_t ge) {
        std::vector<std::pair<std::size_t, Rat>> out;
        if (gd == ge) out.push_back({0, Rat(1)});
        return out;
    };
    return wedge(eta_star, eta, h, std::move(trivial));
}

}  // namespace ruth
