#pragma once

#include <map>
#include <string>
#include <vector>

#include "ruth/algebroid.hpp"
#include "ruth/rep.hpp"
#include "ruth/schouten.hpp"

namespace ruth {

/*
** Deformation cochain of degree k: an antisymmetric multiderivation
** c : Gamma(A)^k -> Gamma(A) with symbol sigma_c : Gamma(A)^{k-1} -> Gamma(TM),
** stored by values on strictly increasing basis tuples.  The Leibniz rule
**   c(.., f beta) = f c(.., beta) + L_{sigma_c(..)}(f) beta
** is the evaluation rule, not a checked condition.
*/
struct DefCochain {
    AlgebroidPtr A;
    int k = 0;
    std::map<std::vector<int>, Section> vals;  // increasing k-tuples
    std::map<std::vector<int>, VecField> sym;  // increasing (k-1)-tuples
};

namespace detail {

inline bool is_unit_basis(const Section& s, int& which) {
    which = -1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].is_zero()) continue;
        if (which >= 0) return false;
        if (!(s[i] == Poly::constant(s[i].vars(), Rat(1)))) return false;
        which = static_cast<int>(i);
    }
    return which >= 0;
}

}  // namespace detail

// sigma_c on arbitrary section tuples (tensorial, antisymmetric).
inline VecField def_symbol_eval(const DefCochain& c, const std::vector<Section>& args) {
    const auto& A = *c.A;
    VecField out = A.zero_field();
    if (static_cast<int>(args.size()) != c.k - 1) throw Error("symbol arity mismatch");
    std::vector<int> idx(args.size(), 0);
    std::function<void(std::size_t, Poly)> rec = [&](std::size_t pos, Poly coeff) {
        if (coeff.is_zero()) return;
        if (pos == args.size()) {
            std::vector<int> t = idx;
            long inv = 0;
            for (std::size_t i = 0; i + 1 < t.size(); ++i)
                for (std::size_t j = i + 1; j < t.size(); ++j) {
                    if (t[i] == t[j]) return;
                    if (t[i] > t[j]) ++inv;
                }
            std::sort(t.begin(), t.end());
            auto it = c.sym.find(t);
            if (it == c.sym.end()) return;
            Poly cc = coeff;
            cc.scale(Rat(signs::pow_m1(inv)));
            for (std::size_t a = 0; a < A.dim(); ++a) out[a] += cc * it->second[a];
            return;
        }
        for (int i = 0; i < A.rank; ++i) {
            if (args[pos][i].is_zero()) continue;
            idx[pos] = i;
            rec(pos + 1, coeff * args[pos][i]);
        }
    };
    rec(0, Poly::constant(A.chart, Rat(1)));
    return out;
}

// c on arbitrary section tuples, via multilinearity, antisymmetry and the
// last-argument Leibniz rule.
inline Section def_eval(const DefCochain& c, std::vector<Section> args) {
    const auto& A = *c.A;
    if (static_cast<int>(args.size()) != c.k) throw Error("cochain arity mismatch");
    // locate the last non-basis argument
    int nonbasis = -1;
    std::vector<int> basis_idx(args.size(), -1);
    for (std::size_t i = 0; i < args.size(); ++i) {
        int w;
        if (detail::is_unit_basis(args[i], w))
            basis_idx[i] = w;
        else
            nonbasis = static_cast<int>(i);
    }
    if (nonbasis < 0) {
        // pure basis tuple: sort with sign and look up
        std::vector<int> t = basis_idx;
        long inv = 0;
        for (std::size_t i = 0; i + 1 < t.size(); ++i)
            for (std::size_t j = i + 1; j < t.size(); ++j) {
                if (t[i] == t[j]) return A.zero_section();
                if (t[i] > t[j]) ++inv;
            }
        std::sort(t.begin(), t.end());
        auto it = c.vals.find(t);
        Section out = A.zero_section();
        if (it != c.vals.end()) {
            out = it->second;
            if (inv % 2 != 0)
                for (auto& v : out) v.scale(Rat(-1));
        }
        return out;
    }
    if (nonbasis != static_cast<int>(args.size()) - 1) {
        // swap it to the last slot (antisymmetry)
        std::swap(args[nonbasis], args[args.size() - 1]);
        Section out = def_eval(c, std::move(args));
        for (auto& v : out) v.scale(Rat(-1));
        return out;
    }
    // expand the last argument: c(.., f e_j) = f c(.., e_j) + L_sigma(f) e_j
    Section last = args.back();
    std::vector<Section> rest(args.begin(), args.end() - 1);
    Section out = A.zero_section();
    VecField sigma = c.k >= 1 ? def_symbol_eval(c, rest) : A.zero_field();
    for (int j = 0; j < A.rank; ++j) {
        const Poly f = last[j];
        if (f.is_zero()) continue;
        std::vector<Section> sub = rest;
        sub.push_back(basis_section(A, j));
        Section val = def_eval(c, std::move(sub));
        for (int l = 0; l < A.rank; ++l) out[l] += f * val[l];
        out[j] += vf_apply(sigma, f);
    }
    return out;
}

/*
** delta(c) evaluated directly from the Koszul-type formula
**   delta(c)(a_1..a_{k+1}) = sum_{i<j} (-1)^{i+j} c([a_i,a_j], .., ^i, ^j, ..)
**                          + sum_i (-1)^{i+1} [a_i, c(.., ^i, ..)]
** on arbitrary section tuples.
*/
inline Section delta_eval(const DefCochain& c, const std::vector<Section>& args) {
    const auto& A = *c.A;
    if (static_cast<int>(args.size()) != c.k + 1) throw Error("delta arity mismatch");
    Section out = A.zero_section();
    for (std::size_t i = 0; i < args.size(); ++i)
        for (std::size_t j = i + 1; j < args.size(); ++j) {
            std::vector<Section> sub;
            sub.push_back(bracket(A, args[i], args[j]));
            for (std::size_t u = 0; u < args.size(); ++u)
                if (u != i && u != j) sub.push_back(args[u]);
            Section val = def_eval(c, std::move(sub));
            const int sgn = signs::koszul_pair(static_cast<long>(i) + 1,
                                               static_cast<long>(j) + 1);
            for (int l = 0; l < A.rank; ++l) out[l] += Rat(sgn) * val[l];
        }
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::vector<Section> sub;
        for (std::size_t u = 0; u < args.size(); ++u)
            if (u != i) sub.push_back(args[u]);
        Section val = bracket(A, args[i], def_eval(c, std::move(sub)));
        const int sgn = signs::koszul_single(static_cast<long>(i) + 1);
        for (int l = 0; l < A.rank; ++l) out[l] += Rat(sgn) * val[l];
    }
    return out;
}

namespace detail {

inline std::vector<std::vector<int>> increasing_tuples(int r, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > r) return out;
    if (k == 0) return {{}};
    std::vector<int> t(k);
    for (int i = 0; i < k; ++i) t[i] = i;
    for (;;) {
        out.push_back(t);
        int i = k - 1;
        while (i >= 0 && t[i] == r - 1 - (k - 1 - i)) --i;
        if (i < 0) break;
        ++t[i];
        for (int j = i + 1; j < k; ++j) t[j] = t[j - 1] + 1;
    }
    return out;
}

}  // namespace detail

/*
** The deformation differential, with the symbol of delta(c) extracted from
** the multiderivation rule itself:
**   delta(c)(e_T, x_a e_j) - x_a delta(c)(e_T, e_j) = lambda_a e_j
** and the consistency of the pattern across j is verified exactly.
*/
inline DefCochain deformation_differential(const DefCochain& c, int max_degree = 3) {
    const auto& A = *c.A;
    if (c.k > max_degree)
        throw Error("deformation degree beyond bound (" + std::to_string(max_degree) + ")");
    DefCochain out;
    out.A = c.A;
    out.k = c.k + 1;
    for (const auto& T : detail::increasing_tuples(A.rank, c.k + 1)) {
        std::vector<Section> args;
        for (int i : T) args.push_back(basis_section(A, i));
        Section v = delta_eval(c, args);
        bool nonzero = false;
        for (const auto& p : v) nonzero = nonzero || !p.is_zero();
        if (nonzero) out.vals[T] = std::move(v);
    }
    for (const auto& T : detail::increasing_tuples(A.rank, c.k)) {
        VecField lambda = A.zero_field();
        for (std::size_t a = 0; a < A.dim(); ++a) {
            bool have = false;
            for (int j = 0; j < A.rank; ++j) {
                std::vector<Section> args;
                for (int i : T) args.push_back(basis_section(A, i));
                Section fe = A.zero_section();
                fe[j] = Poly::variable(A.chart, a);
                args.push_back(fe);
                Section u = delta_eval(c, args);
                args.back() = basis_section(A, j);
                Section u0 = delta_eval(c, args);
                for (int l = 0; l < A.rank; ++l) u[l] -= Poly::variable(A.chart, a) * u0[l];
                for (int l = 0; l < A.rank; ++l) {
                    if (l == j) continue;
                    if (!u[l].is_zero())
                        throw Error("deformation symbol extraction: multiderivation rule "
                                    "violated at coordinate " +
                                    (*A.chart)[a]);
                }
                if (!have) {
                    lambda[a] = u[j];
                    have = true;
                } else if (lambda[a] != u[j]) {
                    throw Error("deformation symbol extraction: inconsistent symbol at "
                                "coordinate " +
                                (*A.chart)[a]);
                }
            }
        }
        bool nonzero = false;
        for (const auto& p : lambda) nonzero = nonzero || !p.is_zero();
        if (nonzero) out.sym[T] = std::move(lambda);
    }
    return out;
}

/*
** The bridge Psi : C^k_def(A) -> Omega^k(A; A) + Omega^{k-1}(A; TM) of the
** adjoint theorem:  Psi(c) = (c_D, -sigma_D) with
**   c_D(a_1..a_k) = c(a_1..a_k)
**                  + (-1)^{k-1} sum_i (-1)^i nabla_{sigma_c(.. ^i ..)}(a_i).
*/
inline FormElement psi_bridge(const AlgebroidPtr& A, const Connection& con, const Ruth& ad,
                              const DefCochain& c) {
    const auto& alg = *A;
    const int r = alg.rank;
    FormElement out(ad.E, r);
    for (const auto& T : detail::increasing_tuples(r, c.k)) {
        std::vector<Section> args;
        for (int i : T) args.push_back(basis_section(alg, i));
        Section cd = def_eval(c, args);
        for (std::size_t i = 0; i < T.size(); ++i) {
            std::vector<Section> rest;
            for (std::size_t u = 0; u < T.size(); ++u)
                if (u != i) rest.push_back(args[u]);
            VecField sig = def_symbol_eval(c, rest);
            Section corr = con_apply(alg, con, sig, basis_section(alg, T[i]));
            const int sgn = signs::psi_correction(c.k, static_cast<long>(i) + 1);
            for (int l = 0; l < r; ++l) cd[l] += Rat(sgn) * corr[l];
        }
        for (int l = 0; l < r; ++l)
            if (!cd[l].is_zero()) out.add_term(T, l, cd[l]);
    }
    for (const auto& S : detail::increasing_tuples(r, c.k - 1)) {
        std::vector<Section> args;
        for (int i : S) args.push_back(basis_section(alg, i));
        VecField sig = def_symbol_eval(c, args);
        for (std::size_t a = 0; a < alg.dim(); ++a) {
            Poly v = sig[a];
            v.scale(Rat(signs::psi_symbol()));
            if (!v.is_zero()) out.add_term(S, r + a, std::move(v));
        }
    }
    return out;
}

/*
** Exact Betti numbers of the deformation complex at point base, where
** C^k_def(g) = Hom(Lambda^k g, g) and the symbol part vanishes.
*/
inline std::vector<std::size_t> deformation_betti_point_base(const AlgebroidPtr& A) {
    const auto& alg = *A;
    if (alg.dim() != 0) throw Error("deformation Betti numbers require a point base");
    const int r = alg.rank;
    std::vector<std::size_t> dims;
    std::vector<std::vector<std::vector<int>>> basis;
    for (int k = 0; k <= r; ++k) {
        basis.push_back(detail::increasing_tuples(r, k));
        dims.push_back(basis.back().size() * r);
    }
    std::vector<QMat> d;
    for (int k = 0; k < r; ++k) {
        QMat m(dims[k + 1], dims[k]);
        for (std::size_t bi = 0; bi < basis[k].size(); ++bi)
            for (int l = 0; l < r; ++l) {
                DefCochain c;
                c.A = A;
                c.k = k;
                Section s = alg.zero_section();
                s[l] = Poly::constant(alg.chart, Rat(1));
                c.vals[basis[k][bi]] = std::move(s);
                DefCochain dc = deformation_differential(c, r);
                for (std::size_t ti = 0; ti < basis[k + 1].size(); ++ti) {
                    auto it = dc.vals.find(basis[k + 1][ti]);
                    if (it == dc.vals.end()) continue;
                    for (int w = 0; w < r; ++w)
                        m(ti * r + w, bi * r + l) = it->second[w].constant_value();
                }
            }
        d.push_back(std::move(m));
    }
    return linalg::betti_numbers(dims, d);
}

// --- k-differentials ---

enum class KDiffVerdict { KDifferential, AlmostOnly, NotAlmost };

struct KDiffReport {
    KDiffVerdict verdict = KDiffVerdict::NotAlmost;
    std::vector<Check> checks;
};

struct K1Differential {
    int k = 1;
    std::vector<Multivector> on_coords;    // one per chart coordinate, degree k-1
    std::vector<Multivector> on_sections;  // one per frame section, degree k
};

/*
** Classification of an almost k-differential:
**   - shape: delta(f) in Gamma(Lambda^{k-1} A), delta(alpha) in Gamma(Lambda^k A)
**     (violations make it not even almost);
**   - the cocycle equation delta[a,b] = [delta a, b] + [a, delta b] on basis
**     pairs, plus its coordinate-function companion
**     delta(rho(a)(f)) = [delta a, f] + [a, delta f],
**   both through the Schouten bracket.
*/
inline KDiffReport k_differential_check(const AlgebroidPtr& A, const K1Differential& kd) {
    const auto& alg = *A;
    const int r = alg.rank;
    const int k = kd.k;
    KDiffReport rep;
    if (k < 1 || k > r) {
        rep.checks.push_back({"shape", false, "k out of range 1.." + std::to_string(r)});
        return rep;
    }
    if (kd.on_coords.size() != alg.dim() || kd.on_sections.size() != static_cast<std::size_t>(r)) {
        rep.checks.push_back({"shape", false, "image tables have wrong arity"});
        return rep;
    }
    for (const auto& mv : kd.on_coords)
        for (const auto& [t, p] : mv.terms)
            if (static_cast<int>(t.size()) != k - 1) {
                rep.checks.push_back(
                    {"shape", false, "delta(f) must have exterior degree " + std::to_string(k - 1)});
                return rep;
            }
    for (const auto& mv : kd.on_sections)
        for (const auto& [t, p] : mv.terms)
            if (static_cast<int>(t.size()) != k) {
                rep.checks.push_back(
                    {"shape", false, "delta(alpha) must have exterior degree " + std::to_string(k)});
                return rep;
            }
    rep.checks.push_back({"shape", true, ""});

    auto delta_fn = [&](const Poly& f) {
        Multivector out(A);
        for (std::size_t a = 0; a < alg.dim(); ++a) {
            Multivector piece = kd.on_coords[a];
            piece.scale(f.partial(a));
            out += piece;
        }
        return out;
    };

    Check ca{"cocycle on section pairs", true, ""};
    for (int i = 0; i < r && ca.ok; ++i)
        for (int j = i + 1; j < r && ca.ok; ++j) {
            // delta([e_i,e_j]) with [e_i,e_j] = sum c^l e_l:
            // delta(f alpha) = delta(f) ^ alpha + f delta(alpha)
            const Section br = alg.structure(i, j);
            Multivector lhs(A);
            for (int l = 0; l < r; ++l) {
                if (br[l].is_zero()) continue;
                Multivector unit(A);
                unit.add_term({l}, Poly::constant(alg.chart, Rat(1)));
                lhs += mv_wedge(delta_fn(br[l]), unit);
                Multivector piece = kd.on_sections[l];
                piece.scale(br[l]);
                lhs += piece;
            }
            Multivector ei = Multivector::from_section(A, basis_section(alg, i));
            Multivector ej = Multivector::from_section(A, basis_section(alg, j));
            Multivector rhs = schouten(kd.on_sections[i], ej) + schouten(ei, kd.on_sections[j]);
            if (!(lhs == rhs)) {
                ca.ok = false;
                ca.witness = "(" + alg.frame_name(i) + "," + alg.frame_name(j) + "): " +
                             (lhs - rhs).str();
            }
        }
    rep.checks.push_back(ca);

    Check cb{"cocycle on coordinate functions", true, ""};
    for (int i = 0; i < r && cb.ok; ++i)
        for (std::size_t a = 0; a < alg.dim() && cb.ok; ++a) {
            Multivector lhs = delta_fn(alg.rho[i][a]);
            Multivector ei = Multivector::from_section(A, basis_section(alg, i));
            Multivector xa = Multivector::function(A, Poly::variable(alg.chart, a));
            Multivector rhs = schouten(kd.on_sections[i], xa) + schouten(ei, kd.on_coords[a]);
            if (!(lhs == rhs)) {
                cb.ok = false;
                cb.witness = "(" + alg.frame_name(i) + "," + (*alg.chart)[a] + "): " +
                             (lhs - rhs).str();
            }
        }
    rep.checks.push_back(cb);

    rep.verdict = (ca.ok && cb.ok) ? KDiffVerdict::KDifferential : KDiffVerdict::AlmostOnly;
    return rep;
}

}  // namespace ruth
