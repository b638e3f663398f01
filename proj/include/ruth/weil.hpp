#pragma once

#include <map>
#include <string>
#include <vector>

#include "ruth/algebroid.hpp"
#include "ruth/gca.hpp"
#include "ruth/linalg.hpp"

namespace ruth {

/*
** The connection-dependent Weil algebra W(A, nabla): a bigraded commutative
** algebra over the chart functions on generators
**   del^a  of bidegree (0,1),
**   th^i   of bidegree (1,0),
**   mu^i   of bidegree (1,1),
** carrying the two differentials d_hor (bidegree (1,0)) and d_ver ((0,1))
** given on generators by the local-coordinate tables.
*/
struct WeilAlgebra {
    AlgebroidPtr A;
    GcaPtr alg;
    GcaDerivation d_hor, d_ver;

    std::size_t del_index(std::size_t a) const { return a; }
    std::size_t th_index(int i) const { return A->dim() + static_cast<std::size_t>(i); }
    std::size_t mu_index(int i) const {
        return A->dim() + static_cast<std::size_t>(A->rank) + static_cast<std::size_t>(i);
    }
};

inline WeilAlgebra build_weil(const AlgebroidPtr& A, const Connection& con) {
    const auto& alg = *A;
    const std::size_t m = alg.dim();
    const int r = alg.rank;
    const VarsPtr chart = alg.chart;

    std::vector<GcaGen> gens;
    for (std::size_t a = 0; a < m; ++a) gens.push_back({"del_" + (*chart)[a], 0, 1});
    for (int i = 0; i < r; ++i) gens.push_back({"th" + std::to_string(i + 1), 1, 0});
    for (int i = 0; i < r; ++i) gens.push_back({"mu" + std::to_string(i + 1), 1, 1});
    GcaPtr W = make_gca(chart, std::move(gens));

    WeilAlgebra out;
    out.A = A;
    out.alg = W;

    auto del = [&](std::size_t a) { return GcaElement::generator(W, a); };
    auto th = [&](int i) { return GcaElement::generator(W, m + i); };
    auto mu = [&](int i) { return GcaElement::generator(W, m + r + i); };
    auto scaled = [&](GcaElement e, Poly p) {
        e.scale(p);
        return e;
    };

    // curvature of nabla: R(d/dx_a, d/dx_b) e_j = r^i_{abj} e_i
    auto r_coeff = [&](std::size_t a, std::size_t b, int j, int i) {
        Poly v = con.gamma[b][j][i].partial(a) - con.gamma[a][j][i].partial(b);
        for (int k = 0; k < r; ++k)
            v += con.gamma[a][k][i] * con.gamma[b][j][k] - con.gamma[b][k][i] * con.gamma[a][j][k];
        return v;
    };

    // basic curvature coefficients R^l_{jka}
    const auto bd = adjoint_bundles(alg);
    auto [bas_a, bas_tm] = basic_connection(A, con, bd);

    // --- d_ver tables ---
    std::vector<GcaElement> ver(W->gens.size(), GcaElement(W));
    for (int i = 0; i < r; ++i) {
        // d_ver(th^i) = mu^i - Gamma^i_{aj} del^a th^j
        GcaElement e = mu(i);
        for (std::size_t a = 0; a < m; ++a)
            for (int j = 0; j < r; ++j)
                e -= scaled(del(a) * th(j), con.gamma[a][j][i]);
        ver[m + i] = std::move(e);
        // d_ver(mu^i) = -Gamma^i_{aj} del^a mu^j + 1/2 r^i_{abj} del^a del^b th^j
        GcaElement f(W);
        for (std::size_t a = 0; a < m; ++a)
            for (int j = 0; j < r; ++j)
                f -= scaled(del(a) * mu(j), con.gamma[a][j][i]);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                for (int j = 0; j < r; ++j) {
                    Poly v = r_coeff(a, b, j, i);
                    v.scale(Rat(1, 2));
                    f += scaled(del(a) * del(b) * th(j), std::move(v));
                }
        ver[m + r + i] = std::move(f);
    }
    // d_ver(f) = del_a(f) del^a
    std::vector<GcaElement> ver_coords;
    for (std::size_t a = 0; a < m; ++a) ver_coords.push_back(del(a));
    out.d_ver = make_derivation(W, 0, 1, std::move(ver), std::move(ver_coords));

    // --- d_hor tables ---
    std::vector<GcaElement> hor(W->gens.size(), GcaElement(W));
    for (std::size_t a = 0; a < m; ++a) {
        // d_hor(del^a) = -rho^a_i mu^i + (del_b rho^a_i - Gamma^j_{bi} rho^a_j) th^i del^b
        GcaElement e(W);
        for (int i = 0; i < r; ++i) e -= scaled(mu(i), alg.rho[i][a]);
        for (std::size_t b = 0; b < m; ++b)
            for (int i = 0; i < r; ++i) {
                Poly v = alg.rho[i][a].partial(b);
                for (int j = 0; j < r; ++j) v -= con.gamma[b][i][j] * alg.rho[j][a];
                e += scaled(th(i) * del(b), std::move(v));
            }
        hor[a] = std::move(e);
    }
    for (int i = 0; i < r; ++i) {
        // d_hor(th^i) = -1/2 c^i_{jk} th^j th^k
        GcaElement e(W);
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k) {
                Poly v = alg.structure(j, k)[i];
                v.scale(Rat(-1, 2));
                e += scaled(th(j) * th(k), std::move(v));
            }
        hor[m + i] = std::move(e);
        // d_hor(mu^i) = -(c^i_{jk} + rho^a_k Gamma^i_{aj}) th^j mu^k
        //               + 1/2 R^i_{jka} th^j th^k del^a
        GcaElement f(W);
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k) {
                Poly v = alg.structure(j, k)[i];
                for (std::size_t a = 0; a < m; ++a) v += alg.rho[k][a] * con.gamma[a][j][i];
                v.scale(Rat(-1));
                f += scaled(th(j) * mu(k), std::move(v));
            }
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k)
                for (std::size_t a = 0; a < m; ++a) {
                    VecField X = alg.zero_field();
                    X[a] = Poly::constant(chart, Rat(1));
                    Section rb = basic_curvature_eval(alg, con, bas_tm, basis_section(alg, j),
                                                      basis_section(alg, k), X);
                    Poly v = rb[i];
                    v.scale(Rat(1, 2));
                    f += scaled(th(j) * th(k) * del(a), std::move(v));
                }
        hor[m + r + i] = std::move(f);
    }
    // d_hor(f) = del_a(f) rho^a_i th^i
    std::vector<GcaElement> hor_coords;
    for (std::size_t a = 0; a < m; ++a) {
        GcaElement e(W);
        for (int i = 0; i < r; ++i) e += scaled(th(i), alg.rho[i][a]);
        hor_coords.push_back(std::move(e));
    }
    out.d_hor = make_derivation(W, 1, 0, std::move(hor), std::move(hor_coords));
    return out;
}

enum class WeilWhich { Hor, Ver, Total };

inline GcaElement weil_d(const WeilAlgebra& W, const GcaElement& e, WeilWhich which) {
    switch (which) {
        case WeilWhich::Hor:
            return apply_derivation(W.d_hor, e);
        case WeilWhich::Ver:
            return apply_derivation(W.d_ver, e);
        default:
            return apply_derivation(W.d_hor, e) + apply_derivation(W.d_ver, e);
    }
}

// Printable per-generator differential tables, canonical order.
inline std::string weil_tables_text(const WeilAlgebra& W) {
    std::string out;
    for (std::size_t g = 0; g < W.alg->gens.size(); ++g)
        out += "d_ver(" + W.alg->gens[g].name + ") = " +
               apply_derivation(W.d_ver, GcaElement::generator(W.alg, g)).str() + "\n";
    for (std::size_t g = 0; g < W.alg->gens.size(); ++g)
        out += "d_hor(" + W.alg->gens[g].name + ") = " +
               apply_derivation(W.d_hor, GcaElement::generator(W.alg, g)).str() + "\n";
    return out;
}

/*
** Kalkman's BRST operator for an action algebroid, assembled independently
** from its four-term formula
**   delta = d_W (x) 1 + 1 (x) d_DR + sum_a th^a (x) L_a - sum_b mu^b (x) i_b
** as a sum of four generator tables on W(g) (x) Omega(M), with 1 (x) dx^a
** identified with del^a.  Refuses inputs that are not action algebroids.
*/
inline GcaDerivation kalkman_brst(const WeilAlgebra& W) {
    const auto& alg = *W.A;
    const std::size_t m = alg.dim();
    const int r = alg.rank;
    const GcaPtr& G = W.alg;
    for (const auto& [jk, s] : alg.c)
        for (const auto& p : s)
            if (!p.is_constant())
                throw Error("BRST comparison requires an action algebroid "
                            "(structure functions must be constant)");

    auto del = [&](std::size_t a) { return GcaElement::generator(G, a); };
    auto th = [&](int i) { return GcaElement::generator(G, m + i); };
    auto mu = [&](int i) { return GcaElement::generator(G, m + r + i); };
    auto scaled = [&](GcaElement e, Poly p) {
        e.scale(p);
        return e;
    };

    std::vector<GcaElement> gen_images(G->gens.size(), GcaElement(G));
    std::vector<GcaElement> coord_images(m, GcaElement(G));

    // term 1: d_W (x) 1, the standard Weil differential of the Lie algebra
    for (int i = 0; i < r; ++i) {
        GcaElement e = mu(i);
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k) {
                Poly v = alg.structure(j, k)[i];
                v.scale(Rat(-1, 2));
                e += scaled(th(j) * th(k), std::move(v));
            }
        gen_images[m + i] += e;
        GcaElement f(G);
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k) {
                Poly v = alg.structure(j, k)[i];
                v.scale(Rat(-1));
                f += scaled(th(j) * mu(k), std::move(v));
            }
        gen_images[m + r + i] += f;
    }
    // term 2: 1 (x) d_DR
    for (std::size_t a = 0; a < m; ++a) coord_images[a] += del(a);
    // term 3: sum_a th^a (x) L_a  (Lie derivative along the action fields)
    for (std::size_t a = 0; a < m; ++a) {
        // on functions: th^i rho(e_i)(f); on dx^c: L_X(dx^c) = d(X^c)
        for (int i = 0; i < r; ++i) coord_images[a] += scaled(th(i), alg.rho[i][a]);
        GcaElement e(G);
        for (int i = 0; i < r; ++i)
            for (std::size_t b = 0; b < m; ++b)
                e += scaled(th(i) * del(b), alg.rho[i][a].partial(b));
        gen_images[a] += e;
    }
    // term 4: - sum_b mu^b (x) i_b
    for (std::size_t a = 0; a < m; ++a) {
        GcaElement e(G);
        for (int i = 0; i < r; ++i) e -= scaled(mu(i), alg.rho[i][a]);
        gen_images[a] += e;
    }
    return make_total_derivation(G, 1, std::move(gen_images), std::move(coord_images));
}

struct BrstResult {
    bool equal = false;
    std::string first_difference;  // generator or coordinate name
};

inline BrstResult brst_compare(const AlgebroidPtr& A) {
    WeilAlgebra W = build_weil(A, Connection::zero(*A));
    GcaDerivation kalk = kalkman_brst(W);
    for (std::size_t g = 0; g < W.alg->gens.size(); ++g) {
        GcaElement ours = weil_d(W, GcaElement::generator(W.alg, g), WeilWhich::Total);
        GcaElement theirs = apply_derivation(kalk, GcaElement::generator(W.alg, g));
        if (!(ours == theirs)) return {false, W.alg->gens[g].name};
    }
    for (std::size_t a = 0; a < A->dim(); ++a) {
        GcaElement x = GcaElement::unit(W.alg, Poly::variable(A->chart, a));
        GcaElement ours = weil_d(W, x, WeilWhich::Total);
        GcaElement theirs = apply_derivation(kalk, x);
        if (!(ours == theirs)) return {false, (*A->chart)[a]};
    }
    return {true, ""};
}

/*
** Exact Betti numbers of W(g) for a Lie algebra (m = 0), truncated at total
** degree N; degrees 0..N-1 are unaffected by the truncation and reported.
*/
inline std::vector<std::pair<int, std::size_t>> weil_cohomology(const WeilAlgebra& W, int N) {
    const auto& alg = *W.A;
    if (alg.dim() != 0)
        throw Error("weil_cohomology: unsupported base (cohomology over a polynomial base "
                    "is infinite-dimensional per degree)");
    const int r = alg.rank;
    if (N < 1) throw Error("weil_cohomology: degree cutoff must be positive");

    // basis monomials th^J mu^K with |J| + 2|K| <= N, grouped by total degree
    std::vector<std::vector<GcaMono>> basis(N + 1);
    std::vector<int> Jset;
    std::function<void(int)> recJ = [&](int start) {
        // for each theta subset, enumerate mu exponents
        const int jdeg = static_cast<int>(Jset.size());
        std::vector<unsigned> K(W.alg->gens.size(), 0);
        std::function<void(int, int)> recK = [&](int gi, int used) {
            if (gi == r) {
                const int deg = jdeg + 2 * used;
                if (deg <= N) {
                    GcaMono mno;
                    for (int j : Jset) mno.odd.push_back(static_cast<int>(W.th_index(j)));
                    mno.even = K;
                    basis[deg].push_back(std::move(mno));
                }
                return;
            }
            for (int e = 0; 2 * (used + e) + jdeg <= N; ++e) {
                K[W.mu_index(gi)] = static_cast<unsigned>(e);
                recK(gi + 1, used + e);
            }
            K[W.mu_index(gi)] = 0;
        };
        recK(0, 0);
        for (int g = start; g < r; ++g) {
            Jset.push_back(g);
            recJ(g + 1);
            Jset.pop_back();
        }
    };
    recJ(0);

    auto index_of = [&](int deg, const GcaMono& m) -> long {
        const auto& B = basis[deg];
        for (std::size_t i = 0; i < B.size(); ++i)
            if (B[i] == m) return static_cast<long>(i);
        return -1;
    };

    std::vector<std::size_t> dims;
    for (int d = 0; d <= N; ++d) dims.push_back(basis[d].size());
    std::vector<QMat> diffs;
    for (int d = 0; d < N; ++d) {
        QMat mtx(dims[d + 1], dims[d]);
        for (std::size_t col = 0; col < basis[d].size(); ++col) {
            GcaElement e(W.alg);
            e.add_term(basis[d][col], Poly::constant(alg.chart, Rat(1)));
            GcaElement de = weil_d(W, e, WeilWhich::Total);
            for (const auto& [mn, c] : de.terms()) {
                long row = index_of(d + 1, mn);
                if (row < 0) throw Error("weil_cohomology: basis bookkeeping error");
                mtx(row, col) += c.constant_value();
            }
        }
        diffs.push_back(std::move(mtx));
    }
    auto betti = linalg::betti_numbers(dims, diffs);
    std::vector<std::pair<int, std::size_t>> out;
    for (int d = 0; d < N; ++d) out.push_back({d, betti[d]});
    return out;
}

/*
** IM form verdict via the two explicit sigma-equations:
**   <sigma(a), rho(b)> = -<sigma(b), rho(a)>
**   sigma([a,b]) = L_{rho(a)} sigma(b) - L_{rho(b)} sigma(a)
**                  + d<sigma(a), rho(b)>
** expanded on all basis pairs.  sigma is given by rows sigma[i][a], the
** coefficients of sigma(e_{i+1}) on dx_a.
*/
inline std::vector<Check> im_form_check(const AlgebroidPtr& A,
                                        const std::vector<std::vector<Poly>>& sigma) {
    const auto& alg = *A;
    const std::size_t m = alg.dim();
    const int r = alg.rank;
    if (sigma.size() != static_cast<std::size_t>(r)) throw Error("sigma must have one row per section");
    for (const auto& row : sigma)
        if (row.size() != m) throw Error("sigma rows must have one entry per coordinate");

    auto pair_with = [&](int i, int j) {
        Poly v = Poly::zero(alg.chart);
        for (std::size_t a = 0; a < m; ++a) v += sigma[i][a] * alg.rho[j][a];
        return v;  // <sigma(e_i), rho(e_j)>
    };
    std::vector<Check> out;
    Check c1{"antisymmetry of <sigma(.), rho(.)>", true, ""};
    for (int i = 0; i < r && c1.ok; ++i)
        for (int j = i; j < r && c1.ok; ++j) {
            Poly v = pair_with(i, j) + pair_with(j, i);
            if (!v.is_zero()) {
                c1.ok = false;
                c1.witness = "(" + alg.frame_name(i) + "," + alg.frame_name(j) + "): " + v.str();
            }
        }
    out.push_back(c1);

    auto lie_derivative = [&](const VecField& X, const std::vector<Poly>& omega) {
        // (L_X omega)_b = X^a del_a omega_b + omega_a del_b X^a
        std::vector<Poly> out2(m, Poly::zero(alg.chart));
        for (std::size_t b = 0; b < m; ++b) {
            for (std::size_t a = 0; a < m; ++a) {
                out2[b] += X[a] * omega[b].partial(a);
                out2[b] += omega[a] * X[a].partial(b);
            }
        }
        return out2;
    };

    Check c2{"sigma([a,b]) = L_rho(a) sigma(b) - L_rho(b) sigma(a) + d<sigma(a),rho(b)>", true,
             ""};
    for (int i = 0; i < r && c2.ok; ++i)
        for (int j = i + 1; j < r && c2.ok; ++j) {
            const Section br = alg.structure(i, j);
            std::vector<Poly> lhs(m, Poly::zero(alg.chart));
            for (int k = 0; k < r; ++k)
                for (std::size_t b = 0; b < m; ++b) lhs[b] += br[k] * sigma[k][b];
            auto l1 = lie_derivative(alg.anchor(i), sigma[j]);
            auto l2 = lie_derivative(alg.anchor(j), sigma[i]);
            const Poly pairing = pair_with(i, j);
            for (std::size_t b = 0; b < m; ++b) {
                Poly v = lhs[b] - l1[b] + l2[b] - pairing.partial(b);
                if (!v.is_zero()) {
                    c2.ok = false;
                    c2.witness = "(" + alg.frame_name(i) + "," + alg.frame_name(j) +
                                 ") component dx_" + (*alg.chart)[b] + ": " + v.str();
                    break;
                }
            }
        }
    out.push_back(c2);
    return out;
}

}  // namespace ruth
