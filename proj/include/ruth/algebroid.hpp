#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ruth/graded.hpp"
#include "ruth/poly.hpp"
#include "ruth/signs.hpp"

namespace ruth {

// Outcome of one named verification; failures carry a printable witness.
struct Check {
    std::string name;
    bool ok = true;
    std::string witness;
};

inline bool all_ok(const std::vector<Check>& cs) {
    for (const auto& c : cs)
        if (!c.ok) return false;
    return true;
}

// Coefficient vector over the frame e_1..e_r.
using Section = std::vector<Poly>;
// Coefficient vector over the coordinate frame of TM.
using VecField = std::vector<Poly>;

/*
** A Lie algebroid over a single global chart with trivialized bundle:
** anchor matrix rho^a_i and structure functions c^i_{jk} (antisymmetric in
** j,k; stored on j < k).
*/
struct ChartAlgebroid {
    VarsPtr chart;                       // m coordinate names
    int rank = 0;                        // r
    std::vector<std::vector<Poly>> rho;  // rho[i][a] : coefficient of d/dx_a in rho(e_{i+1})
    std::map<std::pair<int, int>, Section> c;  // (j,k), j<k -> c^._{jk}

    std::size_t dim() const { return chart ? chart->size() : 0; }

    std::string frame_name(int i) const { return "e" + std::to_string(i + 1); }

    Section zero_section() const { return Section(rank, Poly::zero(chart)); }
    VecField zero_field() const { return VecField(dim(), Poly::zero(chart)); }

    // c^-_{jk} with the antisymmetry sign for arbitrary j, k.
    Section structure(int j, int k) const {
        if (j == k) return zero_section();
        const bool flip = j > k;
        auto it = c.find(flip ? std::make_pair(k, j) : std::make_pair(j, k));
        if (it == c.end()) return zero_section();
        Section s = it->second;
        if (flip)
            for (auto& v : s) v.scale(Rat(-1));
        return s;
    }

    VecField anchor(int i) const {
        VecField v = zero_field();
        for (std::size_t a = 0; a < dim(); ++a) v[a] = rho[i][a];
        return v;
    }
};

using AlgebroidPtr = std::shared_ptr<const ChartAlgebroid>;

inline AlgebroidPtr make_algebroid(VarsPtr chart, int rank,
                                   std::vector<std::vector<Poly>> rho,
                                   std::map<std::pair<int, int>, Section> c) {
    auto A = std::make_shared<ChartAlgebroid>();
    A->chart = std::move(chart);
    A->rank = rank;
    if (static_cast<int>(rho.size()) != rank) throw Error("anchor must have one row per section");
    for (const auto& row : rho)
        if (row.size() != (A->chart ? A->chart->size() : 0))
            throw Error("anchor row length must equal the chart dimension");
    for (const auto& [jk, s] : c) {
        if (jk.first >= jk.second || jk.first < 0 || jk.second >= rank)
            throw Error("structure functions must be indexed by pairs j < k");
        if (static_cast<int>(s.size()) != rank)
            throw Error("structure function vector has wrong length");
    }
    A->rho = std::move(rho);
    A->c = std::move(c);
    return A;
}

// Point-base Lie algebra from constant structure functions.
inline AlgebroidPtr make_lie_algebra(int rank, std::map<std::pair<int, int>, Section> c) {
    VarsPtr chart = make_vars({});
    std::vector<std::vector<Poly>> rho(rank);
    return make_algebroid(chart, rank, std::move(rho), std::move(c));
}

// --- vector field and section calculus ---

inline Poly vf_apply(const VecField& X, const Poly& f) {
    Poly out = Poly::zero(f.vars());
    for (std::size_t a = 0; a < X.size(); ++a) out += X[a] * f.partial(a);
    return out;
}

inline VecField vf_bracket(const VecField& X, const VecField& Y) {
    VecField out(X.size(), Poly::zero(X.empty() ? VarsPtr{} : X[0].vars()));
    for (std::size_t a = 0; a < X.size(); ++a) out[a] = vf_apply(X, Y[a]) - vf_apply(Y, X[a]);
    return out;
}

inline VecField anchor_of(const ChartAlgebroid& A, const Section& s) {
    VecField out = A.zero_field();
    for (int i = 0; i < A.rank; ++i)
        for (std::size_t a = 0; a < A.dim(); ++a) out[a] += s[i] * A.rho[i][a];
    return out;
}

inline Poly anchor_apply(const ChartAlgebroid& A, const Section& s, const Poly& f) {
    return vf_apply(anchor_of(A, s), f);
}

inline Section basis_section(const ChartAlgebroid& A, int i) {
    Section s = A.zero_section();
    s[i] = Poly::constant(A.chart, Rat(1));
    return s;
}

// [X, Y] on sections, expanded through c and anchor derivatives.
inline Section bracket(const ChartAlgebroid& A, const Section& X, const Section& Y) {
    Section out = A.zero_section();
    for (int i = 0; i < A.rank; ++i)
        for (int j = 0; j < A.rank; ++j) {
            if (X[i].is_zero() || Y[j].is_zero()) continue;
            const Section cij = A.structure(i, j);
            const Poly xy = X[i] * Y[j];
            for (int k = 0; k < A.rank; ++k) out[k] += xy * cij[k];
        }
    for (int k = 0; k < A.rank; ++k) {
        for (int i = 0; i < A.rank; ++i) {
            if (!X[i].is_zero()) out[k] += X[i] * anchor_apply(A, basis_section(A, i), Y[k]);
            if (!Y[i].is_zero()) out[k] -= Y[i] * anchor_apply(A, basis_section(A, i), X[k]);
        }
    }
    return out;
}

/*
** verify_axioms: Jacobi on basis triples (expanded through c and anchor
** derivatives) and anchor-bracket compatibility on basis pairs.  Failures are
** values, not errors.
*/
inline std::vector<Check> verify_axioms(const ChartAlgebroid& A) {
    std::vector<Check> out;
    Check jac{"jacobi", true, ""};
    for (int i = 0; i < A.rank && jac.ok; ++i)
        for (int j = i + 1; j < A.rank && jac.ok; ++j)
            for (int k = j + 1; k < A.rank && jac.ok; ++k) {
                Section total = A.zero_section();
                const int tri[3][3] = {{i, j, k}, {j, k, i}, {k, i, j}};
                for (const auto& t : tri) {
                    Section inner = bracket(A, basis_section(A, t[1]), basis_section(A, t[2]));
                    Section term = bracket(A, basis_section(A, t[0]), inner);
                    for (int l = 0; l < A.rank; ++l) total[l] += term[l];
                }
                for (int l = 0; l < A.rank; ++l)
                    if (!total[l].is_zero()) {
                        jac.ok = false;
                        jac.witness = "triple (" + A.frame_name(i) + "," + A.frame_name(j) + "," +
                                      A.frame_name(k) + "): coefficient of " + A.frame_name(l) +
                                      " is " + total[l].str();
                        break;
                    }
            }
    out.push_back(jac);

    Check anc{"anchor-bracket", true, ""};
    for (int i = 0; i < A.rank && anc.ok; ++i)
        for (int j = i + 1; j < A.rank && anc.ok; ++j) {
            const VecField lhs = anchor_of(A, bracket(A, basis_section(A, i), basis_section(A, j)));
            const VecField rhs = vf_bracket(A.anchor(i), A.anchor(j));
            for (std::size_t a = 0; a < A.dim(); ++a)
                if (lhs[a] != rhs[a]) {
                    anc.ok = false;
                    anc.witness = "pair (" + A.frame_name(i) + "," + A.frame_name(j) +
                                  "): component " + (*A.chart)[a] + ": " + (lhs[a] - rhs[a]).str();
                    break;
                }
        }
    out.push_back(anc);
    return out;
}

// --- connections ---

// TM-connection on the vector bundle A: nabla_{d/dx_a} e_j = Gamma^i_{aj} e_i.
struct Connection {
    // gamma[a][j] = coefficient vector over the frame (index i)
    std::vector<std::vector<Section>> gamma;

    static Connection zero(const ChartAlgebroid& A) {
        Connection n;
        n.gamma.assign(A.dim(), std::vector<Section>(A.rank, Section(A.rank, Poly::zero(A.chart))));
        return n;
    }
};

inline Section con_apply(const ChartAlgebroid& A, const Connection& con, const VecField& X,
                         const Section& s) {
    Section out = A.zero_section();
    for (std::size_t a = 0; a < A.dim(); ++a) {
        if (X[a].is_zero()) continue;
        for (int j = 0; j < A.rank; ++j) {
            out[j] += X[a] * s[j].partial(a);
            for (int i = 0; i < A.rank; ++i) {
                if (s[j].is_zero()) continue;
                out[i] += X[a] * s[j] * con.gamma[a][j][i];
            }
        }
    }
    return out;
}

/*
** A-connection on a graded bundle, stored by generator images and extended by
** the Leibniz rules (anchor compatibility built into the extension).
*/
struct AConnection {
    AlgebroidPtr A;
    BundlePtr target;
    // im[i][g] = coefficient vector of nabla_{e_{i+1}}(gen g) over the bundle
    std::vector<std::vector<std::vector<Poly>>> im;
};

inline AConnection make_aconnection(AlgebroidPtr A, BundlePtr target,
                                    std::vector<std::vector<std::vector<Poly>>> im) {
    if (static_cast<int>(im.size()) != A->rank)
        throw Error("A-connection: one image row per frame section required");
    for (const auto& row : im) {
        if (row.size() != target->size()) throw Error("A-connection: image count mismatch");
        for (std::size_t g = 0; g < row.size(); ++g) {
            if (row[g].size() != target->size()) throw Error("A-connection: image length mismatch");
            for (std::size_t h = 0; h < row[g].size(); ++h)
                if (!row[g][h].is_zero() && target->degree(h) != target->degree(g))
                    throw Error("A-connection must preserve the grading");
        }
    }
    return AConnection{std::move(A), std::move(target), std::move(im)};
}

inline AConnection zero_aconnection(AlgebroidPtr A, BundlePtr target) {
    std::vector<std::vector<std::vector<Poly>>> im(
        A->rank, std::vector<std::vector<Poly>>(
                     target->size(), std::vector<Poly>(target->size(), Poly::zero(A->chart))));
    return AConnection{std::move(A), std::move(target), std::move(im)};
}

// nabla_alpha(v) for alpha a section of A and v a coefficient vector over the
// bundle generators; Leibniz in v, C^infty-linear in alpha.
inline std::vector<Poly> acon_apply(const AConnection& con, const Section& alpha,
                                    const std::vector<Poly>& v) {
    const auto& A = *con.A;
    std::vector<Poly> out(con.target->size(), Poly::zero(A.chart));
    for (int i = 0; i < A.rank; ++i) {
        if (alpha[i].is_zero()) continue;
        for (std::size_t g = 0; g < v.size(); ++g) {
            if (v[g].is_zero()) continue;
            // rho(e_i)(v_g) * g + v_g * nabla_i(g)
            out[g] += alpha[i] * anchor_apply(A, basis_section(A, i), v[g]);
            for (std::size_t h = 0; h < con.target->size(); ++h)
                out[h] += alpha[i] * v[g] * con.im[i][g][h];
        }
    }
    return out;
}

/*
** Koszul formula for d_nabla on Omega(A; E):
**   d w(a_1..a_{p+1}) = sum_{i<j} (-1)^{i+j} w([a_i,a_j], .., ^a_i, .., ^a_j, ..)
**                      + sum_i (-1)^{i+1} nabla_{a_i} w(.., ^a_i, ..).
*/
inline FormElement d_koszul(const AConnection& con, const FormElement& w) {
    const auto& A = *con.A;
    if (w.bundle() != con.target && w.bundle()->gens != con.target->gens)
        throw Error("d_koszul: connection acts on a different bundle");
    const int r = A.rank;
    FormElement out(w.bundle(), r);

    // collect the form degrees present
    std::map<std::size_t, bool> degrees;
    for (const auto& [k, c] : w.terms()) degrees[k.idx.size()] = true;

    // evaluate w on a basis tuple (sorted lookup), result over bundle gens
    auto eval_basis = [&](const std::vector<int>& tuple) {
        std::vector<Poly> val(w.bundle()->size(), Poly::zero(A.chart));
        std::vector<int> sorted = tuple;
        long inv = 0;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
            for (std::size_t j = i + 1; j < sorted.size(); ++j) {
                if (sorted[i] == sorted[j]) return val;
                if (sorted[i] > sorted[j]) ++inv;
            }
        std::sort(sorted.begin(), sorted.end());
        const Rat sgn(signs::pow_m1(inv));
        for (std::size_t g = 0; g < val.size(); ++g) {
            Poly c = w.coeff(sorted, g);
            if (!c.is_zero()) {
                c.scale(sgn);
                val[g] = std::move(c);
            }
        }
        return val;
    };

    for (const auto& [p, _] : degrees) {
        // iterate over strictly increasing (p+1)-tuples
        std::vector<int> J(p + 1);
        for (std::size_t t = 0; t <= p; ++t) J[t] = static_cast<int>(t);
        if (static_cast<int>(p) + 1 > r) continue;
        for (;;) {
            std::vector<Poly> val(w.bundle()->size(), Poly::zero(A.chart));
            // bracket terms
            for (std::size_t a = 0; a + 1 <= p; ++a)
                for (std::size_t b = a + 1; b <= p; ++b) {
                    const Section br =
                        bracket(A, basis_section(A, J[a]), basis_section(A, J[b]));
                    std::vector<int> rest;
                    for (std::size_t t = 0; t <= p; ++t)
                        if (t != a && t != b) rest.push_back(J[t]);
                    const int sgn = signs::koszul_pair(static_cast<long>(a) + 1,
                                                       static_cast<long>(b) + 1);
                    for (int k = 0; k < r; ++k) {
                        if (br[k].is_zero()) continue;
                        std::vector<int> tuple = {k};
                        tuple.insert(tuple.end(), rest.begin(), rest.end());
                        const auto part = eval_basis(tuple);
                        for (std::size_t g = 0; g < val.size(); ++g) {
                            Poly piece = br[k] * part[g];
                            piece.scale(Rat(sgn));
                            val[g] += piece;
                        }
                    }
                }
            // connection terms
            for (std::size_t a = 0; a <= p; ++a) {
                std::vector<int> rest;
                for (std::size_t t = 0; t <= p; ++t)
                    if (t != a) rest.push_back(J[t]);
                const auto inner = eval_basis(rest);
                const auto nv = acon_apply(con, basis_section(A, J[a]), inner);
                const int sgn = signs::koszul_single(static_cast<long>(a) + 1);
                for (std::size_t g = 0; g < val.size(); ++g) {
                    Poly piece = nv[g];
                    piece.scale(Rat(sgn));
                    val[g] += piece;
                }
            }
            for (std::size_t g = 0; g < val.size(); ++g)
                if (!val[g].is_zero()) out.add_term(J, g, val[g]);

            // next increasing tuple
            int t = static_cast<int>(p);
            while (t >= 0 && J[t] == r - 1 - (static_cast<int>(p) - t)) --t;
            if (t < 0) break;
            ++J[t];
            for (std::size_t u = t + 1; u <= p; ++u) J[u] = J[u - 1] + 1;
        }
    }
    return out;
}

// Trivial line bundle connection nabla_alpha = L_{rho(alpha)}; d_koszul with
// it is the algebroid De-Rham operator d_A.
inline AConnection trivial_line_connection(AlgebroidPtr A) {
    auto triv = trivial_bundle(A->chart);
    return zero_aconnection(std::move(A), triv);
}

inline FormElement d_A(const AlgebroidPtr& A, const FormElement& w) {
    return d_koszul(trivial_line_connection(A), w);
}

// Curvature of an A-connection as an End(E)-valued 2-form.
inline FormElement curvature_form(const AConnection& con, const HomBundle& end) {
    const auto& A = *con.A;
    FormElement out(end.bundle, A.rank);
    for (int i = 0; i < A.rank; ++i)
        for (int j = i + 1; j < A.rank; ++j) {
            const Section ei = basis_section(A, i), ej = basis_section(A, j);
            const Section br = bracket(A, ei, ej);
            for (std::size_t g = 0; g < con.target->size(); ++g) {
                std::vector<Poly> v(con.target->size(), Poly::zero(A.chart));
                v[g] = Poly::constant(A.chart, Rat(1));
                auto r1 = acon_apply(con, ei, acon_apply(con, ej, v));
                auto r2 = acon_apply(con, ej, acon_apply(con, ei, v));
                auto r3 = acon_apply(con, br, v);
                for (std::size_t h = 0; h < con.target->size(); ++h) {
                    Poly c = r1[h] - r2[h] - r3[h];
                    if (!c.is_zero()) out.add_term({i, j}, end.index(g, h), std::move(c));
                }
            }
        }
    return out;
}

// Hom(E,F)-connection from connections on E and F.
inline AConnection hom_connection(const AConnection& conE, const AConnection& conF,
                                  const HomBundle& hom) {
    const auto& A = *conE.A;
    auto out = zero_aconnection(conE.A, hom.bundle);
    for (int i = 0; i < A.rank; ++i)
        for (std::size_t s = 0; s < hom.src->size(); ++s)
            for (std::size_t t = 0; t < hom.tgt->size(); ++t) {
                const std::size_t g = hom.index(s, t);
                // (nabla T)(v) = nabla^F(T v) - T(nabla^E v)
                for (std::size_t w = 0; w < hom.tgt->size(); ++w)
                    out.im[i][g][hom.index(s, w)] += conF.im[i][t][w];
                for (std::size_t u = 0; u < hom.src->size(); ++u)
                    out.im[i][g][hom.index(u, t)] -= conE.im[i][u][s];
            }
    return out;
}

// Dual-bundle connection: <nabla* eta, v> = rho(alpha)<eta, v> - <eta, nabla v>.
inline AConnection dual_connection(const AConnection& con, const BundlePtr& dual) {
    const auto& A = *con.A;
    auto out = zero_aconnection(con.A, dual);
    for (int i = 0; i < A.rank; ++i)
        for (std::size_t j = 0; j < dual->size(); ++j)
            for (std::size_t l = 0; l < dual->size(); ++l) out.im[i][j][l] -= con.im[i][l][j];
    return out;
}

// --- basic connections and basic curvature ---

struct AdjointBundles {
    BundlePtr bundle_a;   // A in degree 0
    BundlePtr bundle_tm;  // TM in degree 1
};

inline AdjointBundles adjoint_bundles(const ChartAlgebroid& A) {
    std::vector<std::pair<std::string, int>> ga, gt;
    for (int i = 0; i < A.rank; ++i) ga.push_back({A.frame_name(i), 0});
    for (std::size_t a = 0; a < A.dim(); ++a) gt.push_back({"@" + (*A.chart)[a], 1});
    return {make_bundle(A.chart, ga), make_bundle(A.chart, gt)};
}

/*
** Basic A-connections induced by a TM-connection nabla on A:
**   on A:  nabla^bas_alpha(beta) = nabla_{rho(beta)}(alpha) + [alpha, beta]
**   on TM: nabla^bas_alpha(X)    = rho(nabla_X(alpha)) + [rho(alpha), X]
*/
inline std::pair<AConnection, AConnection> basic_connection(const AlgebroidPtr& A,
                                                            const Connection& con,
                                                            const AdjointBundles& bd) {
    const auto& alg = *A;
    AConnection on_a = zero_aconnection(A, bd.bundle_a);
    AConnection on_tm = zero_aconnection(A, bd.bundle_tm);
    for (int i = 0; i < alg.rank; ++i) {
        const Section ei = basis_section(alg, i);
        for (int j = 0; j < alg.rank; ++j) {
            Section v = con_apply(alg, con, alg.anchor(j), ei);
            const Section br = bracket(alg, ei, basis_section(alg, j));
            for (int k = 0; k < alg.rank; ++k) on_a.im[i][j][k] = v[k] + br[k];
        }
        for (std::size_t a = 0; a < alg.dim(); ++a) {
            // rho(nabla_{d/dx_a} e_i) + [rho(e_i), d/dx_a]
            VecField val = alg.zero_field();
            const Section& gam = con.gamma[a][i];
            for (int k = 0; k < alg.rank; ++k)
                for (std::size_t b = 0; b < alg.dim(); ++b) val[b] += gam[k] * alg.rho[k][b];
            for (std::size_t b = 0; b < alg.dim(); ++b) val[b] -= alg.rho[i][b].partial(a);
            for (std::size_t b = 0; b < alg.dim(); ++b) on_tm.im[i][a][b] = val[b];
        }
    }
    return {std::move(on_a), std::move(on_tm)};
}

/*
** Basic curvature, the five-term tensor in Omega^2(A; Hom(TM, A)):
**  R(a,b)(X) = nabla_X [a,b] - [nabla_X a, b] - [a, nabla_X b]
**              - nabla_{nabla^bas_b X}(a) + nabla_{nabla^bas_a X}(b).
*/
inline Section basic_curvature_eval(const ChartAlgebroid& A, const Connection& con,
                                    const AConnection& bas_tm, const Section& alpha,
                                    const Section& beta, const VecField& X) {
    Section out = con_apply(A, con, X, bracket(A, alpha, beta));
    Section t2 = bracket(A, con_apply(A, con, X, alpha), beta);
    Section t3 = bracket(A, alpha, con_apply(A, con, X, beta));
    // nabla^bas_beta X and nabla^bas_alpha X as vector fields
    std::vector<Poly> xv(X.begin(), X.end());
    auto nbX = acon_apply(bas_tm, beta, xv);
    auto naX = acon_apply(bas_tm, alpha, xv);
    Section t4 = con_apply(A, con, VecField(nbX.begin(), nbX.end()), alpha);
    Section t5 = con_apply(A, con, VecField(naX.begin(), naX.end()), beta);
    for (int k = 0; k < A.rank; ++k) out[k] += -t2[k] - t3[k] - t4[k] + t5[k];
    return out;
}

inline FormElement basic_curvature(const AlgebroidPtr& A, const Connection& con,
                                   const HomBundle& hom_tm_a, const AConnection& bas_tm) {
    const auto& alg = *A;
    FormElement out(hom_tm_a.bundle, alg.rank);
    for (int i = 0; i < alg.rank; ++i)
        for (int j = i + 1; j < alg.rank; ++j)
            for (std::size_t a = 0; a < alg.dim(); ++a) {
                VecField X = alg.zero_field();
                X[a] = Poly::constant(alg.chart, Rat(1));
                Section val = basic_curvature_eval(alg, con, bas_tm, basis_section(alg, i),
                                                   basis_section(alg, j), X);
                for (int k = 0; k < alg.rank; ++k)
                    if (!val[k].is_zero())
                        out.add_term({i, j}, hom_tm_a.index(a, k), val[k]);
            }
    return out;
}

/*
** The three identities of the basic curvature, each expanded on all basis
** tuples:
**   (1) R_{nabla^bas on A}(a,b)(c)    = - R^bas(a,b)(rho(c))
**   (2) R_{nabla^bas on TM}(a,b)(X)   = - rho(R^bas(a,b)(X))
**   (3) d_{nabla^bas}(R^bas)          = 0   in Omega^3(A; Hom(TM, A))
*/
inline std::vector<Check> curvature_identities(const AlgebroidPtr& A, const Connection& con) {
    const auto& alg = *A;
    const auto bd = adjoint_bundles(alg);
    auto [bas_a, bas_tm] = basic_connection(A, con, bd);
    const auto hom = make_hom(bd.bundle_tm, bd.bundle_a);
    const FormElement rbas = basic_curvature(A, con, hom, bas_tm);
    std::vector<Check> out;

    Check c1{"curvature(nabla^bas on A) = -R^bas o rho", true, ""};
    for (int i = 0; i < alg.rank && c1.ok; ++i)
        for (int j = i + 1; j < alg.rank && c1.ok; ++j)
            for (int k = 0; k < alg.rank && c1.ok; ++k) {
                std::vector<Poly> ek(alg.rank, Poly::zero(alg.chart));
                ek[k] = Poly::constant(alg.chart, Rat(1));
                auto r1 = acon_apply(bas_a, basis_section(alg, i),
                                     acon_apply(bas_a, basis_section(alg, j), ek));
                auto r2 = acon_apply(bas_a, basis_section(alg, j),
                                     acon_apply(bas_a, basis_section(alg, i), ek));
                auto r3 = acon_apply(bas_a, bracket(alg, basis_section(alg, i),
                                                    basis_section(alg, j)), ek);
                Section rb = basic_curvature_eval(alg, con, bas_tm, basis_section(alg, i),
                                                  basis_section(alg, j), alg.anchor(k));
                for (int l = 0; l < alg.rank; ++l) {
                    const Poly d = r1[l] - r2[l] - r3[l] + rb[l];
                    if (!d.is_zero()) {
                        c1.ok = false;
                        c1.witness = "(" + alg.frame_name(i) + "," + alg.frame_name(j) + ")(" +
                                     alg.frame_name(k) + "): " + d.str();
                        break;
                    }
                }
            }
    out.push_back(c1);

    Check c2{"curvature(nabla^bas on TM) = -rho o R^bas", true, ""};
    for (int i = 0; i < alg.rank && c2.ok; ++i)
        for (int j = i + 1; j < alg.rank && c2.ok; ++j)
            for (std::size_t a = 0; a < alg.dim() && c2.ok; ++a) {
                std::vector<Poly> xa(alg.dim(), Poly::zero(alg.chart));
                xa[a] = Poly::constant(alg.chart, Rat(1));
                auto r1 = acon_apply(bas_tm, basis_section(alg, i),
                                     acon_apply(bas_tm, basis_section(alg, j), xa));
                auto r2 = acon_apply(bas_tm, basis_section(alg, j),
                                     acon_apply(bas_tm, basis_section(alg, i), xa));
                auto r3 = acon_apply(bas_tm, bracket(alg, basis_section(alg, i),
                                                     basis_section(alg, j)), xa);
                VecField X = alg.zero_field();
                X[a] = Poly::constant(alg.chart, Rat(1));
                VecField rr = anchor_of(alg, basic_curvature_eval(alg, con, bas_tm,
                                                                  basis_section(alg, i),
                                                                  basis_section(alg, j), X));
                for (std::size_t b = 0; b < alg.dim(); ++b) {
                    const Poly d = r1[b] - r2[b] - r3[b] + rr[b];
                    if (!d.is_zero()) {
                        c2.ok = false;
                        c2.witness = "(" + alg.frame_name(i) + "," + alg.frame_name(j) + ")(@" +
                                     (*alg.chart)[a] + "): " + d.str();
                        break;
                    }
                }
            }
    out.push_back(c2);

    Check c3{"d_{nabla^bas}(R^bas) = 0", true, ""};
    const AConnection hom_con = hom_connection(bas_tm, bas_a, hom);
    const FormElement drb = d_koszul(hom_con, rbas);
    if (!drb.is_zero()) {
        c3.ok = false;
        c3.witness = drb.str();
    }
    out.push_back(c3);
    return out;
}

}  // namespace ruth
