#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ruth/graded.hpp"
#include "ruth/linalg.hpp"
#include "ruth/poly.hpp"

namespace ruth {

// Polynomial matrices, row major; used for differentials over the chart.
using PMat = std::vector<std::vector<Poly>>;

inline PMat pmat_zero(VarsPtr vars, std::size_t rows, std::size_t cols) {
    return PMat(rows, std::vector<Poly>(cols, Poly::zero(std::move(vars))));
}

inline PMat pmat_identity(VarsPtr vars, std::size_t n) {
    PMat m = pmat_zero(vars, n, n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = Poly::constant(vars, Rat(1));
    return m;
}

inline PMat pmat_mul(const PMat& a, const PMat& b) {
    if (a.empty() || b.empty()) return {};
    if (a[0].size() != b.size()) throw Error("polynomial matrix product shape mismatch");
    PMat c(a.size(), std::vector<Poly>(b[0].size(), Poly::zero(a[0][0].vars())));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (a[i][k].is_zero()) continue;
            for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

inline PMat pmat_add(PMat a, const PMat& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] += b[i][j];
    return a;
}

inline PMat pmat_transpose(const PMat& a) {
    if (a.empty()) return {};
    PMat t(a[0].size(), std::vector<Poly>(a.size(), Poly::zero(a[0][0].vars())));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

inline bool pmat_is_zero(const PMat& a) {
    for (const auto& row : a)
        for (const auto& v : row)
            if (!v.is_zero()) return false;
    return true;
}

inline bool pmat_is_constant(const PMat& a) {
    for (const auto& row : a)
        for (const auto& v : row)
            if (!v.is_constant()) return false;
    return true;
}

inline Poly pmat_det(const PMat& a) {
    const std::size_t n = a.size();
    if (n == 0) throw Error("determinant of empty matrix");
    VarsPtr vars = a[0][0].vars();
    if (n == 1) return a[0][0];
    Poly det = Poly::zero(vars);
    for (std::size_t j = 0; j < n; ++j) {
        if (a[0][j].is_zero()) continue;
        PMat minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<Poly> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(a[i][k]);
            minor.push_back(std::move(row));
        }
        Poly term = a[0][j] * pmat_det(minor);
        if (j % 2 == 1) term.scale(Rat(-1));
        det += term;
    }
    return det;
}

// Adjugate via cofactors; inverse = adjugate / det when det is a unit.
inline PMat pmat_adjugate(const PMat& a) {
    const std::size_t n = a.size();
    VarsPtr vars = a[0][0].vars();
    if (n == 1) return {{Poly::constant(vars, Rat(1))}};
    PMat adj = pmat_zero(vars, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            PMat minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                std::vector<Poly> row;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != j) row.push_back(a[r][c]);
                minor.push_back(std::move(row));
            }
            Poly cof = pmat_det(minor);
            if ((i + j) % 2 == 1) cof.scale(Rat(-1));
            adj[j][i] = cof;
        }
    return adj;
}

inline QMat pmat_to_qmat(const PMat& a) {
    QMat m(a.size(), a.empty() ? 0 : a[0].size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) m(i, j) = a[i][j].constant_value();
    return m;
}

inline PMat qmat_to_pmat(const QMat& m, const VarsPtr& vars) {
    PMat a = pmat_zero(vars, m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = Poly::constant(vars, m(i, j));
    return a;
}

/*
** Per-degree blocks of a degree-one endomorphism given as a 0-form with
** values in End(E).  blocks[k] maps the generator coordinates of degree k to
** those of degree k+1 (rows indexed by the target generators).
*/
struct GradedBlocks {
    BundlePtr E;
    std::vector<int> degrees;                          // sorted degrees with generators
    std::map<int, std::vector<std::size_t>> basis;     // degree -> generator indices
    std::map<int, PMat> blocks;                        // degree k -> matrix E^k -> E^{k+1}
};

inline GradedBlocks split_degree_one(const HomBundle& end, const FormElement& partial) {
    GradedBlocks out;
    out.E = end.src;
    out.degrees = end.src->degrees_present();
    for (int d : out.degrees) out.basis[d] = end.src->gens_of_degree(d);
    const VarsPtr vars = end.src->chart;
    for (const auto& [key, c] : partial.terms()) {
        if (!key.idx.empty()) throw Error("degree-one map must be a 0-form");
        auto [s, t] = end.pair_of(key.gen);
        if (end.tgt->degree(t) - end.src->degree(s) != 1)
            throw Error("degree-one map has a component of wrong degree shift at " +
                        end.bundle->name(key.gen));
    }
    for (std::size_t di = 0; di < out.degrees.size(); ++di) {
        const int d = out.degrees[di];
        const auto& src = out.basis[d];
        const auto tgt_it = out.basis.find(d + 1);
        const std::vector<std::size_t> tgt =
            tgt_it == out.basis.end() ? std::vector<std::size_t>{} : tgt_it->second;
        PMat m = pmat_zero(vars, tgt.size(), src.size());
        for (std::size_t j = 0; j < src.size(); ++j)
            for (std::size_t i = 0; i < tgt.size(); ++i)
                m[i][j] = partial.coeff({}, end.index(src[j], tgt[i]));
        out.blocks[d] = std::move(m);
    }
    return out;
}

// First basis element on which the square fails, or nullopt if d^2 = 0.
inline std::optional<std::string> complex_check(const HomBundle& end, const FormElement& partial) {
    GradedBlocks b = split_degree_one(end, partial);
    for (int d : b.degrees) {
        auto next = b.blocks.find(d + 1);
        if (next == b.blocks.end() || next->second.empty() || b.blocks[d].empty()) continue;
        PMat sq = pmat_mul(next->second, b.blocks[d]);
        for (std::size_t j = 0; j < sq[0].size(); ++j)
            for (std::size_t i = 0; i < sq.size(); ++i)
                if (!sq[i][j].is_zero()) return end.src->name(b.basis[d][j]);
    }
    return std::nullopt;
}

/*
** Exact Betti numbers of a point-base complex (all coefficients constant).
** Returns (degree, Betti) pairs over the degree span of E.
*/
inline std::vector<std::pair<int, std::size_t>> cohomology_ranks(const HomBundle& end,
                                                                 const FormElement& partial) {
    GradedBlocks b = split_degree_one(end, partial);
    for (const auto& [d, m] : b.blocks)
        if (!pmat_is_constant(m))
            throw Error("cohomology_ranks: unsupported base (non-constant coefficients)");
    if (b.degrees.empty()) return {};
    const int lo = b.degrees.front(), hi = b.degrees.back();
    std::vector<std::size_t> dims;
    std::vector<QMat> diffs;
    for (int d = lo; d <= hi; ++d) {
        auto it = b.basis.find(d);
        dims.push_back(it == b.basis.end() ? 0 : it->second.size());
        if (d < hi) {
            auto bm = b.blocks.find(d);
            if (bm != b.blocks.end()) {
                diffs.push_back(pmat_to_qmat(bm->second));
            } else {
                auto nxt = b.basis.find(d + 1);
                diffs.push_back(QMat(nxt == b.basis.end() ? 0 : nxt->second.size(),
                                     it == b.basis.end() ? 0 : it->second.size()));
            }
        }
    }
    const auto betti = linalg::betti_numbers(dims, diffs);
    std::vector<std::pair<int, std::size_t>> out;
    for (int d = lo; d <= hi; ++d) out.push_back({d, betti[d - lo]});
    return out;
}

/*
** Hodge-style contraction data for a complex with the declared basis taken
** orthonormal: projection p onto the harmonic part, inclusion i, homotopy
** h = -Laplacian^{-1} d^*.  The five side conditions
**   p d = 0,  d i = 0,  i p = Id + h d + d h,  h^2 = 0,  p h = 0
** are verified exactly at construction; for exact complexes h d + d h = -Id.
*/
struct ContractionData {
    BundlePtr E;
    BundlePtr H;  // harmonic (cohomology) bundle; empty when exact
    std::map<int, PMat> h;  // E^k -> E^{k-1}
    std::map<int, PMat> p;  // E^k -> H^k
    std::map<int, PMat> i;  // H^k -> E^k
    bool exact = false;
};

namespace detail {

inline void verify_contraction(const GradedBlocks& b, const ContractionData& cd) {
    const VarsPtr vars = b.E->chart;
    auto block = [&](const std::map<int, PMat>& m, int d, std::size_t rows,
                     std::size_t cols) -> PMat {
        auto it = m.find(d);
        if (it != m.end() && !it->second.empty() && !it->second[0].empty()) return it->second;
        return pmat_zero(vars, rows, cols);
    };
    auto dim = [&](int d) {
        auto it = b.basis.find(d);
        return it == b.basis.end() ? std::size_t{0} : it->second.size();
    };
    auto hdim = [&](int d) {
        std::size_t n = 0;
        for (std::size_t g = 0; g < cd.H->size(); ++g)
            if (cd.H->degree(g) == d) ++n;
        return n;
    };
    // product with explicit shapes so zero-dimensional factors stay sound
    auto mul = [&](const PMat& a, const PMat& c, std::size_t rows, std::size_t inner,
                   std::size_t cols) -> PMat {
        if (rows == 0 || cols == 0 || inner == 0) return pmat_zero(vars, rows, cols);
        return pmat_mul(a, c);
    };
    for (int d : b.degrees) {
        const std::size_t nd = dim(d), ndp = dim(d + 1), ndm = dim(d - 1);
        const PMat D = block(b.blocks, d, ndp, nd);
        const PMat Dm = block(b.blocks, d - 1, nd, ndm);
        const PMat H = block(cd.h, d, ndm, nd);
        const PMat Hp = block(cd.h, d + 1, nd, ndp);
        const PMat Pp = block(cd.p, d + 1, hdim(d + 1), ndp);
        const PMat P = block(cd.p, d, hdim(d), nd);
        const PMat I = block(cd.i, d, nd, hdim(d));
        if (!pmat_is_zero(mul(Pp, D, hdim(d + 1), ndp, nd)))
            throw Error("contraction identity p d = 0 failed");
        if (!pmat_is_zero(mul(D, I, ndp, nd, hdim(d))))
            throw Error("contraction identity d i = 0 failed");
        if (!pmat_is_zero(mul(block(cd.h, d - 1, dim(d - 2), ndm), H, dim(d - 2), ndm, nd)))
            throw Error("contraction identity h^2 = 0 failed");
        if (!pmat_is_zero(mul(block(cd.p, d - 1, hdim(d - 1), ndm), H, hdim(d - 1), ndm, nd)))
            throw Error("contraction identity p h = 0 failed");
        if (nd == 0) continue;
        PMat rhs = pmat_identity(vars, nd);
        rhs = pmat_add(rhs, mul(Hp, D, nd, ndp, nd));
        rhs = pmat_add(rhs, mul(Dm, H, nd, ndm, nd));
        PMat lhs = mul(I, P, nd, hdim(d), nd);
        for (std::size_t r = 0; r < nd; ++r)
            for (std::size_t c = 0; c < nd; ++c)
                if (lhs[r][c] != rhs[r][c])
                    throw Error("contraction identity i p = Id + h d + d h failed");
    }
}

}  // namespace detail

inline ContractionData build_contraction(const HomBundle& end, const FormElement& partial) {
    GradedBlocks b = split_degree_one(end, partial);
    const VarsPtr vars = end.src->chart;
    ContractionData cd;
    cd.E = end.src;

    if (!b.degrees.empty() && !std::all_of(b.blocks.begin(), b.blocks.end(), [](const auto& kv) {
            return pmat_is_constant(kv.second);
        })) {
        // Polynomial differential: only the everywhere-exact case is
        // representable with polynomial entries (Laplacian determinant a
        // nonzero constant).  Otherwise refuse with the offending witness.
        std::map<int, PMat> lap;
        for (int d : b.degrees) {
            const std::size_t nd = b.basis[d].size();
            auto up = b.blocks.find(d);
            auto down = b.blocks.find(d - 1);
            PMat L = pmat_zero(vars, nd, nd);
            if (up != b.blocks.end() && !up->second.empty())
                L = pmat_add(L, pmat_mul(pmat_transpose(up->second), up->second));
            if (down != b.blocks.end() && !down->second.empty() && !down->second[0].empty())
                L = pmat_add(L, pmat_mul(down->second, pmat_transpose(down->second)));
            Poly det = nd == 0 ? Poly::constant(vars, Rat(1)) : pmat_det(L);
            if (!det.is_constant() || det.is_zero())
                throw Error("complex is not regular over the whole chart: Laplacian determinant " +
                            det.str() + " in degree " + std::to_string(d) + " vanishes somewhere");
            lap[d] = std::move(L);
        }
        cd.H = make_bundle(vars, {});
        cd.exact = true;
        for (int d : b.degrees) {
            auto down = b.blocks.find(d - 1);
            if (down == b.blocks.end() || down->second.empty() || down->second[0].empty()) {
                cd.h[d] = pmat_zero(vars, b.basis.count(d - 1) ? b.basis[d - 1].size() : 0,
                                    b.basis[d].size());
                continue;
            }
            // h = -Laplacian^{-1} d^* on degree d, inverse via adjugate/det
            const PMat& L = lap[d - 1];
            const Rat det = pmat_det(L).constant_value();
            PMat inv = pmat_adjugate(L);
            for (auto& row : inv)
                for (auto& v : row) v.scale(Rat(1) / det);
            PMat h = pmat_mul(inv, pmat_transpose(down->second));
            for (auto& row : h)
                for (auto& v : row) v.scale(Rat(-1));
            cd.h[d] = std::move(h);
            cd.p[d] = pmat_zero(vars, 0, b.basis[d].size());
            cd.i[d] = pmat_zero(vars, b.basis[d].size(), 0);
        }
        detail::verify_contraction(b, cd);
        return cd;
    }

    // Constant coefficients: full Hodge decomposition over Q.
    std::map<int, QMat> D;
    for (const auto& [d, m] : b.blocks) D[d] = pmat_to_qmat(m);
    std::map<int, QMat> lap;
    std::map<int, std::vector<std::vector<Rat>>> harmonic;
    std::vector<std::pair<std::string, int>> hgens;
    for (int d : b.degrees) {
        const std::size_t nd = b.basis[d].size();
        QMat L(nd, nd);
        if (D.count(d) && D[d].rows() > 0) L = L + D[d].transpose() * D[d];
        if (D.count(d - 1) && D[d - 1].cols() > 0 && D[d - 1].rows() == nd)
            L = L + D[d - 1] * D[d - 1].transpose();
        lap[d] = L;
        harmonic[d] = linalg::kernel_basis(L);
        for (std::size_t k = 0; k < harmonic[d].size(); ++k)
            hgens.push_back({"H" + std::to_string(d) + "_" + std::to_string(k + 1), d});
    }
    cd.H = make_bundle(vars, hgens);
    cd.exact = cd.H->size() == 0;

    for (int d : b.degrees) {
        const std::size_t nd = b.basis[d].size();
        const auto& K = harmonic[d];
        // i: kernel vectors as columns
        QMat I(nd, K.size());
        for (std::size_t c = 0; c < K.size(); ++c)
            for (std::size_t r = 0; r < nd; ++r) I(r, c) = K[c][r];
        // p = (K^T K)^{-1} K^T  (orthogonal projection in coordinates)
        QMat P(K.size(), nd);
        if (!K.empty()) {
            QMat G = I.transpose() * I;
            QMat Kt = I.transpose();
            for (std::size_t col = 0; col < nd; ++col) {
                std::vector<Rat> rhs(K.size());
                for (std::size_t r = 0; r < K.size(); ++r) rhs[r] = Kt(r, col);
                auto x = linalg::solve(G, rhs);
                if (!x) throw Error("Gram matrix not invertible");
                for (std::size_t r = 0; r < K.size(); ++r) P(r, col) = (*x)[r];
            }
        }
        cd.p[d] = qmat_to_pmat(P, vars);
        cd.i[d] = qmat_to_pmat(I, vars);

        // h = -diamond^{-1} d^* : solve Lap x = d^* v with x orthogonal to the
        // harmonic space (x in the image of the Laplacian), column by column.
        const std::size_t nmd = b.basis.count(d - 1) ? b.basis[d - 1].size() : 0;
        QMat h(nmd, nd);
        if (nmd > 0 && D.count(d - 1) && D[d - 1].rows() == nd) {
            const QMat Dst = D[d - 1].transpose();  // E^d -> E^{d-1}
            const QMat& L = lap[d - 1];
            const auto& Km = harmonic[d - 1];
            for (std::size_t col = 0; col < nd; ++col) {
                std::vector<Rat> bvec(nmd);
                for (std::size_t r = 0; r < nmd; ++r) bvec[r] = Dst(r, col);
                auto x = linalg::solve(L, bvec);
                if (!x) throw Error("Laplacian solve failed (d^* v not in its image)");
                // remove the harmonic component of the particular solution
                if (!Km.empty()) {
                    QMat Ik(nmd, Km.size());
                    for (std::size_t c = 0; c < Km.size(); ++c)
                        for (std::size_t r = 0; r < nmd; ++r) Ik(r, c) = Km[c][r];
                    QMat G = Ik.transpose() * Ik;
                    auto proj = linalg::solve(G, Ik.transpose().apply(*x));
                    if (!proj) throw Error("Gram matrix not invertible");
                    std::vector<Rat> corr = Ik.apply(*proj);
                    for (std::size_t r = 0; r < nmd; ++r) (*x)[r] -= corr[r];
                }
                for (std::size_t r = 0; r < nmd; ++r) h(r, col) = -(*x)[r];
            }
        }
        cd.h[d] = qmat_to_pmat(h, vars);
    }
    detail::verify_contraction(b, cd);
    return cd;
}

}  // namespace ruth
