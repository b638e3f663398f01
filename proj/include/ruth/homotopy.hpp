#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ruth/complexes.hpp"
#include "ruth/rep.hpp"

namespace ruth {

// Full |E| x |E| matrix of a 0-form degree-shift map from per-degree blocks.
inline PMat contraction_h_matrix(const ContractionData& cd) {
    const std::size_t n = cd.E->size();
    PMat m = pmat_zero(cd.E->chart, n, n);
    for (const auto& [d, blk] : cd.h) {
        auto src = cd.E->gens_of_degree(d);
        auto tgt = cd.E->gens_of_degree(d - 1);
        for (std::size_t j = 0; j < src.size(); ++j)
            for (std::size_t i = 0; i < tgt.size(); ++i)
                if (i < blk.size() && j < (blk.empty() ? 0 : blk[0].size()))
                    m[tgt[i]][src[j]] = blk[i][j];
    }
    return m;
}

// h as a 0-form with values in End^{-1}(E).
inline FormElement contraction_h_form(const ContractionData& cd, const HomBundle& end, int rank) {
    PMat m = contraction_h_matrix(cd);
    FormElement f(end.bundle, rank);
    for (std::size_t s = 0; s < cd.E->size(); ++s)
        for (std::size_t t = 0; t < cd.E->size(); ++t)
            f.add_term({}, end.index(s, t), m[t][s]);
    return f;
}

inline PMat endform_matrix(const HomBundle& end, const FormElement& f,
                           const std::vector<int>& tuple) {
    const std::size_t n = end.src->size();
    PMat m = pmat_zero(end.src->chart, n, n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) m[t][s] = f.coeff(tuple, end.index(s, t));
    return m;
}

inline PMat partial_matrix(const Ruth& R) { return endform_matrix(R.end, R.partial, {}); }

/*
** Compatible connection on an exact complex, built from the contraction
** homotopy: with the projections p1 = -dh, p2 = -hd (p1 + p2 = Id),
**   nabla := d o nabla0 o (-h) + p2 o nabla0 o p2
** is a connection and commutes with d (nabla0 the coordinate derivative in
** the given frame).
*/
inline AConnection transported_connection(const AlgebroidPtr& A, const BundlePtr& E,
                                          const FormElement& partial,
                                          const ContractionData& cd) {
    const HomBundle end = make_end(E);
    const PMat D = endform_matrix(end, partial, {});
    const PMat H = contraction_h_matrix(cd);
    const std::size_t n = E->size();
    const VarsPtr chart = A->chart;
    PMat P2 = pmat_mul(H, D);
    for (auto& row : P2)
        for (auto& v : row) v.scale(Rat(-1));

    AConnection out = zero_aconnection(A, E);
    for (int i = 0; i < A->rank; ++i) {
        const Section ei = basis_section(*A, i);
        for (std::size_t g = 0; g < n; ++g) {
            // column vectors -h(g) and p2(g), coordinate-differentiated
            std::vector<Poly> hg(n, Poly::zero(chart)), p2g(n, Poly::zero(chart));
            for (std::size_t t = 0; t < n; ++t) {
                hg[t] = -H[t][g];
                p2g[t] = P2[t][g];
            }
            for (auto& v : hg) v = anchor_apply(*A, ei, v);
            for (auto& v : p2g) v = anchor_apply(*A, ei, v);
            for (std::size_t t = 0; t < n; ++t) {
                Poly acc = Poly::zero(chart);
                for (std::size_t u = 0; u < n; ++u) {
                    acc += D[t][u] * hg[u];
                    acc += P2[t][u] * p2g[u];
                }
                out.im[i][g][t] = std::move(acc);
            }
        }
    }
    return out;
}

struct ExactRepData {
    Ruth rep;
    ContractionData cd;
};

/*
** Representation up to homotopy structure on an exact complex:
**   omega_n = h o d_nabla(h)^{n-2} o R_nabla
** (wedge compositions in Omega(A; End E)); the connection is transported when
** none is supplied.  Refuses non-exact complexes.
*/
inline ExactRepData exact_rep(const AlgebroidPtr& A, const BundlePtr& E,
                              const FormElement& partial,
                              std::optional<AConnection> nabla = std::nullopt) {
    const HomBundle end = make_end(E);
    ContractionData cd = build_contraction(end, partial);
    if (!cd.exact) throw Error("exact_rep: complex is not exact");
    AConnection con = nabla ? *nabla : transported_connection(A, E, partial, cd);

    const int r = A->rank;
    const FormElement hform = contraction_h_form(cd, end, r);
    const AConnection endcon = hom_connection(con, con, end);
    const FormElement dh = d_koszul(endcon, hform);
    const FormElement R = curvature_form(con, end);

    std::map<int, FormElement> omega;
    const auto degs = E->degrees_present();
    const int length = degs.empty() ? 0 : degs.back() - degs.front();
    for (int n = 2; n <= std::min(r, length + 1); ++n) {
        FormElement w = R;
        for (int k = 0; k < n - 2; ++k) w = wedge_comp(end, end, end, dh, w);
        w = wedge_comp(end, end, end, hform, w);
        if (!w.is_zero()) omega.emplace(n, std::move(w));
    }
    Ruth rep = make_ruth(A, E, partial, std::move(con), std::move(omega));
    return ExactRepData{std::move(rep), std::move(cd)};
}

/*
** Gauge isomorphism between two structures D, D' on the same exact complex:
** solves D^Hom(T) = D - D' degree by degree with the contraction homotopy,
** so that (Id + T) D = D' (Id + T).  T is strictly form-positive, hence
** Id + T invertible.
*/
inline RuthMorphism exact_iso(const Ruth& R, const Ruth& R2, const ContractionData& cd) {
    if (R.E != R2.E && R.E->gens != R2.E->gens)
        throw Error("exact_iso: structures live on different bundles");
    if (R.partial != R2.partial) throw Error("exact_iso: structures have different differentials");
    const int r = R.A->rank;
    const HomBundle& end = R.end;
    const VarsPtr chart = R.A->chart;
    const std::size_t n = R.E->size();
    const PMat D = partial_matrix(R);
    const PMat H = contraction_h_matrix(cd);

    // xi = D - D' by form degree
    std::map<int, FormElement> xi;
    {
        FormElement x1(end.bundle, r);
        for (int i = 0; i < r; ++i)
            for (std::size_t g = 0; g < n; ++g)
                for (std::size_t t = 0; t < n; ++t) {
                    Poly dif = R.nabla.im[i][g][t] - R2.nabla.im[i][g][t];
                    if (!dif.is_zero()) x1.add_term({i}, end.index(g, t), std::move(dif));
                }
        if (!x1.is_zero()) xi.emplace(1, std::move(x1));
        for (int p = 2; p <= r; ++p) {
            FormElement d = R.omega_or_zero(p) - R2.omega_or_zero(p);
            if (!d.is_zero()) xi.emplace(p, std::move(d));
        }
    }

    const AConnection hom_con = hom_connection(R.nabla, R2.nabla, end);
    auto tuples_of = [&](int p) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur;
        std::function<void(int)> rec = [&](int start) {
            if (static_cast<int>(cur.size()) == p) {
                out.push_back(cur);
                return;
            }
            for (int g = start; g < r; ++g) {
                cur.push_back(g);
                rec(g + 1);
                cur.pop_back();
            }
        };
        rec(0);
        return out;
    };
    auto d_pt = [&](const PMat& s, int k) {
        // pointwise Hom differential on a degree-k map
        PMat a = pmat_mul(D, s);
        PMat b = pmat_mul(s, D);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                a[x][y] -= Rat(signs::pow_m1(k)) * b[x][y];
        return a;
    };

    std::map<int, FormElement> T;
    auto t_or_zero = [&](int p) {
        auto it = T.find(p);
        return it == T.end() ? FormElement(end.bundle, r) : it->second;
    };
    for (int nn = 1; nn <= r; ++nn) {
        FormElement y = xi.count(nn) ? xi[nn] : FormElement(end.bundle, r);
        if (nn >= 2) y -= d_koszul(hom_con, t_or_zero(nn - 1));
        for (int p = 2; p <= nn - 1; ++p) {
            y -= wedge_comp(end, end, end, R2.omega_or_zero(p), t_or_zero(nn - p));
            y += wedge_comp(end, end, end, t_or_zero(nn - p), R.omega_or_zero(p));
        }
        FormElement tn(end.bundle, r);
        for (const auto& I : tuples_of(nn)) {
            PMat yI = endform_matrix(end, y, I);
            if (pmat_is_zero(yI)) continue;
            if (!pmat_is_zero(d_pt(yI, 1 - nn)))
                throw Error("exact_iso: obstruction is not closed in form degree " +
                            std::to_string(nn));
            // t = -(-1)^n h o y
            PMat t = pmat_mul(H, yI);
            for (auto& row : t)
                for (auto& v : row) v.scale(Rat(-signs::pow_m1(nn)));
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t tt = 0; tt < n; ++tt)
                    if (!t[tt][s].is_zero()) tn.add_term(I, end.index(s, tt), t[tt][s]);
        }
        if (!tn.is_zero()) T.emplace(nn, std::move(tn));
    }

    // package as the morphism Id + T and verify nothing is left over
    std::map<int, FormElement> phi;
    FormElement id(end.bundle, r);
    for (std::size_t g = 0; g < n; ++g)
        id.add_term({}, end.index(g, g), Poly::constant(chart, Rat(1)));
    phi.emplace(0, std::move(id));
    for (auto& [p, f] : T) phi.emplace(p, std::move(f));
    RuthMorphism m{end, std::move(phi)};
    auto checks = check_morphism(R, R2, m);
    for (const auto& c : checks)
        if (!c.ok) throw Error("exact_iso: residual obstruction in " + c.name + ": " + c.witness);
    return m;
}

// --- homological perturbation transfer ---

struct TransferData {
    Ruth rep;          // structure on the cohomology bundle
    RuthMorphism phi;  // chain map (Omega(A;E), D) -> (Omega(A;H), D_H)
};

/*
** Transfer along contraction data (constant-coefficient complex):
**   D_H = p (1 + (delta h) + (delta h)^2 + ...) delta i,
**   Phi = p (1 + delta h + (delta h)^2 + ...),
** delta = D - partial.  The geometric series terminates because delta h
** raises the form degree.
*/
inline TransferData transfer(const Ruth& R, const ContractionData& cd) {
    const int r = R.A->rank;
    const HomBundle& end = R.end;
    const BundlePtr H = cd.H;
    const HomBundle hom_eh = make_hom(R.E, H);
    const HomBundle hom_he = make_hom(H, R.E);

    // p, i, h as 0-forms
    FormElement pform(hom_eh.bundle, r), iform(hom_he.bundle, r);
    for (const auto& [d, blk] : cd.p) {
        auto src = R.E->gens_of_degree(d);
        std::vector<std::size_t> hgens;
        for (std::size_t g = 0; g < H->size(); ++g)
            if (H->degree(g) == d) hgens.push_back(g);
        for (std::size_t j = 0; j < src.size(); ++j)
            for (std::size_t i2 = 0; i2 < hgens.size(); ++i2)
                if (i2 < blk.size())
                    pform.add_term({}, hom_eh.index(src[j], hgens[i2]), blk[i2][j]);
    }
    for (const auto& [d, blk] : cd.i) {
        auto tgt = R.E->gens_of_degree(d);
        std::vector<std::size_t> hgens;
        for (std::size_t g = 0; g < H->size(); ++g)
            if (H->degree(g) == d) hgens.push_back(g);
        for (std::size_t j = 0; j < hgens.size(); ++j)
            for (std::size_t i2 = 0; i2 < tgt.size(); ++i2)
                if (i2 < blk.size() && j < (blk.empty() ? 0 : blk[0].size()))
                    iform.add_term({}, hom_he.index(hgens[j], tgt[i2]), blk[i2][j]);
    }
    const FormElement hform = contraction_h_form(cd, end, r);

    auto delta = [&](const FormElement& eta) {
        FormElement out = apply_D(R, eta);
        out -= wedge_ev(end, R.partial, eta);
        return out;
    };
    auto series = [&](FormElement acc) {
        // acc + delta(h acc) + delta(h delta(h acc)) + ...
        FormElement total = acc;
        for (int guard = 0; guard <= r + 2; ++guard) {
            acc = delta(wedge_ev(end, hform, acc));
            if (acc.is_zero()) return total;
            total += acc;
        }
        throw Error("transfer: perturbation series failed to terminate");
    };

    // D_H extracted from its values on the generators of H
    HomBundle endH = make_end(H);
    FormElement nh_partial(endH.bundle, r);
    AConnection nh = zero_aconnection(R.A, H);
    std::map<int, FormElement> omegaH;
    for (std::size_t g = 0; g < H->size(); ++g) {
        std::vector<Poly> unit(H->size(), Poly::zero(R.A->chart));
        unit[g] = Poly::constant(R.A->chart, Rat(1));
        FormElement hsec = FormElement::section(H, r, unit);
        FormElement v = wedge_ev(hom_he, iform, hsec);
        FormElement total = series(delta(v));
        FormElement dh = wedge_ev(hom_eh, pform, total);
        for (const auto& [k, c] : dh.terms()) {
            const int p = static_cast<int>(k.idx.size());
            if (p == 0) {
                nh_partial.add_term({}, endH.index(g, k.gen), c);
            } else if (p == 1) {
                nh.im[k.idx[0]][g][k.gen] += c;
            } else {
                auto it = omegaH.find(p);
                if (it == omegaH.end()) it = omegaH.emplace(p, FormElement(endH.bundle, r)).first;
                it->second.add_term(k.idx, endH.index(g, k.gen), c);
            }
        }
    }
    Ruth repH = make_ruth(R.A, H, std::move(nh_partial), std::move(nh), std::move(omegaH));

    // Phi extracted from its values on the generators of E
    std::map<int, FormElement> phi;
    for (std::size_t g = 0; g < R.E->size(); ++g) {
        std::vector<Poly> unit(R.E->size(), Poly::zero(R.A->chart));
        unit[g] = Poly::constant(R.A->chart, Rat(1));
        FormElement total = series(FormElement::section(R.E, r, unit));
        FormElement ph = wedge_ev(hom_eh, pform, total);
        for (const auto& [k, c] : ph.terms()) {
            const int p = static_cast<int>(k.idx.size());
            auto it = phi.find(p);
            if (it == phi.end()) it = phi.emplace(p, FormElement(hom_eh.bundle, r)).first;
            it->second.add_term(k.idx, hom_eh.index(g, k.gen), c);
        }
    }
    for (auto it = phi.begin(); it != phi.end();)
        it = it->second.is_zero() ? phi.erase(it) : std::next(it);
    RuthMorphism m{hom_eh, std::move(phi)};
    return TransferData{std::move(repH), std::move(m)};
}

// --- the six-term long exact sequence of a length-one regular representation ---

namespace detail {

// kernel / image / chosen class representatives of a complex, per degree
struct CohoData {
    std::vector<QMat> ker, im, reps;
    std::vector<std::size_t> betti;
};

inline QMat cols_to_mat(const std::vector<std::vector<Rat>>& cols, std::size_t rows) {
    QMat m(rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
    return m;
}

inline CohoData cohomology_data(const std::vector<std::size_t>& dims,
                                const std::vector<QMat>& d) {
    CohoData out;
    for (std::size_t n = 0; n < dims.size(); ++n) {
        // kernel of the outgoing differential
        QMat ker(dims[n], 0);
        if (n < d.size() && d[n].rows() > 0) {
            ker = cols_to_mat(linalg::kernel_basis(d[n]), dims[n]);
        } else {
            ker = QMat::identity(dims[n]);
        }
        // image of the incoming differential
        QMat im(dims[n], 0);
        if (n > 0 && n - 1 < d.size() && d[n - 1].cols() > 0) {
            std::vector<std::vector<Rat>> cols;
            for (std::size_t c = 0; c < d[n - 1].cols(); ++c) {
                std::vector<Rat> v(dims[n]);
                for (std::size_t r = 0; r < dims[n]; ++r) v[r] = d[n - 1](r, c);
                cols.push_back(std::move(v));
            }
            // reduce to an independent set
            QMat probe(dims[n], 0);
            std::vector<std::vector<Rat>> keep;
            for (const auto& v : cols) {
                QMat test(dims[n], keep.size() + 1);
                for (std::size_t c = 0; c < keep.size(); ++c)
                    for (std::size_t r = 0; r < dims[n]; ++r) test(r, c) = keep[c][r];
                for (std::size_t r = 0; r < dims[n]; ++r) test(r, keep.size()) = v[r];
                if (linalg::rank(test) == keep.size() + 1) keep.push_back(v);
            }
            im = cols_to_mat(keep, dims[n]);
        }
        // representatives: kernel columns extending the image to a basis
        std::vector<std::vector<Rat>> reps;
        std::size_t cur_rank = linalg::rank(im);
        for (std::size_t c = 0; c < ker.cols(); ++c) {
            QMat test(dims[n], im.cols() + reps.size() + 1);
            for (std::size_t cc = 0; cc < im.cols(); ++cc)
                for (std::size_t r = 0; r < dims[n]; ++r) test(r, cc) = im(r, cc);
            for (std::size_t cc = 0; cc < reps.size(); ++cc)
                for (std::size_t r = 0; r < dims[n]; ++r) test(r, im.cols() + cc) = reps[cc][r];
            for (std::size_t r = 0; r < dims[n]; ++r)
                test(r, im.cols() + reps.size()) = ker(r, c);
            if (linalg::rank(test) == cur_rank + reps.size() + 1) {
                std::vector<Rat> v(dims[n]);
                for (std::size_t r = 0; r < dims[n]; ++r) v[r] = ker(r, c);
                reps.push_back(std::move(v));
            }
        }
        out.ker.push_back(ker);
        out.im.push_back(im);
        out.reps.push_back(cols_to_mat(reps, dims[n]));
        out.betti.push_back(reps.size());
    }
    return out;
}

/*
** Induced map on cohomology classes of a chain map F: C1^p -> C2^q.
** Fails (nullopt) when F does not descend, which doubles as the chain-map
** verification.
*/
inline std::optional<QMat> induced_map(const CohoData& c1, std::size_t p, const CohoData& c2,
                                       std::size_t q, const QMat& F) {
    const QMat& reps1 = c1.reps[p];
    const QMat& reps2 = c2.reps[q];
    const QMat& im2 = c2.im[q];
    QMat out(reps2.cols(), reps1.cols());
    for (std::size_t c = 0; c < reps1.cols(); ++c) {
        std::vector<Rat> v(reps1.rows());
        for (std::size_t r = 0; r < reps1.rows(); ++r) v[r] = reps1(r, c);
        std::vector<Rat> w = F.apply(v);
        // solve [reps2 | im2] x = w
        QMat sys(F.rows(), reps2.cols() + im2.cols());
        for (std::size_t cc = 0; cc < reps2.cols(); ++cc)
            for (std::size_t r = 0; r < F.rows(); ++r) sys(r, cc) = reps2(r, cc);
        for (std::size_t cc = 0; cc < im2.cols(); ++cc)
            for (std::size_t r = 0; r < F.rows(); ++r) sys(r, reps2.cols() + cc) = im2(r, cc);
        auto x = linalg::solve(sys, w);
        if (!x) return std::nullopt;
        for (std::size_t r = 0; r < reps2.cols(); ++r) out(r, c) = (*x)[r];
    }
    return out;
}

}  // namespace detail

struct LesReport {
    std::vector<Check> checks;
    int nodes_checked = 0;
};

/*
** Corollary-level six-term exactness: for a length-one regular
** representation at point base with cohomology bundles H0 and H1,
**   ... -> H^n(A;H0) -> H^n(A;E) -> H^{n-1}(A;H1) -> H^{n+1}(A;H0) -> ...
** with the natural inclusion, the projection, and the connecting map given
** by the wedge product with p omega_2 i.  Exactness at every node is checked
** by rank arithmetic on explicitly computed induced maps.
*/
inline LesReport les_check(const Ruth& R) {
    LesReport out;
    const auto degs = R.E->degrees_present();
    if (R.A->dim() != 0) throw Error("les_check requires a point base");
    if (degs.empty() || degs.front() != 0 || degs.back() > 1)
        throw Error("les_check requires a length-one bundle in degrees 0 and 1");
    const int r = R.A->rank;

    ContractionData cd = build_contraction(R.end, R.partial);
    const auto h0_gens = [&] {
        std::vector<std::size_t> v;
        for (std::size_t g = 0; g < cd.H->size(); ++g)
            if (cd.H->degree(g) == 0) v.push_back(g);
        return v;
    }();
    const auto h1_gens = [&] {
        std::vector<std::size_t> v;
        for (std::size_t g = 0; g < cd.H->size(); ++g)
            if (cd.H->degree(g) == 1) v.push_back(g);
        return v;
    }();
    const auto e0 = R.E->gens_of_degree(0);
    const auto e1 = R.E->gens_of_degree(1);

    const QMat i0 = pmat_to_qmat(cd.i[0]);  // H0 -> E0 coordinates
    const QMat p1 = pmat_to_qmat(cd.p[1]);  // E1 -> H1
    const QMat p0 = pmat_to_qmat(cd.p[0]);
    const QMat i1 = pmat_to_qmat(cd.i[1]);

    // induced flat representations on H0 and H1 (both placed in degree 0)
    auto induced_rep = [&](const QMat& p, const QMat& i,
                           const std::vector<std::size_t>& egens, const std::string& tag) {
        std::vector<std::pair<std::string, int>> gens;
        for (std::size_t k = 0; k < p.rows(); ++k)
            gens.push_back({tag + std::to_string(k + 1), 0});
        BundlePtr B = make_bundle(R.A->chart, gens);
        AConnection con = zero_aconnection(R.A, B);
        for (int a = 0; a < r; ++a) {
            QMat nab(egens.size(), egens.size());
            for (std::size_t g = 0; g < egens.size(); ++g)
                for (std::size_t h = 0; h < egens.size(); ++h)
                    nab(h, g) = R.nabla.im[a][egens[g]][egens[h]].constant_value();
            QMat bar = p * nab * i;
            for (std::size_t g = 0; g < p.rows(); ++g)
                for (std::size_t h = 0; h < p.rows(); ++h)
                    con.im[a][g][h] = Poly::constant(R.A->chart, bar(h, g));
        }
        return make_ruth(R.A, B, FormElement(make_end(B).bundle, r), std::move(con), {});
    };
    Ruth RH0 = induced_rep(p0, i0, e0, "h0_");
    Ruth RH1 = induced_rep(p1, i1, e1, "h1_");
    out.checks.push_back({"induced representation on H0 is flat", all_ok(check_structure(RH0)),
                          ""});
    out.checks.push_back({"induced representation on H1 is flat", all_ok(check_structure(RH1)),
                          ""});

    TotalComplex CE = total_complex(R);
    TotalComplex C0 = total_complex(RH0);
    TotalComplex C1 = total_complex(RH1);
    auto dims_of = [](const TotalComplex& t) {
        std::vector<std::size_t> d;
        for (const auto& b : t.basis) d.push_back(b.size());
        return d;
    };
    detail::CohoData HE = detail::cohomology_data(dims_of(CE), CE.d);
    detail::CohoData H0 = detail::cohomology_data(dims_of(C0), C0.d);
    detail::CohoData H1 = detail::cohomology_data(dims_of(C1), C1.d);

    auto index_in = [](const TotalComplex& t, int deg, const FormKey& k) -> long {
        const std::size_t n = static_cast<std::size_t>(deg - t.degrees.front());
        if (deg < t.degrees.front() || n >= t.basis.size()) return -1;
        for (std::size_t i = 0; i < t.basis[n].size(); ++i)
            if (t.basis[n][i] == k) return static_cast<long>(i);
        return -1;
    };

    // iota: C0^n -> CE^n via the inclusion i0
    auto iota_mat = [&](int n) {
        QMat m(CE.basis[n].size(), C0.basis[n].size());
        for (std::size_t c = 0; c < C0.basis[n].size(); ++c) {
            const FormKey& k = C0.basis[n][c];
            for (std::size_t eg = 0; eg < e0.size(); ++eg) {
                const Rat v = i0(eg, k.gen);
                if (v.is_zero()) continue;
                long row = index_in(CE, n, FormKey{k.idx, e0[eg]});
                if (row >= 0) m(row, c) += v;
            }
        }
        return m;
    };
    // pi: CE^n -> C1^{n-1} via the projection p1 on the degree-one part
    auto pi_mat = [&](int n) {
        QMat m(n - 1 >= 0 ? C1.basis[n - 1].size() : 0, CE.basis[n].size());
        if (n - 1 < 0) return m;
        for (std::size_t c = 0; c < CE.basis[n].size(); ++c) {
            const FormKey& k = CE.basis[n][c];
            for (std::size_t eg = 0; eg < e1.size(); ++eg) {
                if (e1[eg] != k.gen) continue;
                for (std::size_t hg = 0; hg < h1_gens.size(); ++hg) {
                    const Rat v = p1(hg, eg);
                    if (v.is_zero()) continue;
                    long row = index_in(C1, n - 1, FormKey{k.idx, hg});
                    if (row >= 0) m(row, c) += v;
                }
            }
        }
        return m;
    };
    // connecting map: C1^{n-1} -> C0^{n+1}, wedge with p0 omega_2 i1
    HomBundle hom10 = make_hom(RH1.E, RH0.E);
    FormElement omega_bar(hom10.bundle, r);
    {
        const FormElement om2 = R.omega_or_zero(2);
        for (const auto& [k, c] : om2.terms()) {
            auto [s, t] = R.end.pair_of(k.gen);
            // s must be a degree-1 generator, t degree-0
            for (std::size_t s1 = 0; s1 < e1.size(); ++s1) {
                if (e1[s1] != s) continue;
                for (std::size_t t0 = 0; t0 < e0.size(); ++t0) {
                    if (e0[t0] != t) continue;
                    for (std::size_t hg = 0; hg < h1_gens.size(); ++hg)
                        for (std::size_t kg = 0; kg < h0_gens.size(); ++kg) {
                            Rat v = c.constant_value() * i1(s1, hg) * p0(kg, t0);
                            if (!v.is_zero())
                                omega_bar.add_term(k.idx, hom10.index(hg, kg),
                                                   Poly::constant(R.A->chart, v));
                        }
                }
            }
        }
    }
    auto conn_mat = [&](int n1) {  // degree n1 in C1 -> degree n1 + 2 in C0
        QMat m(n1 + 2 < static_cast<int>(C0.basis.size()) ? C0.basis[n1 + 2].size() : 0,
               C1.basis[n1].size());
        if (n1 + 2 >= static_cast<int>(C0.basis.size())) return m;
        for (std::size_t c = 0; c < C1.basis[n1].size(); ++c) {
            const FormKey& k = C1.basis[n1][c];
            FormElement b = FormElement::single(RH1.E, r, k.idx, k.gen,
                                                Poly::constant(R.A->chart, Rat(1)));
            FormElement w = wedge_ev(hom10, omega_bar, b);
            for (const auto& [kk, cc] : w.terms()) {
                long row = index_in(C0, n1 + 2, kk);
                if (row < 0) throw Error("les_check: bookkeeping error");
                m(row, c) += cc.constant_value();
            }
        }
        return m;
    };

    // induced maps on cohomology for every degree, then exactness node by node
    const int top = static_cast<int>(CE.basis.size()) - 1;
    struct Node {
        std::string name;
        QMat in, outm;
        std::size_t dim;
    };
    std::vector<Node> nodes;
    Check welldef{"all three maps descend to cohomology", true, ""};
    auto get = [&](std::optional<QMat> m, const std::string& what) {
        if (!m) {
            welldef.ok = false;
            welldef.witness = what + " does not descend";
            return QMat();
        }
        return *m;
    };
    // flattened sequence: ... H^n(H0) -> H^n(E) -> H^{n-1}(H1) -> H^{n+1}(H0) ...
    std::map<int, QMat> iota_h, pi_h, conn_h;
    for (int n = 0; n <= top; ++n) {
        if (n < static_cast<int>(C0.basis.size()))
            iota_h[n] = get(detail::induced_map(H0, n, HE, n, iota_mat(n)), "iota");
        if (n >= 1)
            pi_h[n] = get(detail::induced_map(HE, n, H1, n - 1, pi_mat(n)), "pi");
        if (n < static_cast<int>(C1.basis.size()) && n + 2 < static_cast<int>(C0.basis.size()))
            conn_h[n] = get(detail::induced_map(H1, n, H0, n + 2, conn_mat(n)), "connecting");
    }
    out.checks.push_back(welldef);
    if (!welldef.ok) return out;

    auto node_check = [&](const std::string& name, const QMat& fin, const QMat& fout,
                          std::size_t dim) {
        Check c{name, true, ""};
        if (fin.cols() > 0 && fout.rows() > 0 && fin.rows() > 0 && fout.cols() > 0) {
            if (!(fout * fin).is_zero()) {
                c.ok = false;
                c.witness = "composite is nonzero";
            }
        }
        const std::size_t rin = fin.cols() == 0 ? 0 : linalg::rank(fin);
        const std::size_t rout = fout.cols() == 0 ? 0 : linalg::rank(fout);
        if (rin + rout != dim) {
            c.ok = false;
            c.witness = "rank(in) + rank(out) = " + std::to_string(rin) + " + " +
                        std::to_string(rout) + " != dim " + std::to_string(dim);
        }
        out.checks.push_back(c);
        ++out.nodes_checked;
    };

    for (int n = 0; n <= top; ++n) {
        const QMat zero;
        // node H^n(A; H0): in = connecting from H^{n-2}(H1), out = iota
        if (n < static_cast<int>(C0.basis.size()))
            node_check("exact at H^" + std::to_string(n) + "(A;H0)",
                       n >= 2 && conn_h.count(n - 2) ? conn_h[n - 2] : zero,
                       iota_h.count(n) ? iota_h[n] : zero, H0.betti[n]);
        // node H^n(A; E): in = iota, out = pi
        node_check("exact at H^" + std::to_string(n) + "(A;E)",
                   iota_h.count(n) ? iota_h[n] : zero, pi_h.count(n) ? pi_h[n] : zero,
                   HE.betti[n]);
        // node H^{n-1}(A; H1): in = pi, out = connecting
        if (n >= 1 && n - 1 < static_cast<int>(C1.basis.size()))
            node_check("exact at H^" + std::to_string(n - 1) + "(A;H1)",
                       pi_h.count(n) ? pi_h[n] : zero,
                       conn_h.count(n - 1) ? conn_h[n - 1] : zero, H1.betti[n - 1]);
    }

    // alternating sum of dimensions over the flattened window vanishes
    long alt = 0;
    int slot = 0;
    for (int n = 0; n <= top; ++n) {
        const long h0 = n < static_cast<int>(H0.betti.size()) ? H0.betti[n] : 0;
        const long he = HE.betti[n];
        const long h1 = n >= 1 && n - 1 < static_cast<int>(H1.betti.size()) ? H1.betti[n - 1] : 0;
        alt += signs::pow_m1(slot++) * h0;
        alt += signs::pow_m1(slot++) * he;
        alt += signs::pow_m1(slot++) * h1;
    }
    out.checks.push_back({"alternating dimension sum vanishes", alt == 0,
                          alt == 0 ? "" : std::to_string(alt)});
    return out;
}

}  // namespace ruth
