#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "ruth/weil.hpp"

using namespace ruth;

namespace {

GcaElement random_weil_element(fixtures::Rng& rng, const WeilAlgebra& W, int terms = 3) {
    GcaElement e(W.alg);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<unsigned> pw(0, 1);
    for (int t = 0; t < terms; ++t) {
        GcaMono m{{}, std::vector<unsigned>(W.alg->gens.size(), 0)};
        for (std::size_t g = 0; g < W.alg->gens.size(); ++g) {
            if (W.alg->gens[g].odd()) {
                if (coin(rng.gen())) m.odd.push_back(static_cast<int>(g));
            } else {
                m.even[g] = pw(rng.gen());
            }
        }
        e.add_term(m, rng.poly(W.alg->chart, 2, 2));
    }
    return e;
}

}  // namespace

TEST_CASE("point-base tables match the standard Weil algebra character by character") {
    for (const auto& A : {fixtures::abelian(1), fixtures::sl2(), fixtures::heis3()}) {
        WeilAlgebra W = build_weil(A, Connection::zero(*A));
        const int r = A->rank;
        auto th = [&](int i) { return GcaElement::generator(W.alg, W.th_index(i)); };
        auto mu = [&](int i) { return GcaElement::generator(W.alg, W.mu_index(i)); };
        std::string expect;
        for (int i = 0; i < r; ++i)
            expect += "d_ver(th" + std::to_string(i + 1) + ") = " + mu(i).str() + "\n";
        for (int i = 0; i < r; ++i) expect += "d_ver(mu" + std::to_string(i + 1) + ") = 0\n";
        for (int i = 0; i < r; ++i) {
            GcaElement e(W.alg);
            for (int j = 0; j < r; ++j)
                for (int k = 0; k < r; ++k) {
                    GcaElement w = th(j) * th(k);
                    Poly c = A->structure(j, k)[i];
                    c.scale(Rat(-1, 2));
                    w.scale(c);
                    e += w;
                }
            expect += "d_hor(th" + std::to_string(i + 1) + ") = " + e.str() + "\n";
        }
        for (int i = 0; i < r; ++i) {
            GcaElement e(W.alg);
            for (int j = 0; j < r; ++j)
                for (int k = 0; k < r; ++k) {
                    GcaElement w = th(j) * mu(k);
                    Poly c = A->structure(j, k)[i];
                    c.scale(Rat(-1));
                    w.scale(c);
                    e += w;
                }
            expect += "d_hor(mu" + std::to_string(i + 1) + ") = " + e.str() + "\n";
        }
        CHECK(weil_tables_text(W) == expect);
    }
}

TEST_CASE("action algebroid R x R with flat connection: the four derived formulas") {
    auto A = fixtures::action_rr();
    WeilAlgebra W = build_weil(A, Connection::zero(*A));
    auto del = GcaElement::generator(W.alg, W.del_index(0));
    auto th = GcaElement::generator(W.alg, W.th_index(0));
    auto mu = GcaElement::generator(W.alg, W.mu_index(0));

    CHECK(weil_d(W, del, WeilWhich::Hor) == GcaElement(W.alg) - mu);
    CHECK(weil_d(W, th, WeilWhich::Ver) == mu);
    // d_hor f = f' th, d_ver f = f' del
    auto f = GcaElement::unit(W.alg, parse_poly("x^2", A->chart));
    GcaElement fx_th = th;
    fx_th.scale(parse_poly("2*x", A->chart));
    GcaElement fx_del = del;
    fx_del.scale(parse_poly("2*x", A->chart));
    CHECK(weil_d(W, f, WeilWhich::Hor) == fx_th);
    CHECK(weil_d(W, f, WeilWhich::Ver) == fx_del);
}

TEST_CASE("flat connection kills the Gamma and r terms") {
    auto A = fixtures::bla_x();
    WeilAlgebra W = build_weil(A, Connection::zero(*A));
    for (int i = 0; i < 3; ++i) {
        auto th = GcaElement::generator(W.alg, W.th_index(i));
        auto mu = GcaElement::generator(W.alg, W.mu_index(i));
        CHECK(weil_d(W, th, WeilWhich::Ver) == mu);
        CHECK(weil_d(W, mu, WeilWhich::Ver).is_zero());
    }
}

TEST_CASE("d_hor^2 = d_ver^2 = d_hor d_ver + d_ver d_hor = 0") {
    fixtures::Rng rng(149);
    for (const auto& [name, A] : fixtures::acceptance_fixtures()) {
        INFO(name);
        for (int draw = 0; draw < 2; ++draw) {
            WeilAlgebra W = build_weil(A, rng.connection(*A));
            for (std::size_t g = 0; g < W.alg->gens.size(); ++g) {
                GcaElement x = GcaElement::generator(W.alg, g);
                CHECK(weil_d(W, weil_d(W, x, WeilWhich::Hor), WeilWhich::Hor).is_zero());
                CHECK(weil_d(W, weil_d(W, x, WeilWhich::Ver), WeilWhich::Ver).is_zero());
                GcaElement anti = weil_d(W, weil_d(W, x, WeilWhich::Hor), WeilWhich::Ver) +
                                  weil_d(W, weil_d(W, x, WeilWhich::Ver), WeilWhich::Hor);
                CHECK(anti.is_zero());
                CHECK(weil_d(W, weil_d(W, x, WeilWhich::Total), WeilWhich::Total).is_zero());
            }
            for (std::size_t a = 0; a < A->dim(); ++a) {
                GcaElement x = GcaElement::unit(W.alg, Poly::variable(A->chart, a));
                CHECK(weil_d(W, weil_d(W, x, WeilWhich::Total), WeilWhich::Total).is_zero());
            }
        }
    }
}

TEST_CASE("d_total^2 = 0 on random elements for so(3) with a random connection") {
    // m = 3 here, so the curvature r-terms of d_ver(mu) are genuinely nonzero
    fixtures::Rng rng(151);
    auto A = fixtures::so3_action();
    WeilAlgebra W = build_weil(A, rng.connection(*A));
    for (std::size_t g = 0; g < W.alg->gens.size(); ++g) {
        GcaElement x = GcaElement::generator(W.alg, g);
        CHECK(weil_d(W, weil_d(W, x, WeilWhich::Hor), WeilWhich::Hor).is_zero());
        CHECK(weil_d(W, weil_d(W, x, WeilWhich::Ver), WeilWhich::Ver).is_zero());
        CHECK(weil_d(W, weil_d(W, x, WeilWhich::Total), WeilWhich::Total).is_zero());
    }
    for (int t = 0; t < 5; ++t) {
        GcaElement x = random_weil_element(rng, W, 2);
        CHECK(weil_d(W, weil_d(W, x, WeilWhich::Total), WeilWhich::Total).is_zero());
    }
}

TEST_CASE("bidegree bookkeeping of the two differentials") {
    fixtures::Rng rng(157);
    auto A = fixtures::action_rr();
    WeilAlgebra W = build_weil(A, rng.connection(*A));
    for (std::size_t g = 0; g < W.alg->gens.size(); ++g) {
        GcaElement x = GcaElement::generator(W.alg, g);
        auto [p, q] = x.mono_bidegree(x.terms().begin()->first);
        const GcaElement dh = weil_d(W, x, WeilWhich::Hor);
        for (const auto& [m, c] : dh.terms()) {
            auto [ph, qh] = x.mono_bidegree(m);
            CHECK(ph == p + 1);
            CHECK(qh == q);
        }
        const GcaElement dv = weil_d(W, x, WeilWhich::Ver);
        for (const auto& [m, c] : dv.terms()) {
            auto [pv, qv] = x.mono_bidegree(m);
            CHECK(pv == p);
            CHECK(qv == q + 1);
        }
    }
}

TEST_CASE("graded Leibniz for both Weil differentials on random pairs") {
    fixtures::Rng rng(163);
    auto A = fixtures::action_rr();
    WeilAlgebra W = build_weil(A, rng.connection(*A));
    int checked = 0;
    for (int t = 0; t < 60; ++t) {
        GcaElement x = random_weil_element(rng, W, 1);
        GcaElement y = random_weil_element(rng, W, 2);
        if (x.terms().empty()) continue;
        auto [p, q] = x.mono_bidegree(x.terms().begin()->first);
        bool homog = true;
        for (const auto& [m, c] : x.terms()) {
            auto [pp, qq] = x.mono_bidegree(m);
            if (pp + qq != p + q) homog = false;
        }
        if (!homog) continue;
        for (auto which : {WeilWhich::Hor, WeilWhich::Ver}) {
            GcaElement lhs = weil_d(W, x * y, which);
            GcaElement rhs = weil_d(W, x, which) * y;
            GcaElement xy = x * weil_d(W, y, which);
            xy.scale(Rat(signs::leibniz(1, p + q)));
            rhs += xy;
            CHECK(lhs == rhs);
        }
        ++checked;
    }
    CHECK(checked > 20);
}

TEST_CASE("BRST equality for the R x R action algebroid") {
    auto res = brst_compare(fixtures::action_rr());
    CHECK(res.equal);
}

TEST_CASE("BRST equality for the so(3) action on R^3") {

    auto res = brst_compare(fixtures::so3_action());
    CHECK(res.equal);
}

TEST_CASE("BRST with a flipped contraction-term sign differs first at a del generator") {
    auto A = fixtures::action_rr();
    WeilAlgebra W = build_weil(A, Connection::zero(*A));
    GcaDerivation kalk = kalkman_brst(W);
    // flip the sign of the iota term: delta' = delta + 2 mu^b (x) i_b
    auto mu = GcaElement::generator(W.alg, W.mu_index(0));
    GcaElement wrong = kalk.gen_images[W.del_index(0)];
    GcaElement twice_mu = mu;
    twice_mu.scale(Rat(2));
    wrong += twice_mu;  // -rho mu -> +rho mu with rho = 1
    kalk.gen_images[W.del_index(0)] = wrong;
    std::string first_diff;
    for (std::size_t g = 0; g < W.alg->gens.size(); ++g) {
        GcaElement ours = weil_d(W, GcaElement::generator(W.alg, g), WeilWhich::Total);
        GcaElement theirs = apply_derivation(kalk, GcaElement::generator(W.alg, g));
        if (!(ours == theirs)) {
            first_diff = W.alg->gens[g].name;
            break;
        }
    }
    CHECK(first_diff == "del_x");
}

TEST_CASE("BRST comparison refuses x-dependent structure functions") {
    CHECK_THROWS_AS(brst_compare(fixtures::bla_x()), Error);
}

TEST_CASE("Weil cohomology: abelian rank one, cutoff 6") {
    auto A = fixtures::abelian(1);
    WeilAlgebra W = build_weil(A, Connection::zero(*A));
    auto betti = weil_cohomology(W, 6);
    REQUIRE(betti.size() == 6);
    for (int d = 0; d < 6; ++d) {
        CHECK(betti[d].first == d);
        CHECK(betti[d].second == (d == 0 ? 1u : 0u));
    }
}

TEST_CASE("Weil cohomology: sl2, cutoff 4") {
    auto A = fixtures::sl2();
    WeilAlgebra W = build_weil(A, Connection::zero(*A));
    auto betti = weil_cohomology(W, 4);
    REQUIRE(betti.size() == 4);
    CHECK(betti[0].second == 1);
    for (int d = 1; d < 4; ++d) CHECK(betti[d].second == 0);
}

TEST_CASE("Weil cohomology refuses non-point bases") {
    auto A = fixtures::action_rr();
    WeilAlgebra W = build_weil(A, Connection::zero(*A));
    CHECK_THROWS_AS(weil_cohomology(W, 4), Error);
}

TEST_CASE("IM forms: zero, the symplectic form on R^2, and the broken form on R^3") {
    // sigma = 0 on any fixture
    {
        auto A = fixtures::so3_action();
        std::vector<std::vector<Poly>> sigma(3, std::vector<Poly>(3, Poly::zero(A->chart)));
        CHECK(all_ok(im_form_check(A, sigma)));
    }
    // A = TM on R^2, sigma(X) = i_X(dx^dy): sigma(d/dx) = dy, sigma(d/dy) = -dx
    {
        auto v = make_vars({"x", "y"});
        auto one = Poly::constant(v, Rat(1));
        auto A = make_algebroid(v, 2, {{one, Poly::zero(v)}, {Poly::zero(v), one}}, {});
        std::vector<std::vector<Poly>> sigma = {{Poly::zero(v), one}, {-one, Poly::zero(v)}};
        CHECK(all_ok(im_form_check(A, sigma)));
    }
    // A = TM on R^3, sigma(X) = i_X(z dx^dy): fails the second equation at (e1,e2)
    {
        auto v = make_vars({"x", "y", "z"});
        auto one = Poly::constant(v, Rat(1));
        auto z = Poly::variable(v, 2);
        auto zero = Poly::zero(v);
        auto A = make_algebroid(
            v, 3, {{one, zero, zero}, {zero, one, zero}, {zero, zero, one}}, {});
        std::vector<std::vector<Poly>> sigma = {{zero, z, zero}, {-z, zero, zero},
                                                {zero, zero, zero}};
        auto checks = im_form_check(A, sigma);
        CHECK(checks[0].ok);
        CHECK_FALSE(checks[1].ok);
        CHECK(checks[1].witness.find("(e1,e2)") != std::string::npos);
    }
}

TEST_CASE("IM verdicts agree with d_hor-closedness of the W^{1,2} cocycle") {
    // cross-oracle on tangent algebroids of rank <= 3
    fixtures::Rng rng(167);
    for (int m = 2; m <= 3; ++m) {
        std::vector<std::string> names;
        for (int a = 0; a < m; ++a) names.push_back("x" + std::to_string(a + 1));
        auto v = make_vars(names);
        std::vector<std::vector<Poly>> rho(m, std::vector<Poly>(m, Poly::zero(v)));
        for (int a = 0; a < m; ++a) rho[a][a] = Poly::constant(v, Rat(1));
        auto A = make_algebroid(v, m, rho, {});
        WeilAlgebra W = build_weil(A, Connection::zero(*A));
        for (int trial = 0; trial < 8; ++trial) {
            std::vector<std::vector<Poly>> sigma(m, std::vector<Poly>(m, Poly::zero(v)));
            if (trial % 2 == 0) {
                for (int i = 0; i < m; ++i)
                    for (int a = i + 1; a < m; ++a) {
                        Poly w = rng.poly(v, 1, 2);
                        sigma[i][a] = w;
                        sigma[a][i] = -w;
                    }
            } else {
                for (int i = 0; i < m; ++i)
                    for (int a = 0; a < m; ++a) sigma[i][a] = rng.poly(v, 1, 2);
            }
            GcaElement cprime(W.alg);
            for (int i = 0; i < m; ++i)
                for (int a = 0; a < m; ++a) {
                    GcaElement w = GcaElement::generator(W.alg, W.del_index(a)) *
                                   GcaElement::generator(W.alg, W.th_index(i));
                    w.scale(sigma[i][a]);
                    cprime += w;
                }
            GcaElement c = weil_d(W, cprime, WeilWhich::Ver);
            const bool oracle_im = weil_d(W, c, WeilWhich::Hor).is_zero();
            CHECK(all_ok(im_form_check(A, sigma)) == oracle_im);
        }
    }
}
