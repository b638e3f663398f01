#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "ruth/homotopy.hpp"

using namespace ruth;

namespace {

// rank-(1,2,1) constant exact complex over R, with the rank-3 algebroid
// rho(e1) = d/dx, rho(e2) = rho(e3) = 0 and a curved compatible connection
struct Curved121 {
    AlgebroidPtr A;
    BundlePtr E;
    FormElement partial;
    AConnection nabla;
};

Curved121 curved_121(bool second_connection = false) {
    auto v = make_vars({"x"});
    auto one = Poly::constant(v, Rat(1));
    auto z = Poly::zero(v);
    auto A = make_algebroid(v, 3, {{one}, {z}, {z}}, {});
    auto E = make_bundle(v, {{"u", 0}, {"v1", 1}, {"v2", 1}, {"w", 2}});
    HomBundle end = make_end(E);
    FormElement partial(end.bundle, 3);
    partial.add_term({}, end.index(0, 1), one);  // u -> v1
    partial.add_term({}, end.index(2, 3), one);  // v2 -> w

    // the compatible family Gamma(p,q,s): u -> p u, v1 -> p v1,
    // v2 -> q v1 + s v2, w -> s w
    auto gamma = [&](AConnection& con, int i, Poly p, Poly q, Poly s) {
        con.im[i][0][0] = p;
        con.im[i][1][1] = p;
        con.im[i][2][1] = q;
        con.im[i][2][2] = s;
        con.im[i][3][3] = s;
    };
    AConnection con = zero_aconnection(A, E);
    if (!second_connection) {
        gamma(con, 1, z, z, Poly::variable(v, 0));  // Gamma_2 = (0,0,x)
        gamma(con, 2, z, one, z);                   // Gamma_3 = (0,1,0)
    } else {
        gamma(con, 1, Poly::variable(v, 0), one, z);
        gamma(con, 2, z, Poly::variable(v, 0), one);
    }
    return Curved121{A, E, std::move(partial), std::move(con)};
}

}  // namespace

TEST_CASE("transported connection is compatible with the differential") {
    auto fx = curved_121();
    HomBundle end = make_end(fx.E);
    auto cd = build_contraction(end, fx.partial);
    REQUIRE(cd.exact);
    auto con = transported_connection(fx.A, fx.E, fx.partial, cd);
    Ruth R = make_ruth(fx.A, fx.E, fx.partial, con, {});
    auto checks = check_structure(R, 2);
    REQUIRE(checks.size() >= 2);
    CHECK(checks[1].name == "[nabla, partial] = 0");
    CHECK(checks[1].ok);
}

TEST_CASE("exact_rep: flat connection gives all omegas zero") {
    auto fx = curved_121();
    auto data = exact_rep(fx.A, fx.E, fx.partial);  // transported connection is flat here
    CHECK(all_ok(check_structure(data.rep)));
    CHECK(data.rep.omega.empty());
}

TEST_CASE("exact_rep on the curved (1,2,1) fixture: omega_2, omega_3 nonzero, equations hold") {
    auto fx = curved_121();
    auto data = exact_rep(fx.A, fx.E, fx.partial, fx.nabla);
    CHECK(all_ok(check_structure(data.rep)));
    REQUIRE(data.rep.omega.count(2) == 1);
    REQUIRE(data.rep.omega.count(3) == 1);
    CHECK_FALSE(data.rep.omega.at(2).is_zero());
    CHECK_FALSE(data.rep.omega.at(3).is_zero());
}

TEST_CASE("exact_rep refuses non-exact complexes") {
    auto v = make_vars({});
    auto A = fixtures::abelian(2);
    auto E = make_bundle(v, {{"a", 0}, {"b", 1}});
    FormElement partial(make_end(E).bundle, 2);  // zero differential, not exact
    CHECK_THROWS_AS(exact_rep(A, E, partial), Error);
}

TEST_CASE("part-3 isomorphism intertwines two structures on the double") {
    // double of a rank-1 bundle over R^2 with two different connections
    auto v = make_vars({"x", "y"});
    auto one = Poly::constant(v, Rat(1));
    auto A = make_algebroid(v, 2, {{one, Poly::zero(v)}, {Poly::zero(v), one}}, {});
    auto E0 = make_bundle(v, {{"s", 0}});
    fixtures::Rng rng(103);
    auto c1 = zero_aconnection(A, E0);
    c1.im[1][0][0] = Poly::variable(v, 0);
    auto c2 = zero_aconnection(A, E0);
    c2.im[0][0][0] = rng.poly(A->chart, 1, 2);
    c2.im[1][0][0] = rng.poly(A->chart, 1, 2);
    Ruth D1 = double_rep(A, E0, c1);
    Ruth D2 = double_rep(A, E0, c2);
    REQUIRE(all_ok(check_structure(D1)));
    REQUIRE(all_ok(check_structure(D2)));
    auto cd = build_contraction(D1.end, D1.partial);
    auto m = exact_iso(D1, D2, cd);  // residual obstructions throw
    CHECK(m.phi.count(0) == 1);
    CHECK(m.phi.count(1) == 1);
}

TEST_CASE("part-3 isomorphism on the curved (1,2,1) fixture") {
    auto fx1 = curved_121(false);
    auto fx2 = curved_121(true);
    auto d1 = exact_rep(fx1.A, fx1.E, fx1.partial, fx1.nabla);
    auto d2 = exact_rep(fx2.A, fx2.E, fx2.partial, fx2.nabla);
    REQUIRE(all_ok(check_structure(d1.rep)));
    REQUIRE(all_ok(check_structure(d2.rep)));
    auto m = exact_iso(d1.rep, d2.rep, d1.cd);
    CHECK(all_ok(check_morphism(d1.rep, d2.rep, m)));
}

TEST_CASE("transfer with zero differential is the identity") {
    auto A = fixtures::sl2();
    auto ad = adjoint(A, Connection::zero(*A));  // partial = 0 at point base
    auto cd = build_contraction(ad.rep.end, ad.rep.partial);
    CHECK_FALSE(cd.exact);
    auto tr = transfer(ad.rep, cd);
    CHECK(all_ok(check_structure(tr.rep)));
    CHECK(all_ok(check_morphism(ad.rep, tr.rep, tr.phi)));
    auto b1 = ruth_betti(ad.rep);
    auto b2 = ruth_betti(tr.rep);
    REQUIRE(b1.size() == b2.size());
    for (std::size_t i = 0; i < b1.size(); ++i) CHECK(b1[i] == b2[i]);
}

TEST_CASE("transfer of an acyclic double is the zero representation") {
    auto g = fixtures::heis3();
    auto E0 = make_bundle(g->chart, {{"s1", 0}, {"s2", 0}});
    fixtures::Rng rng(107);
    auto con = zero_aconnection(g, E0);
    for (int i = 0; i < 3; ++i)
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b)
                con.im[i][a][b] = Poly::constant(g->chart, rng.rat());
    Ruth D = double_rep(g, E0, con);
    auto cd = build_contraction(D.end, D.partial);
    REQUIRE(cd.exact);
    auto tr = transfer(D, cd);
    CHECK(tr.rep.E->size() == 0);
    for (const auto& [deg, b] : ruth_betti(D)) CHECK(b == 0);
}

TEST_CASE("transfer of the Serre representation of aff(1) x R") {
    // gtilde = aff(1) + R center: l = aff(1) (nontrivial d_l), quotient R
    auto v = make_vars({});
    auto z = Poly::zero(v);
    std::map<std::pair<int, int>, Section> c;
    c[{0, 1}] = {z, Poly::constant(v, Rat(1)), z};  // [f1,f2] = f2 inside l
    auto gt = make_lie_algebra(3, std::move(c));
    auto sd = serre_rep(gt, 2);
    REQUIRE(all_ok(check_structure(sd.rep)));

    auto cd = build_contraction(sd.rep.end, sd.rep.partial);
    CHECK_FALSE(cd.exact);
    auto tr = transfer(sd.rep, cd);
    CHECK(all_ok(check_structure(tr.rep)));
    CHECK(all_ok(check_morphism(sd.rep, tr.rep, tr.phi)));
    CHECK(tr.rep.partial.is_zero());

    // Betti numbers agree degree by degree (windows may differ in span)
    std::map<int, std::size_t> m1, m2;
    for (auto& [d, b] : ruth_betti(sd.rep)) m1[d] = b;
    for (auto& [d, b] : ruth_betti(tr.rep)) m2[d] = b;
    for (int d = 0; d <= 3; ++d) {
        const std::size_t x1 = m1.count(d) ? m1[d] : 0;
        const std::size_t x2 = m2.count(d) ? m2[d] : 0;
        CHECK(x1 == x2);
    }

    // total cohomology equals H(gtilde) = Kunneth of aff(1) and R: (1,2,1,0)
    auto want = oracle::ce_betti(*gt, {}, 1);
    REQUIRE(want == std::vector<std::size_t>({1, 2, 1, 0}));
    for (int d = 0; d <= 3; ++d) CHECK((m1.count(d) ? m1[d] : 0) == want[d]);
}

TEST_CASE("transfer passes a nonzero omega_2 through to the cohomology side") {
    // closed-2-form representation over the abelian plane: partial = 0
    auto g = fixtures::abelian(2);
    auto E = make_bundle(g->chart, {{"u", 0}, {"w", 1}});
    HomBundle end = make_end(E);
    FormElement om(end.bundle, 2);
    om.add_term({0, 1}, end.index(1, 0), Poly::constant(g->chart, Rat(1)));
    Ruth R = make_ruth(g, E, FormElement(end.bundle, 2), zero_aconnection(g, E), {{2, om}});
    REQUIRE(all_ok(check_structure(R)));
    auto cd = build_contraction(R.end, R.partial);
    CHECK_FALSE(cd.exact);
    auto tr = transfer(R, cd);
    CHECK(all_ok(check_structure(tr.rep)));
    CHECK(all_ok(check_morphism(R, tr.rep, tr.phi)));
    CHECK(tr.rep.omega.count(2) == 1);
    auto b1 = ruth_betti(R);
    auto b2 = ruth_betti(tr.rep);
    REQUIRE(b1.size() == b2.size());
    for (std::size_t i = 0; i < b1.size(); ++i) CHECK(b1[i] == b2[i]);
    std::vector<std::size_t> flat;
    for (auto& [d, b] : b1) flat.push_back(b);
    CHECK(flat == std::vector<std::size_t>({1, 2, 2, 1}));
}

TEST_CASE("the paper's change-of-connection morphism for the double") {
    // Phi_0 = Id, Phi_1(alpha) = nabla'_alpha - nabla_alpha placed in
    // Hom(E^1, E^0) is a morphism (D_E, D_nabla) -> (D_E, D_nabla')
    auto A = fixtures::bla_x();
    fixtures::Rng rng(223);
    auto E0 = make_bundle(A->chart, {{"s1", 0}, {"s2", 0}});
    auto mkcon = [&] {
        auto c = zero_aconnection(A, E0);
        for (int i = 0; i < A->rank; ++i)
            for (std::size_t g = 0; g < 2; ++g)
                for (std::size_t h = 0; h < 2; ++h) c.im[i][g][h] = rng.poly(A->chart, 1, 2);
        return c;
    };
    auto c1 = mkcon(), c2 = mkcon();
    Ruth D1 = double_rep(A, E0, c1);
    Ruth D2 = double_rep(A, E0, c2);
    REQUIRE(all_ok(check_structure(D1)));
    REQUIRE(all_ok(check_structure(D2)));
    HomBundle hom = make_hom(D1.E, D2.E);
    FormElement phi0(hom.bundle, A->rank);
    for (std::size_t g = 0; g < D1.E->size(); ++g)
        phi0.add_term({}, hom.index(g, g), Poly::constant(A->chart, Rat(1)));
    FormElement phi1(hom.bundle, A->rank);
    for (int i = 0; i < A->rank; ++i)
        for (std::size_t g = 0; g < 2; ++g)
            for (std::size_t h = 0; h < 2; ++h) {
                Poly d = c2.im[i][g][h] - c1.im[i][g][h];
                // source generator g at degree 1 (index 2+g), target h at degree 0
                if (!d.is_zero()) phi1.add_term({i}, hom.index(2 + g, h), std::move(d));
            }
    std::map<int, FormElement> comps;
    comps.emplace(0, std::move(phi0));
    comps.emplace(1, std::move(phi1));
    RuthMorphism m{hom, std::move(comps)};
    CHECK(all_ok(check_morphism(D1, D2, m)));
}

TEST_CASE("six-term exactness for an sl2 length-one representation") {
    // omega = e* ^ f* is exact (= -d h*), so it induces a valid structure on
    // the two trivial lines; the long exact sequence must close up exactly
    auto A = fixtures::sl2();
    auto triv = trivial_bundle(A->chart);
    FormElement w = FormElement::single(triv, 3, {1, 2}, 0, Poly::constant(A->chart, Rat(1)));
    REQUIRE(d_A(A, w).is_zero());
    auto E = make_bundle(A->chart, {{"u", 0}, {"v", 1}});
    HomBundle end = make_end(E);
    FormElement om(end.bundle, 3);
    om.add_term({1, 2}, end.index(1, 0), Poly::constant(A->chart, Rat(1)));
    Ruth R = make_ruth(A, E, FormElement(end.bundle, 3), zero_aconnection(A, E), {{2, om}});
    REQUIRE(all_ok(check_structure(R)));
    auto les = les_check(R);
    CHECK(all_ok(les.checks));
    CHECK(les.nodes_checked >= 6);
}

TEST_CASE("les_check validates its input") {
    auto A = fixtures::abelian(2);
    auto E = make_bundle(A->chart, {{"u", 0}, {"v", 2}});  // not length one
    Ruth R = make_ruth(A, E, FormElement(make_end(E).bundle, 2), zero_aconnection(A, E), {});
    CHECK_THROWS_AS(les_check(R), Error);
}
