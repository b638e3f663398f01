#pragma once

#include <random>
#include <vector>

#include "ruth/algebroid.hpp"
#include "ruth/parser.hpp"

/*
** Shared fixture algebroids:
**   abelian1, abelian2, aff1, sl2, heis3   (point base)
**   action_rr       R acting on R by d/dx
**   bla_x           bundle of Lie algebras over R with c^3_12 = x
**   so3_action      so(3) acting on R^3 by rotation fields
*/
namespace fixtures {

using namespace ruth;

inline Poly P(const VarsPtr& v, const std::string& s) { return parse_poly(s, v); }

inline AlgebroidPtr abelian(int rank) { return make_lie_algebra(rank, {}); }

inline AlgebroidPtr aff1() {
    // [e1, e2] = e2
    VarsPtr v = make_vars({});
    std::map<std::pair<int, int>, Section> c;
    c[{0, 1}] = {Poly::zero(v), Poly::constant(v, Rat(1))};
    return make_lie_algebra(2, std::move(c));
}

inline AlgebroidPtr sl2() {
    // basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h
    VarsPtr v = make_vars({});
    auto z = Poly::zero(v);
    std::map<std::pair<int, int>, Section> c;
    c[{0, 1}] = {z, Poly::constant(v, Rat(2)), z};
    c[{0, 2}] = {z, z, Poly::constant(v, Rat(-2))};
    c[{1, 2}] = {Poly::constant(v, Rat(1)), z, z};
    return make_lie_algebra(3, std::move(c));
}

inline AlgebroidPtr heis3() {
    // [e1, e2] = e3
    VarsPtr v = make_vars({});
    auto z = Poly::zero(v);
    std::map<std::pair<int, int>, Section> c;
    c[{0, 1}] = {z, z, Poly::constant(v, Rat(1))};
    return make_lie_algebra(3, std::move(c));
}

inline AlgebroidPtr action_rr() {
    // R acting on R by d/dx: rank 1, anchor rho(e1) = d/dx
    VarsPtr v = make_vars({"x"});
    return make_algebroid(v, 1, {{Poly::constant(v, Rat(1))}}, {});
}

inline AlgebroidPtr bla_x() {
    // bundle of Lie algebras over R: rho = 0, [e1,e2] = x e3
    VarsPtr v = make_vars({"x"});
    auto z = Poly::zero(v);
    std::map<std::pair<int, int>, Section> c;
    c[{0, 1}] = {z, z, Poly::variable(v, 0)};
    std::vector<std::vector<Poly>> rho(3, {z});
    return make_algebroid(v, 3, std::move(rho), std::move(c));
}

inline AlgebroidPtr so3_action() {
    // so(3) acting on R^3: L1 = z d/dy - y d/dz, L2 = x d/dz - z d/dx,
    // L3 = y d/dx - x d/dy; [L1,L2] = L3 cyclically.
    VarsPtr v = make_vars({"x", "y", "z"});
    auto z0 = Poly::zero(v);
    std::vector<std::vector<Poly>> rho = {
        {z0, P(v, "z"), P(v, "0-y")},
        {P(v, "0-z"), z0, P(v, "x")},
        {P(v, "y"), P(v, "0-x"), z0},
    };
    auto one = Poly::constant(v, Rat(1));
    std::map<std::pair<int, int>, Section> c;
    c[{0, 1}] = {z0, z0, one};
    c[{1, 2}] = {one, z0, z0};
    c[{0, 2}] = {z0, -one, z0};  // [e1,e3] = -e2
    return make_algebroid(v, 3, std::move(rho), std::move(c));
}

struct NamedAlgebroid {
    std::string name;
    AlgebroidPtr A;
};

inline std::vector<NamedAlgebroid> acceptance_fixtures() {
    return {{"abelian2", abelian(2)}, {"aff(1)", aff1()},      {"sl2", sl2()},
            {"heis3", heis3()},       {"action RxR", action_rr()}, {"bla c312=x", bla_x()}};
}

// Deterministic random rationals with small numerators and denominators.
class Rng {
public:
    explicit Rng(unsigned seed) : gen_(seed) {}

    Rat rat() {
        std::uniform_int_distribution<long> num(-4, 4);
        std::uniform_int_distribution<long> den(1, 3);
        return Rat(num(gen_), den(gen_));
    }

    Poly poly(const VarsPtr& vars, unsigned max_degree = 2, int terms = 3) {
        Poly p = Poly::zero(vars);
        std::uniform_int_distribution<unsigned> deg(0, max_degree);
        for (int t = 0; t < terms; ++t) {
            Mono m(vars->size(), 0);
            unsigned d = deg(gen_);
            for (unsigned u = 0; u < d && !vars->empty(); ++u) {
                std::uniform_int_distribution<std::size_t> pick(0, vars->size() - 1);
                m[pick(gen_)] += 1;
            }
            p += Poly::term(vars, m, rat());
        }
        return p;
    }

    Connection connection(const ChartAlgebroid& A) {
        Connection con = Connection::zero(A);
        for (std::size_t a = 0; a < A.dim(); ++a)
            for (int j = 0; j < A.rank; ++j)
                for (int i = 0; i < A.rank; ++i)
                    con.gamma[a][j][i] = Poly::constant(A.chart, rat());
        return con;
    }

    Section section(const ChartAlgebroid& A, unsigned max_degree = 2) {
        Section s = A.zero_section();
        for (int i = 0; i < A.rank; ++i) s[i] = poly(A.chart, max_degree, 2);
        return s;
    }

    std::mt19937_64& gen() { return gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace fixtures
