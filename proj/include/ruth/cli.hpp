#pragma once

#include <cstdlib>
#include <string>
#include <vector>

#include "ruth/homotopy.hpp"
#include "ruth/manifest.hpp"
#include "ruth/weil.hpp"

namespace ruth {

/*
** Machine-readable command report: named checks with optional witnesses plus
** computed tables, deterministic for a given manifest (canonical ordering
** everywhere, stable key order in the JSON rendering).
*/
struct Report {
    std::string command;
    std::string digest;
    std::vector<Check> checks;
    Json tables = Json::object();

    bool ok() const { return all_ok(checks); }

    void add(const std::vector<Check>& cs, const std::string& prefix = "") {
        for (const auto& c : cs) checks.push_back({prefix + c.name, c.ok, c.witness});
    }

    Json to_json() const {
        Json j = Json::object();
        j["command"] = command;
        j["input_digest"] = digest;
        Json cs = Json::array();
        for (const auto& c : checks) {
            Json e = Json::object();
            e["name"] = c.name;
            e["status"] = c.ok ? "ok" : "fail";
            if (!c.witness.empty()) e["witness"] = c.witness;
            cs.push_back(e);
        }
        j["checks"] = cs;
        if (!tables.empty()) j["tables"] = tables;
        j["ok"] = ok();
        return j;
    }

    std::string to_text() const {
        std::string out = "command: " + command + "\ninput: " + digest + "\n";
        for (const auto& c : checks) {
            out += (c.ok ? "[ok]   " : "[FAIL] ") + c.name;
            if (!c.witness.empty()) out += "  -- " + c.witness;
            out += "\n";
        }
        for (const auto& [key, val] : tables.items()) {
            out += key + ":\n";
            if (val.is_string()) {
                std::string s = val.get<std::string>();
                std::istringstream ss(s);
                std::string line;
                while (std::getline(ss, line)) out += "  " + line + "\n";
            } else {
                out += "  " + val.dump() + "\n";
            }
        }
        out += ok() ? "result: ok\n" : "result: fail\n";
        return out;
    }
};

inline int env_max_tuple_degree() {
    const char* s = std::getenv("RUTH_MAX_TUPLE_DEGREE");
    if (!s) return 3;
    try {
        return std::max(1, std::stoi(s));
    } catch (...) {
        return 3;
    }
}

inline Connection manifest_connection(const Manifest& m) {
    return m.connection ? *m.connection : Connection::zero(*m.A);
}

// check: axioms plus the three basic-curvature identities
inline Report cmd_check(const Manifest& m) {
    Report rep{"check", m.digest, {}, Json::object()};
    rep.add(verify_axioms(*m.A));
    rep.add(curvature_identities(m.A, manifest_connection(m)));
    return rep;
}

// adjoint: Ad_nabla structure equations; with a second connection, the
// change-of-connection morphism equations as well
inline Report cmd_adjoint(const Manifest& m) {
    Report rep{"adjoint", m.digest, {}, Json::object()};
    auto ad = adjoint(m.A, manifest_connection(m));
    rep.add(check_structure(ad.rep), "adjoint: ");
    if (m.connection2) {
        auto ad2 = adjoint(m.A, *m.connection2);
        rep.add(check_structure(ad2.rep), "adjoint': ");
        auto mor = change_of_connection(m.A, ad.rep, ad2.rep, manifest_connection(m),
                                        *m.connection2);
        rep.add(check_morphism(ad.rep, ad2.rep, mor), "change of connection: ");
    }
    return rep;
}

// weil: d^2 = 0 suite on generators and coordinates; generator tables; with
// cohomology = true, truncated Betti numbers at point base
inline Report cmd_weil(const Manifest& m, int max_degree, bool cohomology) {
    Report rep{"weil", m.digest, {}, Json::object()};
    WeilAlgebra W = build_weil(m.A, manifest_connection(m));
    Check dd{"d_total^2 = 0 on generators and coordinates", true, ""};
    for (std::size_t g = 0; g < W.alg->gens.size() && dd.ok; ++g) {
        GcaElement x = GcaElement::generator(W.alg, g);
        GcaElement sq = weil_d(W, weil_d(W, x, WeilWhich::Total), WeilWhich::Total);
        if (!sq.is_zero()) {
            dd.ok = false;
            dd.witness = W.alg->gens[g].name + ": " + sq.str();
        }
    }
    for (std::size_t a = 0; a < m.A->dim() && dd.ok; ++a) {
        GcaElement x = GcaElement::unit(W.alg, Poly::variable(m.A->chart, a));
        GcaElement sq = weil_d(W, weil_d(W, x, WeilWhich::Total), WeilWhich::Total);
        if (!sq.is_zero()) {
            dd.ok = false;
            dd.witness = (*m.A->chart)[a] + ": " + sq.str();
        }
    }
    rep.checks.push_back(dd);
    rep.tables["generator_tables"] = weil_tables_text(W);
    if (cohomology) {
        auto betti = weil_cohomology(W, max_degree);
        Json b = Json::array();
        for (const auto& [d, v] : betti) b.push_back(v);
        rep.tables["betti"] = b;
        rep.tables["betti_degrees"] = "0.." + std::to_string(max_degree - 1);
    }
    return rep;
}

inline Report cmd_brst(const Manifest& m) {
    Report rep{"brst", m.digest, {}, Json::object()};
    auto res = brst_compare(m.A);
    Check c{"Kalkman BRST operator equals d(W(A, nabla_flat))", res.equal, ""};
    if (!res.equal) c.witness = "first differing generator: " + res.first_difference;
    rep.checks.push_back(c);
    return rep;
}

inline Report cmd_im(const Manifest& m) {
    Report rep{"im", m.digest, {}, Json::object()};
    if (!m.sigma) throw Error("im: manifest has no sigma block");
    rep.add(im_form_check(m.A, *m.sigma));
    return rep;
}

inline Report cmd_kdiff(const Manifest& m) {
    Report rep{"kdiff", m.digest, {}, Json::object()};
    if (!m.kdiff) throw Error("kdiff: manifest has no kdiff block");
    auto res = k_differential_check(m.A, *m.kdiff);
    rep.add(res.checks);
    std::string verdict = res.verdict == KDiffVerdict::KDifferential ? "k-differential"
                          : res.verdict == KDiffVerdict::AlmostOnly  ? "almost-only"
                                                                     : "not-almost";
    rep.tables["verdict"] = verdict;
    return rep;
}

// Resolve a representation by name: a reps{} entry, or the built-ins
// "adjoint" and "trivial".
inline Ruth resolve_rep(const Manifest& m, const std::string& name) {
    auto it = m.reps.find(name);
    if (it != m.reps.end()) return it->second;
    if (name == "adjoint") return adjoint(m.A, manifest_connection(m)).rep;
    if (name == "trivial") {
        auto triv = trivial_bundle(m.A->chart);
        return make_ruth(m.A, triv, FormElement(make_end(triv).bundle, m.A->rank),
                         zero_aconnection(m.A, triv), {});
    }
    if (name == "serre") {
        if (!m.extension) throw Error("rep 'serre' needs an extension block");
        return serre_rep(*m.extension, m.extension_dim_l).rep;
    }
    throw Error("unknown representation '" + name + "'");
}

inline Report cmd_cohomology(const Manifest& m, const std::string& rep_name) {
    Report rep{"cohomology", m.digest, {}, Json::object()};
    if (m.A->dim() != 0)
        throw Error("cohomology: the base is not a point (chart has coordinates); "
                    "cohomology over a polynomial base is a module, not a dimension vector");
    if (rep_name == "deformation") {
        const int cap = env_max_tuple_degree();
        if (m.A->rank > cap)
            throw Error("cohomology: deformation-complex enumeration capped at degree " +
                        std::to_string(cap) + " (set RUTH_MAX_TUPLE_DEGREE to raise)");
        auto betti = deformation_betti_point_base(m.A);
        Json b = Json::array();
        for (auto v : betti) b.push_back(v);
        rep.tables["betti"] = b;
        rep.checks.push_back({"deformation complex assembled", true, ""});
        return rep;
    }
    Ruth R = resolve_rep(m, rep_name);
    rep.add(check_structure(R), rep_name + ": ");
    auto betti = ruth_betti(R);
    Json b = Json::array();
    Json degs = Json::array();
    for (const auto& [d, v] : betti) {
        degs.push_back(d);
        b.push_back(v);
    }
    rep.tables["betti"] = b;
    rep.tables["degrees"] = degs;
    return rep;
}

inline Report cmd_transfer(const Manifest& m, const std::string& rep_name) {
    Report rep{"transfer", m.digest, {}, Json::object()};
    Ruth R = resolve_rep(m, rep_name);
    rep.add(check_structure(R), rep_name + ": ");
    auto cd = build_contraction(R.end, R.partial);
    auto tr = transfer(R, cd);
    rep.add(check_structure(tr.rep), "transferred: ");
    rep.add(check_morphism(R, tr.rep, tr.phi), "chain map: ");
    if (m.A->dim() == 0) {
        std::map<int, std::size_t> b1, b2;
        for (auto& [d, b] : ruth_betti(R)) b1[d] = b;
        for (auto& [d, b] : ruth_betti(tr.rep)) b2[d] = b;
        Check c{"Betti numbers preserved", true, ""};
        int lo = b1.empty() ? 0 : b1.begin()->first;
        int hi = b1.empty() ? -1 : b1.rbegin()->first;
        Json b = Json::array();
        for (int d = lo; d <= hi; ++d) {
            const std::size_t x1 = b1.count(d) ? b1[d] : 0;
            const std::size_t x2 = b2.count(d) ? b2[d] : 0;
            b.push_back(x1);
            if (x1 != x2) {
                c.ok = false;
                c.witness = "degree " + std::to_string(d) + ": " + std::to_string(x1) +
                            " != " + std::to_string(x2);
            }
        }
        rep.tables["betti"] = b;
        rep.checks.push_back(c);
    }
    return rep;
}

}  // namespace ruth
