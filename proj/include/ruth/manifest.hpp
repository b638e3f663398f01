#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ruth/algebroid.hpp"
#include "ruth/deformation.hpp"
#include "ruth/parser.hpp"
#include "ruth/rep.hpp"

namespace ruth {

using Json = nlohmann::ordered_json;

/*
** Manifest: the JSON input format of the CLI.  Polynomial leaves are strings
** in the chart-coordinate grammar; indices are 1-based in the file.
**
**   chart       ["x", ...]
**   rank        r
**   anchor      r rows of m strings           rho(e_i) = sum_a anchor[i][a] d/dx_a
**   brackets    {"j,k": [r strings], ...}     [e_j, e_k] = sum_i c^i e_i  (j < k)
**   connection  m x r x r strings             nabla_{d/dx_a} e_j = sum_i conn[a][j][i] e_i
**   connection2 optional second connection
**   sigma       r rows of m strings           sigma(e_i) = sum_a sigma[i][a] dx_a
**   kdiff       {"k": int, "on_coordinates": [mv...], "on_sections": [mv...]}
**               multivectors are {"i,j,...": "poly", ...} ("" for the scalar part)
**   reps        {"name": {"generators": [["u",0],...], "partial": n x n,
**                          "nabla": r x n x n, "omega": {"2": [{"tuple": [j,k],
**                          "matrix": n x n}, ...]}}}
**   extension   {"dim_l": int, "rank": int, "brackets": {...}}   (point base)
*/
struct Manifest {
    Json raw;
    std::string digest;

    AlgebroidPtr A;
    std::optional<Connection> connection, connection2;
    std::optional<std::vector<std::vector<Poly>>> sigma;
    std::optional<K1Differential> kdiff;
    std::map<std::string, Ruth> reps;
    std::optional<AlgebroidPtr> extension;  // the total algebra gtilde
    int extension_dim_l = 0;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline Poly parse_leaf(const Json& j, const VarsPtr& vars, const std::string& where) {
    if (!j.is_string()) throw Error(where + ": expected a polynomial string");
    try {
        return parse_poly(j.get<std::string>(), vars);
    } catch (const ParseError& e) {
        throw Error(where + ": " + e.what());
    }
}

inline std::map<std::pair<int, int>, Section> parse_brackets(const Json& j, const VarsPtr& vars,
                                                             int rank,
                                                             const std::string& where) {
    std::map<std::pair<int, int>, Section> c;
    if (j.is_null()) return c;
    if (!j.is_object()) throw Error(where + ": expected an object keyed by \"j,k\"");
    for (const auto& [key, val] : j.items()) {
        std::istringstream ss(key);
        int a = 0, b = 0;
        char comma = 0;
        if (!(ss >> a >> comma >> b) || comma != ',')
            throw Error(where + ": bad pair key '" + key + "'");
        if (a < 1 || b < 1 || a > rank || b > rank || a >= b)
            throw Error(where + ": pair '" + key + "' must satisfy 1 <= j < k <= rank");
        if (!val.is_array() || static_cast<int>(val.size()) != rank)
            throw Error(where + "['" + key + "']: expected " + std::to_string(rank) +
                        " coefficients");
        Section s;
        for (int i = 0; i < rank; ++i)
            s.push_back(parse_leaf(val[i], vars, where + "['" + key + "']"));
        c[{a - 1, b - 1}] = std::move(s);
    }
    return c;
}

inline Connection parse_connection(const Json& j, const ChartAlgebroid& A,
                                   const std::string& where) {
    Connection con = Connection::zero(A);
    if (!j.is_array() || j.size() != A.dim())
        throw Error(where + ": expected one block per chart coordinate");
    for (std::size_t a = 0; a < A.dim(); ++a) {
        if (!j[a].is_array() || static_cast<int>(j[a].size()) != A.rank)
            throw Error(where + ": block " + std::to_string(a + 1) + " must have rank rows");
        for (int jj = 0; jj < A.rank; ++jj) {
            if (!j[a][jj].is_array() || static_cast<int>(j[a][jj].size()) != A.rank)
                throw Error(where + ": row length mismatch");
            for (int i = 0; i < A.rank; ++i)
                con.gamma[a][jj][i] = parse_leaf(j[a][jj][i], A.chart, where);
        }
    }
    return con;
}

inline Multivector parse_multivector(const Json& j, const AlgebroidPtr& A,
                                     const std::string& where) {
    Multivector mv(A);
    if (j.is_null()) return mv;
    if (!j.is_object()) throw Error(where + ": expected an object keyed by index tuples");
    for (const auto& [key, val] : j.items()) {
        std::vector<int> idx;
        if (!key.empty()) {
            std::istringstream ss(key);
            std::string part;
            while (std::getline(ss, part, ',')) {
                int v = 0;
                try {
                    v = std::stoi(part);
                } catch (...) {
                    throw Error(where + ": bad tuple key '" + key + "'");
                }
                if (v < 1 || v > A->rank) throw Error(where + ": index out of range in '" + key + "'");
                idx.push_back(v - 1);
            }
        }
        mv.add_term_signed(idx, parse_leaf(val, A->chart, where + "['" + key + "']"));
    }
    return mv;
}

inline Ruth parse_rep(const Json& j, const AlgebroidPtr& A, const std::string& where) {
    if (!j.contains("generators") || !j["generators"].is_array())
        throw Error(where + ": missing generators");
    std::vector<std::pair<std::string, int>> gens;
    for (const auto& g : j["generators"]) {
        if (!g.is_array() || g.size() != 2)
            throw Error(where + ".generators: expected [name, degree] pairs");
        gens.push_back({g[0].get<std::string>(), g[1].get<int>()});
    }
    BundlePtr E = make_bundle(A->chart, gens);
    const std::size_t n = E->size();
    HomBundle end = make_end(E);
    const int r = A->rank;

    FormElement partial(end.bundle, r);
    if (j.contains("partial")) {
        const auto& P = j["partial"];
        if (!P.is_array() || P.size() != n) throw Error(where + ".partial: expected n rows");
        for (std::size_t s = 0; s < n; ++s) {
            if (!P[s].is_array() || P[s].size() != n)
                throw Error(where + ".partial: expected n columns");
            for (std::size_t t = 0; t < n; ++t)
                partial.add_term({}, end.index(s, t),
                                 parse_leaf(P[s][t], A->chart, where + ".partial"));
        }
    }

    AConnection nab = zero_aconnection(A, E);
    if (j.contains("nabla")) {
        const auto& N = j["nabla"];
        if (!N.is_array() || static_cast<int>(N.size()) != r)
            throw Error(where + ".nabla: expected one block per frame section");
        for (int i = 0; i < r; ++i) {
            if (!N[i].is_array() || N[i].size() != n)
                throw Error(where + ".nabla: block " + std::to_string(i + 1) + " shape mismatch");
            for (std::size_t g = 0; g < n; ++g) {
                if (!N[i][g].is_array() || N[i][g].size() != n)
                    throw Error(where + ".nabla: row length mismatch");
                for (std::size_t h = 0; h < n; ++h)
                    nab.im[i][g][h] = parse_leaf(N[i][g][h], A->chart, where + ".nabla");
            }
        }
    }

    std::map<int, FormElement> omega;
    if (j.contains("omega")) {
        for (const auto& [key, blocks] : j["omega"].items()) {
            int p = 0;
            try {
                p = std::stoi(key);
            } catch (...) {
                throw Error(where + ".omega: bad degree key '" + key + "'");
            }
            FormElement w(end.bundle, r);
            if (!blocks.is_array()) throw Error(where + ".omega['" + key + "']: expected a list");
            for (const auto& blk : blocks) {
                if (!blk.contains("tuple") || !blk.contains("matrix"))
                    throw Error(where + ".omega['" + key + "']: entries need tuple and matrix");
                std::vector<int> idx;
                for (const auto& v : blk["tuple"]) {
                    int x = v.get<int>();
                    if (x < 1 || x > r) throw Error(where + ".omega: tuple index out of range");
                    idx.push_back(x - 1);
                }
                const auto& M = blk["matrix"];
                if (!M.is_array() || M.size() != n)
                    throw Error(where + ".omega: matrix shape mismatch");
                for (std::size_t s = 0; s < n; ++s)
                    for (std::size_t t = 0; t < n; ++t)
                        w.add_term(idx, end.index(s, t),
                                   parse_leaf(M[s][t], A->chart, where + ".omega"));
            }
            if (!w.is_zero()) omega.emplace(p, std::move(w));
        }
    }
    try {
        return make_ruth(A, E, std::move(partial), std::move(nab), std::move(omega));
    } catch (const Error& e) {
        throw Error(where + ": " + e.what());
    }
}

}  // namespace detail

inline Manifest parse_manifest_text(const std::string& text) {
    Manifest m;
    try {
        m.raw = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("manifest: ") + e.what());
    }
    {
        std::ostringstream hex;
        hex << std::hex << detail::fnv1a(text);
        m.digest = "fnv1a:" + hex.str();
    }
    const Json& j = m.raw;
    if (!j.contains("chart") || !j["chart"].is_array())
        throw Error("manifest.chart: expected a list of coordinate names");
    std::vector<std::string> names;
    for (const auto& n : j["chart"]) names.push_back(n.get<std::string>());
    VarsPtr chart = make_vars(names);
    if (!j.contains("rank")) throw Error("manifest.rank: missing");
    const int rank = j["rank"].get<int>();
    if (rank < 1) throw Error("manifest.rank: must be positive");

    std::vector<std::vector<Poly>> rho(rank, std::vector<Poly>(names.size(), Poly::zero(chart)));
    if (j.contains("anchor")) {
        const auto& a = j["anchor"];
        if (!a.is_array() || static_cast<int>(a.size()) != rank)
            throw Error("manifest.anchor: expected one row per section");
        for (int i = 0; i < rank; ++i) {
            if (!a[i].is_array() || a[i].size() != names.size())
                throw Error("manifest.anchor: row " + std::to_string(i + 1) +
                            " must have one entry per coordinate");
            for (std::size_t b = 0; b < names.size(); ++b)
                rho[i][b] = detail::parse_leaf(a[i][b], chart, "manifest.anchor");
        }
    } else if (!names.empty()) {
        throw Error("manifest.anchor: missing (required when the chart is nonempty)");
    }
    auto c = detail::parse_brackets(j.contains("brackets") ? j["brackets"] : Json(),
                                    chart, rank, "manifest.brackets");
    m.A = make_algebroid(chart, rank, std::move(rho), std::move(c));

    if (j.contains("connection"))
        m.connection = detail::parse_connection(j["connection"], *m.A, "manifest.connection");
    if (j.contains("connection2"))
        m.connection2 = detail::parse_connection(j["connection2"], *m.A, "manifest.connection2");

    if (j.contains("sigma")) {
        const auto& s = j["sigma"];
        if (!s.is_array() || static_cast<int>(s.size()) != rank)
            throw Error("manifest.sigma: expected one row per section");
        std::vector<std::vector<Poly>> sig;
        for (int i = 0; i < rank; ++i) {
            if (!s[i].is_array() || s[i].size() != names.size())
                throw Error("manifest.sigma: row length mismatch");
            std::vector<Poly> row;
            for (std::size_t a = 0; a < names.size(); ++a)
                row.push_back(detail::parse_leaf(s[i][a], chart, "manifest.sigma"));
            sig.push_back(std::move(row));
        }
        m.sigma = std::move(sig);
    }

    if (j.contains("kdiff")) {
        const auto& k = j["kdiff"];
        K1Differential kd;
        if (!k.contains("k")) throw Error("manifest.kdiff.k: missing");
        kd.k = k["k"].get<int>();
        if (k.contains("on_coordinates")) {
            if (!k["on_coordinates"].is_array() || k["on_coordinates"].size() != names.size())
                throw Error("manifest.kdiff.on_coordinates: one entry per coordinate required");
            for (const auto& mv : k["on_coordinates"])
                kd.on_coords.push_back(
                    detail::parse_multivector(mv, m.A, "manifest.kdiff.on_coordinates"));
        }
        if (!k.contains("on_sections") || !k["on_sections"].is_array() ||
            static_cast<int>(k["on_sections"].size()) != rank)
            throw Error("manifest.kdiff.on_sections: one entry per section required");
        for (const auto& mv : k["on_sections"])
            kd.on_sections.push_back(
                detail::parse_multivector(mv, m.A, "manifest.kdiff.on_sections"));
        m.kdiff = std::move(kd);
    }

    if (j.contains("reps")) {
        for (const auto& [name, rep] : j["reps"].items())
            m.reps.emplace(name, detail::parse_rep(rep, m.A, "manifest.reps." + name));
    }

    if (j.contains("extension")) {
        const auto& e = j["extension"];
        if (!e.contains("dim_l") || !e.contains("rank"))
            throw Error("manifest.extension: dim_l and rank required");
        if (!names.empty()) throw Error("manifest.extension: requires a point base");
        const int er = e["rank"].get<int>();
        auto ec = detail::parse_brackets(e.contains("brackets") ? e["brackets"] : Json(),
                                         chart, er, "manifest.extension.brackets");
        m.extension = make_lie_algebra(er, std::move(ec));
        m.extension_dim_l = e["dim_l"].get<int>();
    }
    return m;
}

inline Manifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open manifest '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_manifest_text(ss.str());
}

}  // namespace ruth
