#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ruth/cli.hpp"

/*
** ruth: exact symbolic verification of Lie algebroid structures over a
** chart, representations up to homotopy, the Weil/BRST algebra, IM forms
** and k-differentials.  Manifests are JSON; every check is exact rational
** arithmetic.  Exit status 0 iff all checks pass.
*/
int main(int argc, char** argv) {
    CLI::App app{"exact Lie algebroid / representation-up-to-homotopy checker"};
    app.require_subcommand(1);

    std::string manifest_path;
    std::string rep_name = "adjoint";
    int max_degree = 6;
    bool as_json = false, as_text = false, with_cohomology = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--manifest", manifest_path, "path to the JSON manifest")->required();
        sub->add_flag("--json", as_json, "machine-readable JSON report");
        sub->add_flag("--text", as_text, "plain-text report (default)");
    };

    CLI::App* c_check = app.add_subcommand("check", "verify the algebroid axioms and the basic curvature identities");
    CLI::App* c_adjoint = app.add_subcommand("adjoint", "build Ad_nabla and verify its structure equations");
    CLI::App* c_weil = app.add_subcommand("weil", "build W(A,nabla), verify d^2 = 0, print the generator tables");
    CLI::App* c_brst = app.add_subcommand("brst", "compare W(A,nabla_flat) with Kalkman's BRST operator");
    CLI::App* c_im = app.add_subcommand("im", "check the IM-form equations for the sigma block");
    CLI::App* c_kdiff = app.add_subcommand("kdiff", "classify the kdiff block as a k-differential");
    CLI::App* c_cohom = app.add_subcommand("cohomology", "point-base Betti numbers of a representation");
    CLI::App* c_transfer = app.add_subcommand("transfer", "homological perturbation transfer to the cohomology bundle");
    for (auto* sub : {c_check, c_adjoint, c_weil, c_brst, c_im, c_kdiff, c_cohom, c_transfer})
        add_common(sub);
    c_weil->add_option("--max-degree", max_degree, "total-degree cutoff for --cohomology (default 6)");
    c_weil->add_flag("--cohomology", with_cohomology, "also compute truncated Betti numbers (point base)");
    c_cohom->add_option("--rep", rep_name, "representation name (reps key, adjoint, trivial, serre, deformation)");
    c_transfer->add_option("--rep", rep_name, "representation name (reps key, adjoint, trivial, serre)");

    CLI11_PARSE(app, argc, argv);

    try {
        ruth::Manifest m = ruth::load_manifest(manifest_path);
        ruth::Report rep;
        if (app.got_subcommand(c_check)) rep = ruth::cmd_check(m);
        else if (app.got_subcommand(c_adjoint)) rep = ruth::cmd_adjoint(m);
        else if (app.got_subcommand(c_weil)) rep = ruth::cmd_weil(m, max_degree, with_cohomology);
        else if (app.got_subcommand(c_brst)) rep = ruth::cmd_brst(m);
        else if (app.got_subcommand(c_im)) rep = ruth::cmd_im(m);
        else if (app.got_subcommand(c_kdiff)) rep = ruth::cmd_kdiff(m);
        else if (app.got_subcommand(c_cohom)) rep = ruth::cmd_cohomology(m, rep_name);
        else rep = ruth::cmd_transfer(m, rep_name);

        if (as_json)
            std::cout << rep.to_json().dump(2) << "\n";
        else
            std::cout << rep.to_text();
        return rep.ok() ? 0 : 1;
    } catch (const ruth::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
