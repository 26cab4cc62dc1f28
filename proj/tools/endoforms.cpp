#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "endoforms/cli.hpp"

namespace {

void add_common(CLI::App* sub, endo::cli::AnalysisRequest& req, std::optional<std::string>& input,
                std::optional<std::string>& output)
{
    sub->add_option("--input", input, "matrix file (JSON {\"n\",\"rows\"} or whitespace grid)");
    sub->add_option("--tol", req.tol_overrides, "tolerance override name=value (repeatable)");
    sub->add_option("--seed", req.seed, "seed for sampled vectors and matrices");
    sub->add_option("--output", output, "report path (stdout when omitted)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Expansion/rotation analysis of real endomorphisms"};
    app.require_subcommand(1);

    endo::cli::AnalysisRequest req;
    std::optional<std::string> input, output, field, params, point;
    std::optional<std::size_t> dim;

    auto* analyze = app.add_subcommand("analyze", "forms, eigenstructure and normality of a matrix");
    add_common(analyze, req, input, output);
    analyze->add_option("--basis", req.basis_mode, "given | expansion | skew-canonical")
        ->check(CLI::IsMember({"given", "expansion", "skew-canonical"}));

    auto* planar = app.add_subcommand("planar", "planar theory for a 2x2 matrix");
    add_common(planar, req, input, output);
    planar->add_option("--point", point, "direction u as x,y for the {u, u-perp} representation");

    auto* identities = app.add_subcommand("identities", "invariant identity residuals");
    add_common(identities, req, input, output);
    identities->add_option("--dim", dim, "size of the seeded random matrix when --input is absent");
    identities->add_option("--trials", req.trials, "trial count for the n = 4 determinant audit");

    auto* frenet = app.add_subcommand("frenet", "Frenet shape map of a unit flow field");
    add_common(frenet, req, input, output);
    frenet->add_option("--field", field, "helix | circle | file:<path>");
    frenet->add_option("--params", params, "field parameters, e.g. c=0.5,r=1");
    frenet->add_option("--point", point, "evaluation point x,y,z");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    req.command = app.get_subcommands().front()->get_name();
    req.input = input;
    req.output = output;
    req.field = field;
    req.params = params;
    req.point = point;
    req.dim = dim;
    return endo::cli::run(req);
}
