// lkt: validate, compute, compare and cross-check latticed K-theory models written in .lkt files.
#include <iostream>

#include "CLI11.hpp"
#include "lkt/cli.hpp"

#ifndef LKT_CORPUS_DEFAULT
#define LKT_CORPUS_DEFAULT ""
#endif

int main(int argc, char** argv) {
    CLI::App app{"latticed total K-theory toolkit"};
    app.require_subcommand(1);

    std::string coefficients = "2,3,4,6", budget = "default", mode, corpusDir = LKT_CORPUS_DEFAULT;
    bool json = false;
    long cap = 3;
    unsigned long long seed = 0;
    std::vector<std::string> args;

    app.add_option("--coefficients", coefficients, "coefficient moduli, comma separated");
    app.add_option("--budget", budget, "node budget for exhaustive searches, or 'default'");
    app.add_flag("--json", json, "machine-readable report");
    app.add_option("--seed", seed, "seed for randomized property checks");
    app.add_option("--corpus-dir", corpusDir, "where names are looked up when no file is given");

    struct Sub {
        const char* name;
        const char* help;
    };
    for (auto s : {Sub{"validate", "build and validate models"},
                   Sub{"compute", "emit the invariant with its Grothendieck recovery"},
                   Sub{"compare", "search for an isomorphism in a given mode"},
                   Sub{"oracle", "finitize and cross-check against the finite monoid routines"},
                   Sub{"corpus", "run the shipped example suite"}}) {
        auto* sc = app.add_subcommand(s.name, s.help);
        sc->fallthrough();
        sc->add_option("args", args, "files (*.lkt) and names");
        if (std::string(s.name) == "compare") sc->add_option("--mode", mode, "graded, lambda or latticed");
        if (std::string(s.name) == "oracle") sc->add_option("--cap", cap, "finitization cap for infinite fibers");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : lkt::cli::kInputError;
    }

    lkt::cli::RunOptions opt;
    opt.command = app.get_subcommands().front()->get_name();
    opt.args = args;
    opt.cap = cap;
    opt.seed = seed;
    opt.corpusDir = corpusDir;
    try {
        opt.N = lkt::CoefficientSet::parse(coefficients);
        if (budget != "default") opt.search.budget = std::stoll(budget);
        if (!mode.empty()) opt.mode = lkt::parseMode(mode);
    } catch (const std::exception& e) {
        std::cerr << "lkt: " << e.what() << "\n";
        return lkt::cli::kInputError;
    }

    auto res = lkt::cli::run(opt);
    auto ts = lkt::report::timestamp();
    std::cout << (json ? lkt::report::renderJson(res.doc, ts) : lkt::report::renderText(res.doc, ts));
    return res.exitCode;
}
