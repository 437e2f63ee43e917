#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "lkt/cli.hpp"

using namespace lkt;
using namespace lkt::dsl;
namespace fs = std::filesystem;

namespace {

const CoefficientSet N24({2, 4});

DslError parseError(const std::string& text) {
    try {
        parse(text);
    } catch (const DslError& e) {
        return e;
    }
    FAIL("no error for: " << text);
    return DslError(ErrorCode::Lexical, {}, "");
}

DslError evalError(const std::string& text, const std::string& name) {
    try {
        Evaluator ev(parse(text), N24);
        ev.get(name);
    } catch (const DslError& e) {
        return e;
    }
    FAIL("no error evaluating " << name);
    return DslError(ErrorCode::Lexical, {}, "");
}

struct Proc {
    int code = -1;
    std::string out;
};

Proc runCli(const std::string& args) {
    const char* cli = std::getenv("LKT_CLI");
    REQUIRE(cli != nullptr);
    std::string cmd = std::string(cli) + " --corpus-dir " + LKT_CORPUS_DIR + " " + args + " 2>/dev/null";
    Proc p;
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, n);
    int st = pclose(f);
    p.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return p;
}

std::string dropGenerated(const std::string& s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = s.find('\n', i);
        if (j == std::string::npos) j = s.size();
        std::string line = s.substr(i, j - i);
        if (line.find("generated") == std::string::npos) out += line + "\n";
        i = j + 1;
    }
    return out;
}

std::string tempFile(const std::string& name, const std::string& text) {
    auto dir = fs::temp_directory_path() / "lkt_cli_test";
    fs::create_directories(dir);
    auto p = dir / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_CASE("parser examples") {
    auto p = parse("block O4 { kind = kirchberg; k0 = Z/3; unit = 1; k1 = Z^0; }");
    REQUIRE(p.stmts.size() == 1);
    CHECK(p.stmts[0].kind == Stmt::Kind::Block);
    CHECK(p.stmts[0].entries.size() == 4);
    CHECK(p.stmts[0].entries[2].value.tuples == std::vector<Tuple>{{1}});
    CHECK(parse("").stmts.empty());
    CHECK(parse("  # only a comment\n").stmts.empty());

    auto e = evalError("block A { kind = kirchberg; k0 = Z; unit = 1; }\nlet E = extension(B, A, class = split);", "E");
    CHECK(e.code == ErrorCode::Reference);
    CHECK(e.pos == Pos{2, 19});
}

TEST_CASE("error codes and positions") {
    auto lexical = parseError("block A {\n  kind = @; }");
    CHECK(lexical.code == ErrorCode::Lexical);
    CHECK(lexical.pos == Pos{2, 10});

    auto missingSemi = parseError("block A { kind = compacts }");
    CHECK(missingSemi.code == ErrorCode::Syntax);
    CHECK(missingSemi.pos == Pos{1, 27});
    CHECK(missingSemi.expected == std::vector<std::string>{"';'"});

    auto badKey = parseError("block A { colour = red; }");
    CHECK(badKey.code == ErrorCode::Syntax);
    CHECK(std::find(badKey.expected.begin(), badKey.expected.end(), "layer") != badKey.expected.end());

    auto top = parseError("frobnicate A;");
    CHECK(top.code == ErrorCode::Syntax);
    CHECK(top.expected.size() == 5);

    CHECK(parseError("let X = tensor(A, B);").code == ErrorCode::Syntax);
    CHECK(parseError("compare A B mode fuzzy;").code == ErrorCode::Syntax);
    CHECK(parseError("block A { k0 = Q; }").code == ErrorCode::Syntax);

    auto dup = evalError("block A { kind = compacts; }\nblock A { kind = compacts; }", "A");
    CHECK(dup.code == ErrorCode::Reference);
    CHECK(dup.pos == Pos{2, 1});
    CHECK(evalError("let A = unitize(B);\nlet B = unitize(A);", "A").code == ErrorCode::Reference);

    auto unital = evalError("block O4 { kind = kirchberg; k0 = Z/3; unit = 1; }\nlet U = unitize(O4);", "U");
    CHECK(unital.code == ErrorCode::Type);
    CHECK(unital.pos == Pos{2, 9});
    CHECK(evalError("block C { kind = stablyFiniteSimple; k0 = Z; cone = (1, 0); }", "C").code == ErrorCode::Type);
    CHECK(evalError("block C { kind = bogus; }", "C").code == ErrorCode::Type);
    CHECK(evalError("block x { kind = extclass; }\nlet Y = unitize(x);", "Y").code == ErrorCode::Type);
    CHECK(evalError("block A { kind = compacts; }\nlet E = extension(A, A, class = nothere);", "E").code == ErrorCode::Reference);
}

TEST_CASE("serialization round trip") {
    std::string text =
        "block C { kind = stablyFiniteSimple; k0 = Z^1 + Z/2; k1 = 0; cone = (1,0), (0,1); unit = (1, 0);\n"
        "  layer = (1, 0) periods (1, 0), (0, 1) | (0, 1); }\n"
        "block c { kind = extclass; k0 = Z; iota0 = [[2]]; pi1 = []; }\n"
        "let S = sum(C, C, C); let E = extension(S, C, class = c);\n"
        "check S; report S; compare S E mode lambda;";
    auto p = parse(text);
    auto s = serialize(p);
    CHECK(parse(s) == p);
    CHECK(serialize(parse(s)) == s);
    CHECK(serialize(parse("block O4 { unit = 1; }")) == "block O4 { unit = 1; }\n");

    int files = 0;
    for (auto& e : fs::directory_iterator(LKT_CORPUS_DIR)) {
        if (e.path().extension() != ".lkt") continue;
        ++files;
        auto prog = parse(cli::readFile(e.path().string()));
        CHECK_MESSAGE(parse(serialize(prog)) == prog, e.path().filename().string());
    }
    CHECK(files >= 7);
}

TEST_CASE("evaluation matches the builders") {
    Evaluator ev(parse(cli::readFile(std::string(LKT_CORPUS_DIR) + "/Ktilde.lkt")), N24);
    CHECK(ev.names() == std::vector<std::string>{"K", "Ktilde"});
    const auto& Kt = ev.get("Ktilde").module;
    BlockSpec k;
    k.kind = BlockSpec::Kind::Compacts;
    k.N = N24;
    CHECK(isoSearchLatticed(Kt, unitize(buildBlock(k)), CompareMode::Latticed).outcome == SearchOutcome::Found);
    CHECK(Kt.lattice.names.back() == "Ktilde");

    // written coordinates: Z/2 + Z/3 is stored as Z/6, unit (1, 1) becomes the generator
    Evaluator ev2(parse("block A { kind = kirchberg; k0 = Z/2 + Z/3; unit = (1, 1); }"), N24);
    const auto& A = ev2.get("A").module;
    CHECK(A.K0(A.lattice.top).torsion == std::vector<Int>{6});
    CHECK(A.K0(A.lattice.top).elementOrder(A.scale.gens[0].comps[0]) == 6);

    Evaluator ev3(parse(cli::readFile(std::string(LKT_CORPUS_DIR) + "/E2.lkt")), N24);
    const auto& E2 = ev3.get("E2");
    REQUIRE(E2.extension.has_value());
    CHECK(E2.module.K0(E2.module.lattice.top).sameType(parseGroup("Z")));
    auto m = canonicalMorphisms(*E2.extension);
    CHECK(checkVExactness(E2.extension->B, E2.module, E2.extension->A, m.iota, m.pi).ok());
}

TEST_CASE("explicit layers") {
    Evaluator ev(parse("block C { kind = stablyFiniteSimple; k0 = Z; cone = (1); unit = 2; layer = (2) periods (1); }"), N24);
    const auto& C = ev.get("C").module;
    CHECK_FALSE(C.layers[1].contains({1}));
    CHECK(C.layers[1].contains({5}));
    CHECK(std::count(C.presets.begin(), C.presets.end(), "explicit layer for C") == 1);

    // the unit must stay in the layer, and layers are closed under addition
    CHECK(evalError("block C { kind = stablyFiniteSimple; k0 = Z; cone = (1); unit = 1; layer = (2) periods (1); }", "C")
              .code == ErrorCode::Type);
    CHECK(evalError("block C { kind = stablyFiniteSimple; k0 = Z; cone = (1); unit = 1; layer = (1) periods (2); }", "C")
              .code == ErrorCode::Type);

    std::string base =
        "block K { kind = compacts; }\n"
        "block A { kind = stablyFiniteSimple; k0 = Z; cone = (1); unit = 1; }\n";
    // same set as the preset, written as two components
    Evaluator ev2(parse(base +
                        "block two { kind = extclass; layer = (0, 1) periods (1, 0), (-1, 0), (0, 2) | (0, 2) periods (1, 0), (-1, 0), (0, 2); }\n"
                        "let E = extension(K, A, class = two);\n"
                        "let F = extension(K, A, class = split);"),
                  N24);
    const auto& E = ev2.get("E").module;
    std::size_t T = E.lattice.top;
    CHECK(E.layers[T].contains({-3, 1}));
    CHECK(E.layers[T].contains({7, 4}));
    CHECK(E.layers[T].components.size() == 2);
    CHECK(std::find(E.presets.begin(), E.presets.end(), kExtensionLayerPreset) == E.presets.end());
    CHECK(std::count(E.presets.begin(), E.presets.end(), "explicit layer for class two") == 1);
    CHECK(isoSearchLatticed(E, ev2.get("F").module, CompareMode::Latticed).outcome == SearchOutcome::Found);

    // a cone that drops negative K coordinates loses scale fullness
    auto e = evalError(base + "block narrow { kind = extclass; layer = (0, 1) periods (1, 0), (0, 1); }\n"
                              "let E = extension(K, A, class = narrow);",
                       "E");
    CHECK(e.code == ErrorCode::Type);
    CHECK(std::string(e.what()).find("scale") != std::string::npos);
}

TEST_CASE("run without the executable") {
    cli::RunOptions opt;
    opt.command = "compare";
    opt.args = {"Ktilde", "KplusO2tilde", "mode", "latticed"};
    opt.corpusDir = LKT_CORPUS_DIR;
    auto r = cli::run(opt);
    CHECK(r.exitCode == cli::kDistinct);
    CHECK(r.doc.results[0]["reason"] == "lattice sizes 3 vs 5");

    opt.command = "validate";
    opt.args = {"nothere"};
    CHECK(cli::run(opt).exitCode == cli::kInputError);

    opt.command = "oracle";
    opt.args = {"O4"};
    auto o = cli::run(opt);
    CHECK(o.exitCode == cli::kOk);
    CHECK(o.doc.results[0]["gr_from_finite_monoid"] == "Z^0 + Z/3");
    CHECK(o.doc.results[0]["gr_from_invariant"] == "Z^0 + Z/3");
}

TEST_CASE("executable exit codes and reports") {
    auto v = runCli("validate O4");
    CHECK(v.code == 0);
    CHECK(v.out.find("valid     yes") != std::string::npos);

    auto c = runCli("compare Ktilde KplusO2tilde mode latticed");
    CHECK(c.code == 1);
    CHECK(c.out.find("lattice sizes 3 vs 5") != std::string::npos);

    auto same = runCli("--json compare E1C KtildeE1 --mode latticed");
    CHECK(same.code == 0);
    auto j = report::Json::parse(same.out);
    CHECK(j["schema"] == "lkt-report/1");
    CHECK(j["results"][0]["verdict"] == "isomorphic");
    CHECK(j["results"][0]["witness"]["lattice_map"]["E1C"] == "KtildeE1");

    CHECK(runCli("--budget 1 compare E1C KtildeE1").code == 3);
    CHECK(runCli("validate " + tempFile("broken.lkt", "block A { kind = ; }")).code == 2);
    CHECK(runCli("compare O4").code == 2);
    CHECK(runCli("--coefficients 2,x validate O4").code == 2);
    CHECK(runCli("frobnicate").code == 2);

    auto o = runCli("oracle O4 --budget default");
    CHECK(o.code == 0);
    CHECK(o.out.find("grothendieck_agrees        yes") != std::string::npos);

    // presets are named once even when several models fire them
    auto p = runCli("--json validate " + std::string(LKT_CORPUS_DIR) + "/E1.lkt");
    auto pj = report::Json::parse(p.out);
    CHECK(std::count(pj["presets"].begin(), pj["presets"].end(), kExtensionLayerPreset) == 1);

    CHECK(pj["results"][0]["canonical_sequence_exact"] == true);
    CHECK(runCli("validate E1.lkt").code == 2);  // relative to the working directory, not the corpus

    std::string e1 = std::string(LKT_CORPUS_DIR) + "/E1.lkt";
    auto a = runCli("--json compare " + e1), b = runCli("--json compare " + e1);
    CHECK(a.code == 0);
    CHECK(dropGenerated(a.out) == dropGenerated(b.out));
    CHECK(runCli("corpus --seed 3").code == 0);
}
