// Command dispatch behind the lkt executable: validate, compute, compare, oracle, corpus.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lkt/dsl.hpp"
#include "lkt/report.hpp"

namespace lkt::cli {

enum Exit { kOk = 0, kDistinct = 1, kInputError = 2, kBudget = 3 };

struct RunOptions {
    std::string command;
    std::vector<std::string> args;  // *.lkt files and names; "mode X" is accepted here too
    std::optional<CompareMode> mode;
    CoefficientSet N = CoefficientSet::defaults();
    IsoSearchOptions search;
    long cap = 3;  // finitization cap for infinite fibers
    unsigned long long seed = 0;
    std::string corpusDir;  // names are looked up here when no file is given
};

struct RunResult {
    int exitCode = kOk;
    report::Document doc;
};

RunResult run(const RunOptions& opt);

// graded-isomorphic, not Lambda-isomorphic pair as stored in corpus/beta-variant-pair.json
report::Json betaPairJson(const BetaPair& p);
// rebuilds member 0 or 1 of a stored pair: standard structure with the stored beta maps
LambdaModule betaPairMember(const report::Json& j, int which);

std::string readFile(const std::string& path);

}  // namespace lkt::cli
