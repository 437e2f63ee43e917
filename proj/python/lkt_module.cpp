#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lkt/cli.hpp"

namespace py = pybind11;
using namespace lkt;

namespace {

IntegerMatrix toMatrix(const std::vector<std::vector<long>>& rows) {
    return IntegerMatrix::fromRows(rows, rows.empty() ? 0 : rows[0].size());
}

std::vector<std::vector<long>> fromMatrix(const IntegerMatrix& m) {
    std::vector<std::vector<long>> out(m.rows, std::vector<long>(m.cols));
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out[i][j] = toLong(m(i, j));
    return out;
}

// one evaluated value from .lkt text
struct Model {
    std::shared_ptr<dsl::Evaluator> ev;
    std::string name;
    const dsl::Evaluated& value() const { return ev->get(name); }
    const LatticedKModule& X() const { return value().module; }
};

Model load(const std::string& text, const std::string& name, const std::string& coefficients) {
    auto ev = std::make_shared<dsl::Evaluator>(dsl::parse(text), CoefficientSet::parse(coefficients));
    Model m{ev, name};
    m.value();
    return m;
}

}  // namespace

PYBIND11_MODULE(_lkt, m) {
    m.doc() = "latticed total K-theory kernel";

    py::register_exception<dsl::DslError>(m, "DslError", PyExc_ValueError);

    m.def("smith", [](const std::vector<std::vector<long>>& rows) {
        auto s = smithNormalForm(toMatrix(rows));
        return py::make_tuple(fromMatrix(s.U), fromMatrix(s.S), fromMatrix(s.V));
    }, "Smith normal form: returns (U, S, V) with U M V = S");

    m.def("canonical_group", [](const std::string& g) { return groupToSyntax(parseGroup(g)); });

    m.def("roundtrip", [](const std::string& text) { return dsl::serialize(dsl::parse(text)); },
          "parse .lkt text and print it back in canonical form");

    m.def("run_json", [](const std::string& command, const std::vector<std::string>& args, const std::string& coefficients,
                         long long budget, const std::string& mode, long cap, unsigned long long seed,
                         const std::string& corpusDir) {
        cli::RunOptions opt;
        opt.command = command;
        opt.args = args;
        opt.N = CoefficientSet::parse(coefficients);
        if (budget > 0) opt.search.budget = budget;
        if (!mode.empty()) opt.mode = parseMode(mode);
        opt.cap = cap;
        opt.seed = seed;
        opt.corpusDir = corpusDir;
        auto r = cli::run(opt);
        return py::make_tuple(r.exitCode, report::renderJson(r.doc, ""));
    }, py::arg("command"), py::arg("args"), py::arg("coefficients") = "2,3,4,6", py::arg("budget") = 0,
       py::arg("mode") = "", py::arg("cap") = 3, py::arg("seed") = 0, py::arg("corpus_dir") = "");

    m.def("beta_pair_json", [](const std::string& g0, const std::string& g1, const std::vector<long>& N, long maxOrder) {
        auto p = findGradedNotLambdaPair(parseGroup(g0), parseGroup(g1), CoefficientSet(N), maxOrder);
        if (!p.found) return std::string();
        return cli::betaPairJson(p).dump(2);
    }, py::arg("g0") = "Z/2+Z/4", py::arg("g1") = "Z/2", py::arg("coefficients") = std::vector<long>{2, 4},
       py::arg("max_order") = 32);

    py::class_<Model>(m, "Model")
        .def_readonly("name", &Model::name)
        .def("ideals", [](const Model& s) { return s.X().lattice.names; })
        .def("k0", [](const Model& s, const std::string& ideal) {
            return groupToSyntax(s.X().K0(s.X().lattice.index(ideal)));
        })
        .def("layer", [](const Model& s, const std::string& ideal) {
            return s.X().layers[s.X().lattice.index(ideal)].str();
        })
        .def("in_layer", [](const Model& s, const std::string& ideal, const std::vector<long>& v) {
            return s.X().layers[s.X().lattice.index(ideal)].contains(Vec(v.begin(), v.end()));
        })
        .def("is_valid", [](const Model& s) { return validateLatticedKModule(s.X()).ok(); })
        .def("failures", [](const Model& s) {
            std::vector<std::string> out;
            for (auto& c : validateLatticedKModule(s.X()).checks)
                if (!c.ok) out.push_back(c.name);
            return out;
        })
        .def("ideal_count", [](const Model& s) { return idealsOfLatticed(s.X()).size(); })
        .def("is_infinite", [](const Model& s) { return detectInfinite(s.X()).verdict; })
        .def("has_cancellation", [](const Model& s) { return detectCancellation(s.X()).verdict; })
        .def("grothendieck_k0", [](const Model& s) { return groupToSyntax(grothendieckRecover(s.X()).fiber.G(0)); })
        .def("finitized_size", [](const Model& s, long cap) { return finitizeV(s.X(), cap).monoid.size(); },
             py::arg("cap") = 0)
        .def("presets", [](const Model& s) { return s.X().presets; })
        .def("to_json", [](const Model& s) { return report::moduleJson(s.X()).dump(); });

    m.def("load", &load, py::arg("text"), py::arg("name"), py::arg("coefficients") = "2,3,4,6",
          "evaluate one name of a .lkt program");

    m.def("compare", [](const Model& a, const Model& b, const std::string& mode, long long budget) {
        IsoSearchOptions opt;
        if (budget > 0) opt.budget = budget;
        auto r = isoSearchLatticed(a.X(), b.X(), parseMode(mode), opt);
        return py::make_tuple(std::string(outcomeName(r.outcome)), r.reason, r.complete);
    }, py::arg("a"), py::arg("b"), py::arg("mode") = "latticed", py::arg("budget") = 0,
       "isomorphism search; returns (outcome, reason, complete)");
}
