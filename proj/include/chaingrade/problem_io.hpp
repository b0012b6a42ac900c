#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chaingrade/solvers.hpp"

namespace chaingrade {

using Json = nlohmann::ordered_json;

struct RunOptions {
    bool oracle = false;
    double tolerance = 1e-9;
    std::uint64_t seed = 0;
};

// A fully validated problem document. Only the payload members required by
// `kind` are populated.
struct ProblemSpec {
    std::string kind;

    std::optional<BundleShape> shape;
    std::optional<GradingFunction> f;
    std::optional<GradingFunction> g;
    std::vector<double> f_values;  // rd-chain
    std::vector<double> g_values;
    double m = 0.0;
    double M = 1.0;
    std::optional<AnchoredProblem> anchored;
    std::optional<LinearConstraintProblem> linear;
    std::vector<FactorProblem> factors;
    std::optional<std::pair<double, double>> overhead;  // (a0, b0)
    std::optional<ServerMixProblem> server_mix;
    double scale_c = 2.0;  // check-properties

    RunOptions options;

    // canonical re-serialization of the payload (without options)
    Json normalized;
};

struct ResultDocument {
    Json doc;
    int exit_code = 0;  // 0 ok, 1 numerical degeneracy, 2 input error
};

enum class OutputMode { Human, Machine };

// Parses and validates a JSON problem document. Throws SpecError carrying
// the offending field path; syntax errors report line and column.
ProblemSpec parse_spec(const std::string& text);

// Dispatches the spec to the engines and solvers. Engine errors (infeasible
// targets, budget overruns, invalid values) come back as structured error
// documents with exit code 2, not exceptions. Honors CHAINGRADE_ENUM_BUDGET.
ResultDocument run_spec(const ProblemSpec& spec);

// Machine mode emits the document as one line of JSON with all reals in
// scientific notation at 17 significant digits; human mode renders aligned
// key/value lines.
std::string format_result(const ResultDocument& result, OutputMode mode);

// The canonical serialization used by machine mode.
std::string write_json(const Json& v);

// Ready-to-run sample documents covering every kind, as (filename, text).
std::vector<std::pair<std::string, std::string>> worked_examples();

}  // namespace chaingrade
