#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "chaingrade/divergence.hpp"
#include "chaingrade/lattice.hpp"

namespace chaingrade {

// Grade values pinned at given chain positions: F(0) = m and F(pos) = value
// for each anchor; the last anchor must sit at position n and defines M.
// Positions are strictly increasing in 1..n; values strictly increasing in
// strict mode, non-decreasing in weak mode.
struct AnchoredProblem {
    int n = 0;
    double m = 0.0;
    std::vector<std::pair<int, double>> anchors;
    Monotonicity mode = Monotonicity::Strict;
};

// Increments f_1..f_n >= 0 with sum(f) = spread (so F(0) = 0, F(n) = spread)
// and sum(c_i f_i) = target.
struct LinearConstraintProblem {
    int n = 0;
    double spread = 1.0;  // M, with m = 0
    std::vector<double> coefficients;
    double target = 0.0;
};

// One server type: its divergence D_r = D(F_r || N_r) and grade range.
struct ServerType {
    double divergence = 0.0;
    double lo = 0.0;  // m_r
    double hi = 1.0;  // M_r, hi > lo
};

struct ServerMixProblem {
    std::vector<ServerType> servers;
};

// D(F || N) of a single-chain cost table and its range, for feeding a
// ServerMixProblem from raw cost data.
ServerType server_type_from_costs(std::span<const double> cost_values);

struct MrdpSolution {
    std::optional<GradingFunction> gf;   // optimal grading function, when one exists
    std::vector<double> probabilities;   // server-mix only
    double objective = 0.0;              // nats
    std::vector<double> multipliers;     // (alpha, beta) or (lambda)
    int iterations = 0;
    bool boundary = false;               // optimum sits on the domain boundary
};

// No constraints beyond the grade range: the optimum is the linear profile
// F(i) = m + N(i) (M-m)/K with objective (M-m) ln K - (M-m) ln(M-m).
MrdpSolution solve_unconstrained(const BundleShape& shape, double m, double M);

// Maximum-divergence interpolation of anchored grades on the chain 0..n.
// The optimum is piecewise linear between consecutive anchors with slope
// dM_k/dn_k, and its value is sum_k [dM_k ln dn_k - dM_k ln dM_k].
MrdpSolution solve_anchored(const AnchoredProblem& p);

// Maximum-entropy increments under one linear constraint. Feasible iff
// min c <= target/spread <= max c. Interior optima have the exponential
// form f_i = a b^{c_i}, with b found by bisection on the weighted-mean
// equation and a fixed by normalization; targets at an endpoint of [min c,
// max c] return the boundary-flagged limiting distribution.
MrdpSolution solve_linear_constraint(const LinearConstraintProblem& p);

// Restriction to grading functions of the height alone. Reduces to the
// single chain 0..K: delegates to solve_unconstrained without a constraint,
// to solve_linear_constraint with one. The constraint must have n = K and
// spread = M - m.
MrdpSolution solve_height_dependent(const BundleShape& shape, double m, double M,
                                    const std::optional<LinearConstraintProblem>& constraint = {});

struct UnconstrainedFactor {
    int n = 0;
    double lo = 0.0;
    double hi = 1.0;
};

using FactorProblem = std::variant<UnconstrainedFactor, AnchoredProblem, LinearConstraintProblem>;

// Independent per-chain subproblems assembled into a separable grading
// function on the product; the objective is the sum of factor objectives.
MrdpSolution solve_separable(const std::vector<FactorProblem>& factors);

// Adds a server overhead a0 + b0 * N to a separable solution: each factor
// F_r becomes F_r + b0 * N_r (a0 shifts the whole function). The objective
// is recomputed on the bundle.
MrdpSolution add_linear_overhead(const MrdpSolution& solution, double a0, double b0);

// Maximizes sum_r [p_r D_r - (M_r - m_r) p_r ln p_r] over the probability
// simplex. Interior optima are p_r = exp(-1 + (D_r - lambda)/(M_r - m_r))
// with lambda found by bisection on sum p_r = 1.
MrdpSolution solve_server_mix(const ServerMixProblem& p);

// The objective above at a given distribution (0 ln 0 = 0). p must be
// non-negative and sum to 1 within 1e-9.
double objective_server_mix(std::span<const double> p, const ServerMixProblem& problem);

}  // namespace chaingrade
