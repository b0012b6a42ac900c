#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaingrade/lattice.hpp"

namespace chaingrade {

struct ChainDivergence {
    double value;     // nats; -infinity when degenerate
    bool degenerate;  // some step had dF > 0 against dG = 0
};

// Relative divergence of F from G along a single chain given as value tables
// of equal length n+1 >= 2:
//
//   D(F||G) = -sum_k ln(d_k F / d_k G) * d_k F,  k = 1..n
//
// with the conventions d_k F = 0 contributes 0, and d_k F > 0 with
// d_k G = 0 yields -infinity flagged as degenerate. Both tables must be
// non-decreasing.
ChainDivergence rd_chain(std::span<const double> f_values, std::span<const double> g_values);

// 0, 1, ..., n — the natural grading of a single chain
std::vector<double> natural_chain_values(int n);

struct DivergenceResult {
    double value = 0.0;
    std::optional<MaximalChain> witness;  // a chain attaining the minimum
    bool degenerate = false;
};

// D(F||G) over the bundle: the minimum of the chain divergence over all
// maximal chains, computed as a shortest path in the lattice DAG processed
// in reverse topological order (edge weights may be negative). Ties among
// minimizing chains are broken toward the lexicographically smallest
// step_dims sequence.
DivergenceResult rd_bundle_dp(const GradingFunction& f, const GradingFunction& g);

// Same quantity by exhaustive evaluation of every maximal chain; the
// reference the DP is checked against. Throws BudgetExceededError when the
// chain count exceeds `budget`.
DivergenceResult rd_bundle_oracle(const GradingFunction& f, const GradingFunction& g,
                                  std::uint64_t budget = kDefaultEnumerationBudget);

// D(F_hat || N) over the bundle for the standardized F_hat = (F-m)/(M-m).
// Satisfies D(F||N) = (M-m) * H - (M-m) * ln(M-m). Requires M > m.
double disorder_entropy(const GradingFunction& f);

struct IdentityCheck {
    std::string name;
    double lhs;
    double rhs;
    double difference;
    bool pass;
};

struct ScalingIdentityReport {
    std::vector<IdentityCheck> checks;
    bool all_pass;
};

// Numerically verifies the linear-transformation identities, c > 0:
//   D(c+F || c+G) = D(F||G)
//   D(cF || cG)   = c D(F||G)
//   D(cF || N)    = c D(F||N) - c (M-m) ln c
ScalingIdentityReport check_scaling_identities(const GradingFunction& f,
                                               const GradingFunction& g, double c,
                                               double tolerance = 1e-9);

}  // namespace chaingrade
