#include "chaingrade/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "chaingrade/errors.hpp"

namespace chaingrade {

namespace {

constexpr int kIterationCap = 10'000;
constexpr double kMeanTolerance = 1e-12;
constexpr double kSimplexTolerance = 1e-12;
constexpr double kUnderflowFloor = 1e-300;

double neg_xlogx_sum(std::span<const double> values) {
    double sum = 0.0;
    for (double x : values) {
        if (x > 0.0) sum -= x * std::log(x);
    }
    return sum;
}

struct ExpFamily {
    std::vector<double> weights;  // normalized to sum 1
    double log_partition;         // ln sum_i exp(s c_i)
    double mean;                  // sum_i c_i weights_i
};

// softmax of s * c, evaluated with the usual max shift
ExpFamily exp_family(std::span<const double> c, double s) {
    ExpFamily out;
    out.weights.resize(c.size());
    double shift = -std::numeric_limits<double>::infinity();
    for (double ci : c) shift = std::max(shift, s * ci);
    double z = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double w = std::exp(s * c[i] - shift);
        out.weights[i] = w;
        z += w;
        weighted += c[i] * w;
    }
    for (double& w : out.weights) w /= z;
    out.log_partition = shift + std::log(z);
    out.mean = weighted / z;
    return out;
}

GradingFunction cumulative_chain_gf(int n, double base, std::span<const double> increments) {
    std::vector<double> values(static_cast<std::size_t>(n) + 1);
    values[0] = base;
    bool strict = true;
    for (int i = 0; i < n; ++i) {
        values[static_cast<std::size_t>(i) + 1] = values[static_cast<std::size_t>(i)] + increments[i];
        strict = strict && increments[i] > 0.0;
    }
    return GradingFunction::height_dependent(BundleShape({n}), std::move(values),
                                             strict ? Monotonicity::Strict : Monotonicity::Weak);
}

}  // namespace

ServerType server_type_from_costs(std::span<const double> cost_values) {
    const int n = static_cast<int>(cost_values.size()) - 1;
    if (n < 1) throw std::invalid_argument("cost table needs at least two values");
    const double lo = cost_values.front();
    const double hi = cost_values.back();
    if (!(hi > lo)) throw std::invalid_argument("degenerate cost range: M must exceed m");
    const ChainDivergence d = rd_chain(cost_values, natural_chain_values(n));
    return ServerType{d.value, lo, hi};
}

MrdpSolution solve_unconstrained(const BundleShape& shape, double m, double M) {
    if (!(M > m)) throw std::invalid_argument("degenerate grading range: M must exceed m");
    const int K = shape.total_steps();
    std::vector<double> values(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        values[static_cast<std::size_t>(k)] = m + (M - m) * k / K;
    }
    MrdpSolution sol;
    sol.gf = GradingFunction::height_dependent(shape, std::move(values));
    sol.objective = (M - m) * std::log(K) - (M - m) * std::log(M - m);
    return sol;
}

MrdpSolution solve_anchored(const AnchoredProblem& p) {
    if (p.n < 1) throw std::invalid_argument("chain needs at least one step");
    if (p.anchors.empty()) throw std::invalid_argument("at least one anchor required");
    const bool strict = (p.mode == Monotonicity::Strict);
    int prev_pos = 0;
    double prev_value = p.m;
    for (const auto& [pos, value] : p.anchors) {
        if (pos <= prev_pos || pos > p.n) {
            throw std::invalid_argument("anchor positions must be strictly increasing in 1..n");
        }
        if (strict ? !(value > prev_value) : !(value >= prev_value)) {
            throw std::invalid_argument(strict ? "anchor values must be strictly increasing"
                                               : "anchor values must be non-decreasing");
        }
        prev_pos = pos;
        prev_value = value;
    }
    if (p.anchors.back().first != p.n) {
        throw std::invalid_argument("final anchor must sit at position n");
    }

    // blockwise uniform increments: slope dM_k / dn_k on (n_{k-1}, n_k]
    std::vector<double> values(static_cast<std::size_t>(p.n) + 1);
    values[0] = p.m;
    double objective = 0.0;
    bool boundary = false;
    int p0 = 0;
    double v0 = p.m;
    for (const auto& [p1, v1] : p.anchors) {
        const double dm = v1 - v0;
        const double dn = p1 - p0;
        const double slope = dm / dn;
        for (int i = p0 + 1; i < p1; ++i) {
            values[static_cast<std::size_t>(i)] = v0 + slope * (i - p0);
        }
        values[static_cast<std::size_t>(p1)] = v1;
        if (dm > 0.0) {
            objective += dm * std::log(dn) - dm * std::log(dm);
        } else {
            boundary = true;
        }
        p0 = p1;
        v0 = v1;
    }

    MrdpSolution sol;
    sol.gf = GradingFunction::height_dependent(BundleShape({p.n}), std::move(values),
                                               boundary ? Monotonicity::Weak
                                                        : Monotonicity::Strict);
    sol.objective = objective;
    sol.boundary = boundary;
    return sol;
}

MrdpSolution solve_linear_constraint(const LinearConstraintProblem& p) {
    if (p.n < 1) throw std::invalid_argument("chain needs at least one step");
    if (static_cast<int>(p.coefficients.size()) != p.n) {
        throw std::invalid_argument("need one coefficient per increment");
    }
    if (!(p.spread > 0.0)) throw std::invalid_argument("grade spread M must be positive");
    const double t = p.target / p.spread;
    const auto [cmin_it, cmax_it] =
        std::minmax_element(p.coefficients.begin(), p.coefficients.end());
    const double cmin = *cmin_it;
    const double cmax = *cmax_it;
    if (t < cmin || t > cmax) {
        throw InfeasibleError("infeasible: target outside [min c, max c]");
    }

    MrdpSolution sol;
    std::vector<double> f(static_cast<std::size_t>(p.n));

    if (cmin == cmax) {
        // the constraints coincide; uniform increments are optimal
        std::fill(f.begin(), f.end(), p.spread / p.n);
        sol.multipliers = {-1.0 - std::log(p.spread / p.n), 0.0};
    } else if (t == cmin || t == cmax) {
        // limiting solution: all mass spread uniformly over the achieving
        // coefficients; the interior exponential form cannot represent it
        const double hit = (t == cmin) ? cmin : cmax;
        const auto matches = static_cast<double>(
            std::count(p.coefficients.begin(), p.coefficients.end(), hit));
        for (int i = 0; i < p.n; ++i) {
            f[static_cast<std::size_t>(i)] = (p.coefficients[static_cast<std::size_t>(i)] == hit)
                                                 ? p.spread / matches
                                                 : 0.0;
        }
        sol.boundary = true;
    } else {
        // f_i = a b^{c_i}; the weighted mean sum c_i b^{c_i} / sum b^{c_i}
        // increases monotonically in b, so bisect on s = ln b
        auto mean_at = [&](double s) { return exp_family(p.coefficients, s).mean; };
        double lo = 0.0, hi = 0.0;
        int iterations = 0;
        double s = 0.0;
        const double m0 = mean_at(0.0);
        bool solved = (m0 == t);
        if (!solved) {
            if (m0 < t) {
                hi = 1.0;
                while (mean_at(hi) < t) {
                    lo = hi;
                    hi *= 2.0;
                    if (hi > 1e15) throw ConvergenceError("bracket expansion failed");
                }
            } else {
                lo = -1.0;
                while (mean_at(lo) > t) {
                    hi = lo;
                    lo *= 2.0;
                    if (lo < -1e15) throw ConvergenceError("bracket expansion failed");
                }
            }
            while (iterations < kIterationCap) {
                ++iterations;
                s = 0.5 * (lo + hi);
                const double mid = mean_at(s);
                if (std::abs(mid - t) <= kMeanTolerance) {
                    solved = true;
                    break;
                }
                if (mid < t) {
                    lo = s;
                } else {
                    hi = s;
                }
                if (hi - lo <= 1e-16 * std::max({1.0, std::abs(lo), std::abs(hi)})) {
                    solved = true;  // the mean map is flat at double precision here
                    break;
                }
            }
            if (!solved) throw ConvergenceError("no convergence within iteration cap");
        }
        const ExpFamily fam = exp_family(p.coefficients, s);
        for (int i = 0; i < p.n; ++i) {
            f[static_cast<std::size_t>(i)] = p.spread * fam.weights[static_cast<std::size_t>(i)];
        }
        const double log_a = std::log(p.spread) - fam.log_partition;
        sol.multipliers = {-1.0 - log_a, -s};  // (alpha, beta)
        sol.iterations = iterations;
    }

    sol.objective = neg_xlogx_sum(f);
    sol.gf = cumulative_chain_gf(p.n, 0.0, f);
    return sol;
}

MrdpSolution solve_height_dependent(const BundleShape& shape, double m, double M,
                                    const std::optional<LinearConstraintProblem>& constraint) {
    if (!constraint) return solve_unconstrained(shape, m, M);
    const int K = shape.total_steps();
    if (constraint->n != K) {
        throw std::invalid_argument("constraint must cover all K bundle steps");
    }
    if (std::abs(constraint->spread - (M - m)) > 1e-12 * std::max(1.0, std::abs(M - m))) {
        throw std::invalid_argument("constraint spread must equal M - m");
    }
    MrdpSolution chain = solve_linear_constraint(*constraint);
    const std::vector<double>& chain_values = chain.gf->values();
    std::vector<double> values(chain_values.size());
    for (std::size_t k = 0; k < values.size(); ++k) values[k] = m + chain_values[k];
    MrdpSolution sol = std::move(chain);
    sol.gf = GradingFunction::height_dependent(shape, std::move(values),
                                               sol.gf->monotonicity());
    return sol;
}

MrdpSolution solve_separable(const std::vector<FactorProblem>& factors) {
    if (factors.empty()) throw std::invalid_argument("at least one factor required");
    MrdpSolution sol;
    std::vector<int> steps;
    std::vector<std::vector<double>> tables;
    bool weak = false;
    for (const FactorProblem& factor : factors) {
        MrdpSolution sub = std::visit(
            [](const auto& f) -> MrdpSolution {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, UnconstrainedFactor>) {
                    return solve_unconstrained(BundleShape({f.n}), f.lo, f.hi);
                } else if constexpr (std::is_same_v<T, AnchoredProblem>) {
                    return solve_anchored(f);
                } else {
                    return solve_linear_constraint(f);
                }
            },
            factor);
        steps.push_back(static_cast<int>(sub.gf->values().size()) - 1);
        tables.push_back(sub.gf->values());
        weak = weak || sub.gf->monotonicity() == Monotonicity::Weak;
        sol.objective += sub.objective;
        sol.iterations += sub.iterations;
        sol.boundary = sol.boundary || sub.boundary;
        sol.multipliers.insert(sol.multipliers.end(), sub.multipliers.begin(),
                               sub.multipliers.end());
    }
    sol.gf = GradingFunction::separable(BundleShape(std::move(steps)), std::move(tables),
                                        weak ? Monotonicity::Weak : Monotonicity::Strict);
    return sol;
}

MrdpSolution add_linear_overhead(const MrdpSolution& solution, double a0, double b0) {
    if (!solution.gf || solution.gf->variant() != GradingFunction::Variant::Separable) {
        throw std::invalid_argument("solution does not carry a separable grading function");
    }
    if (a0 < 0.0 || b0 < 0.0) {
        throw std::invalid_argument("overhead parameters must be non-negative");
    }
    auto tables = solution.gf->factor_values();
    for (auto& table : tables) {
        for (std::size_t i = 0; i < table.size(); ++i) table[i] += b0 * static_cast<double>(i);
    }
    for (double& v : tables.front()) v += a0;

    MrdpSolution out = solution;
    out.gf = GradingFunction::separable(solution.gf->shape(), std::move(tables),
                                        solution.gf->monotonicity());
    out.objective =
        rd_bundle_dp(*out.gf, GradingFunction::natural_height(out.gf->shape())).value;
    return out;
}

MrdpSolution solve_server_mix(const ServerMixProblem& p) {
    const std::size_t R = p.servers.size();
    if (R < 1) throw std::invalid_argument("at least one server type required");
    for (const ServerType& s : p.servers) {
        if (!(s.hi > s.lo)) throw std::invalid_argument("degenerate grade range: M must exceed m");
        if (!std::isfinite(s.divergence)) {
            throw std::invalid_argument("server divergence must be finite");
        }
    }

    MrdpSolution sol;
    if (R == 1) {
        sol.probabilities = {1.0};
        sol.multipliers = {p.servers[0].divergence - (p.servers[0].hi - p.servers[0].lo)};
        sol.objective = p.servers[0].divergence;
        return sol;
    }

    bool symmetric = true;
    for (const ServerType& s : p.servers) {
        symmetric = symmetric && s.divergence == p.servers[0].divergence &&
                    (s.hi - s.lo) == (p.servers[0].hi - p.servers[0].lo);
    }
    if (symmetric) {
        const double delta = p.servers[0].hi - p.servers[0].lo;
        const double uniform = 1.0 / static_cast<double>(R);
        sol.probabilities.assign(R, uniform);
        sol.multipliers = {p.servers[0].divergence - delta * (1.0 + std::log(uniform))};
        sol.objective = objective_server_mix(sol.probabilities, p);
        return sol;
    }

    // p_r(lambda) = exp(-1 + (D_r - lambda)/delta_r) is strictly decreasing
    // in lambda, so bisect on sum p_r = 1
    auto mass_at = [&](double lambda) {
        double sum = 0.0;
        for (const ServerType& s : p.servers) {
            sum += std::exp(-1.0 + (s.divergence - lambda) / (s.hi - s.lo));
        }
        return sum;
    };
    double lo = 0.0, hi = 0.0;
    double lambda = 0.0;
    int iterations = 0;
    const double s0 = mass_at(0.0);
    bool solved = std::abs(s0 - 1.0) <= kSimplexTolerance;
    if (!solved) {
        if (s0 > 1.0) {
            hi = 1.0;
            while (mass_at(hi) > 1.0) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e15) throw ConvergenceError("bracket expansion failed");
            }
        } else {
            lo = -1.0;
            while (mass_at(lo) < 1.0) {
                hi = lo;
                lo *= 2.0;
                if (lo < -1e15) throw ConvergenceError("bracket expansion failed");
            }
        }
        while (iterations < kIterationCap) {
            ++iterations;
            lambda = 0.5 * (lo + hi);
            const double mass = mass_at(lambda);
            if (std::abs(mass - 1.0) <= kSimplexTolerance) {
                solved = true;
                break;
            }
            if (mass > 1.0) {
                lo = lambda;
            } else {
                hi = lambda;
            }
            if (hi - lo <= 1e-16 * std::max({1.0, std::abs(lo), std::abs(hi)})) {
                solved = true;
                break;
            }
        }
        if (!solved) throw ConvergenceError("no convergence within iteration cap");
    }

    sol.probabilities.resize(R);
    double total = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
        double pr =
            std::exp(-1.0 + (p.servers[r].divergence - lambda) / (p.servers[r].hi - p.servers[r].lo));
        if (pr < kUnderflowFloor) {
            pr = 0.0;
            sol.boundary = true;
        }
        sol.probabilities[r] = pr;
        total += pr;
    }
    for (double& pr : sol.probabilities) pr /= total;
    sol.multipliers = {lambda};
    sol.iterations = iterations;
    sol.objective = objective_server_mix(sol.probabilities, p);
    return sol;
}

double objective_server_mix(std::span<const double> p, const ServerMixProblem& problem) {
    if (p.size() != problem.servers.size()) {
        throw std::invalid_argument("distribution size must match server count");
    }
    double total = 0.0;
    for (double pr : p) {
        if (pr < 0.0) throw std::invalid_argument("invalid distribution: negative probability");
        total += pr;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("invalid distribution: probabilities must sum to 1");
    }
    double objective = 0.0;
    for (std::size_t r = 0; r < p.size(); ++r) {
        const ServerType& s = problem.servers[r];
        objective += p[r] * s.divergence;
        if (p[r] > 0.0) objective -= (s.hi - s.lo) * p[r] * std::log(p[r]);
    }
    return objective;
}

}  // namespace chaingrade
