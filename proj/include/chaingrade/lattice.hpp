#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace chaingrade {

enum class Monotonicity { Strict, Weak };

// Position in a chain bundle, one index per bundled chain.
struct IndexVector {
    std::vector<int> components;

    // height N(i) = sum of components
    int height() const;

    bool operator==(const IndexVector&) const = default;
};

// componentwise partial order: a precedes-or-equals b
bool dominated_by(const IndexVector& a, const IndexVector& b);

// Direct product of R finite chains, identified by their step counts
// (n_1, ..., n_R). Chain r has n_r + 1 elements indexed 0..n_r.
class BundleShape {
public:
    explicit BundleShape(std::vector<int> steps);

    int num_chains() const { return static_cast<int>(steps_.size()); }
    const std::vector<int>& steps() const { return steps_; }

    // K, the number of unit steps from bottom to top
    int total_steps() const { return total_steps_; }
    std::uint64_t element_count() const { return element_count_; }

    bool contains(const IndexVector& idx) const;

    // Dense row-major addressing; the last chain's index varies fastest.
    std::uint64_t linear_index(const IndexVector& idx) const;
    IndexVector index_from_linear(std::uint64_t lin) const;
    const std::vector<std::uint64_t>& strides() const { return strides_; }

    IndexVector bottom() const;
    IndexVector top() const;

    bool operator==(const BundleShape&) const = default;

private:
    std::vector<int> steps_;
    std::vector<std::uint64_t> strides_;
    int total_steps_ = 0;
    std::uint64_t element_count_ = 1;
};

// Saturated bottom-to-top path: K+1 elements, each consecutive pair adjacent
// (exactly one component grows, by exactly 1). step_dims[k] names the chain
// incremented at step k.
struct MaximalChain {
    std::vector<IndexVector> path;
    std::vector<int> step_dims;

    static MaximalChain from_step_dims(const BundleShape& shape, std::vector<int> dims);
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;

// K! / (n_1! ... n_R!), saturating at uint64 max on overflow.
std::uint64_t count_maximal_chains(const BundleShape& shape);

// Yields every maximal chain exactly once, in lexicographic order of the
// step_dims sequence. Restartable: construct a fresh enumerator to rewind.
class MaximalChainEnumerator {
public:
    explicit MaximalChainEnumerator(BundleShape shape);

    std::optional<MaximalChain> next();

    // Step dimensions of the next chain, or nullptr when exhausted. The
    // pointee is invalidated by the following call.
    const std::vector<int>* next_step_dims();

private:
    BundleShape shape_;
    std::vector<int> dims_;
    bool fresh_ = true;
    bool done_ = false;
};

// Materializes all maximal chains; throws BudgetExceededError when the chain
// count exceeds `budget`.
std::vector<MaximalChain> enumerate_maximal_chains(
    const BundleShape& shape, std::uint64_t budget = kDefaultEnumerationBudget);

// Order-monotone real function on a bundle. Strict mode requires every
// adjacent step to have a positive increment; weak mode admits zero
// increments (needed to represent boundary optima).
class GradingFunction {
public:
    enum class Variant { Tabulated, HeightDependent, Separable, NaturalHeight };

    // F(i) = N(i), the height function
    static GradingFunction natural_height(BundleShape shape);

    // dense value table in row-major order over all index vectors
    static GradingFunction tabulated(BundleShape shape, std::vector<double> values,
                                     Monotonicity mode = Monotonicity::Strict);

    // F(i) = values[N(i)]; the table covers heights 0..K
    static GradingFunction height_dependent(BundleShape shape, std::vector<double> values,
                                            Monotonicity mode = Monotonicity::Strict);

    // F(i) = sum_r factor_values[r][i_r]
    static GradingFunction separable(BundleShape shape,
                                     std::vector<std::vector<double>> factor_values,
                                     Monotonicity mode = Monotonicity::Strict);

    const BundleShape& shape() const { return shape_; }
    Variant variant() const { return variant_; }
    Monotonicity monotonicity() const { return mode_; }

    double evaluate(const IndexVector& idx) const;

    // (m, M): values at the bottom and top elements
    std::pair<double, double> extremes() const;

    // (F - m) / (M - m); requires M > m
    GradingFunction standardized() const;

    GradingFunction shifted(double c) const;
    GradingFunction scaled(double c) const;  // c > 0

    // row-major dense table over all elements
    std::vector<double> dense_values() const;

    const std::vector<double>& values() const { return values_; }
    const std::vector<std::vector<double>>& factor_values() const { return factors_; }

private:
    GradingFunction(BundleShape shape, Variant variant, Monotonicity mode)
        : shape_(std::move(shape)), variant_(variant), mode_(mode) {}

    void validate_monotone() const;

    BundleShape shape_;
    Variant variant_;
    Monotonicity mode_;
    std::vector<double> values_;
    std::vector<std::vector<double>> factors_;
};

}  // namespace chaingrade
