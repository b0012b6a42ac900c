#include "chaingrade/lattice.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "chaingrade/errors.hpp"

namespace chaingrade {

int IndexVector::height() const {
    return std::accumulate(components.begin(), components.end(), 0);
}

bool dominated_by(const IndexVector& a, const IndexVector& b) {
    if (a.components.size() != b.components.size()) {
        throw std::invalid_argument("index vectors of different bundle arity");
    }
    for (std::size_t t = 0; t < a.components.size(); ++t) {
        if (a.components[t] > b.components[t]) return false;
    }
    return true;
}

BundleShape::BundleShape(std::vector<int> steps) : steps_(std::move(steps)) {
    if (steps_.empty()) throw std::invalid_argument("bundle needs at least one chain");
    for (int n : steps_) {
        if (n < 1) throw std::invalid_argument("every chain needs at least one step");
    }
    total_steps_ = std::accumulate(steps_.begin(), steps_.end(), 0);
    element_count_ = 1;
    for (int n : steps_) {
        const auto w = static_cast<std::uint64_t>(n) + 1;
        if (element_count_ > std::numeric_limits<std::uint64_t>::max() / w) {
            throw std::invalid_argument("bundle element count overflows");
        }
        element_count_ *= w;
    }
    strides_.assign(steps_.size(), 1);
    for (int r = static_cast<int>(steps_.size()) - 2; r >= 0; --r) {
        strides_[r] = strides_[r + 1] * (static_cast<std::uint64_t>(steps_[r + 1]) + 1);
    }
}

bool BundleShape::contains(const IndexVector& idx) const {
    if (idx.components.size() != steps_.size()) return false;
    for (std::size_t r = 0; r < steps_.size(); ++r) {
        if (idx.components[r] < 0 || idx.components[r] > steps_[r]) return false;
    }
    return true;
}

std::uint64_t BundleShape::linear_index(const IndexVector& idx) const {
    if (!contains(idx)) throw std::out_of_range("index vector outside bundle shape");
    std::uint64_t lin = 0;
    for (std::size_t r = 0; r < steps_.size(); ++r) {
        lin += strides_[r] * static_cast<std::uint64_t>(idx.components[r]);
    }
    return lin;
}

IndexVector BundleShape::index_from_linear(std::uint64_t lin) const {
    if (lin >= element_count_) throw std::out_of_range("linear index outside bundle shape");
    IndexVector idx;
    idx.components.resize(steps_.size());
    for (std::size_t r = 0; r < steps_.size(); ++r) {
        idx.components[r] = static_cast<int>(lin / strides_[r]);
        lin %= strides_[r];
    }
    return idx;
}

IndexVector BundleShape::bottom() const {
    return IndexVector{std::vector<int>(steps_.size(), 0)};
}

IndexVector BundleShape::top() const {
    return IndexVector{steps_};
}

MaximalChain MaximalChain::from_step_dims(const BundleShape& shape, std::vector<int> dims) {
    const int R = shape.num_chains();
    if (static_cast<int>(dims.size()) != shape.total_steps()) {
        throw std::invalid_argument("step sequence length must equal total steps");
    }
    std::vector<int> used(R, 0);
    for (int d : dims) {
        if (d < 0 || d >= R) throw std::invalid_argument("step dimension out of range");
        ++used[d];
    }
    for (int r = 0; r < R; ++r) {
        if (used[r] != shape.steps()[r]) {
            throw std::invalid_argument("step sequence does not exhaust the bundle");
        }
    }
    MaximalChain mc;
    mc.step_dims = std::move(dims);
    mc.path.reserve(mc.step_dims.size() + 1);
    IndexVector cur = shape.bottom();
    mc.path.push_back(cur);
    for (int d : mc.step_dims) {
        ++cur.components[d];
        mc.path.push_back(cur);
    }
    return mc;
}

std::uint64_t count_maximal_chains(const BundleShape& shape) {
    constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t total = 1;
    int remaining = shape.total_steps();
    for (int n : shape.steps()) {
        // binomial C(remaining, n), exact at every partial product
        std::uint64_t c = 1;
        for (int j = 1; j <= n; ++j) {
            const auto num = static_cast<std::uint64_t>(remaining - n + j);
            if (c > kSat / num) return kSat;
            c = c * num / static_cast<std::uint64_t>(j);
        }
        if (c != 0 && total > kSat / c) return kSat;
        total *= c;
        remaining -= n;
    }
    return total;
}

MaximalChainEnumerator::MaximalChainEnumerator(BundleShape shape) : shape_(std::move(shape)) {
    dims_.reserve(shape_.total_steps());
    for (int r = 0; r < shape_.num_chains(); ++r) {
        dims_.insert(dims_.end(), shape_.steps()[r], r);
    }
}

const std::vector<int>* MaximalChainEnumerator::next_step_dims() {
    if (done_) return nullptr;
    if (fresh_) {
        fresh_ = false;
        return &dims_;
    }
    if (!std::next_permutation(dims_.begin(), dims_.end())) {
        done_ = true;
        return nullptr;
    }
    return &dims_;
}

std::optional<MaximalChain> MaximalChainEnumerator::next() {
    const std::vector<int>* dims = next_step_dims();
    if (!dims) return std::nullopt;
    return MaximalChain::from_step_dims(shape_, *dims);
}

std::vector<MaximalChain> enumerate_maximal_chains(const BundleShape& shape,
                                                   std::uint64_t budget) {
    const std::uint64_t count = count_maximal_chains(shape);
    if (count > budget) {
        throw BudgetExceededError("maximal-chain count " + std::to_string(count) +
                                  " exceeds enumeration budget " + std::to_string(budget));
    }
    std::vector<MaximalChain> chains;
    chains.reserve(count);
    MaximalChainEnumerator e(shape);
    while (auto mc = e.next()) chains.push_back(std::move(*mc));
    return chains;
}

namespace {

// visits all index vectors in row-major linear order
template <typename Fn>
void for_each_element(const BundleShape& shape, Fn&& fn) {
    const int R = shape.num_chains();
    IndexVector idx = shape.bottom();
    int height = 0;
    const std::uint64_t count = shape.element_count();
    for (std::uint64_t lin = 0; lin < count; ++lin) {
        fn(lin, idx, height);
        for (int r = R - 1; r >= 0; --r) {
            if (idx.components[r] < shape.steps()[r]) {
                ++idx.components[r];
                ++height;
                break;
            }
            height -= idx.components[r];
            idx.components[r] = 0;
        }
    }
}

}  // namespace

GradingFunction GradingFunction::natural_height(BundleShape shape) {
    return GradingFunction(std::move(shape), Variant::NaturalHeight, Monotonicity::Strict);
}

GradingFunction GradingFunction::tabulated(BundleShape shape, std::vector<double> values,
                                           Monotonicity mode) {
    GradingFunction gf(std::move(shape), Variant::Tabulated, mode);
    if (values.size() != gf.shape_.element_count()) {
        throw std::invalid_argument("tabulated values must cover every element of the shape");
    }
    gf.values_ = std::move(values);
    gf.validate_monotone();
    return gf;
}

GradingFunction GradingFunction::height_dependent(BundleShape shape, std::vector<double> values,
                                                  Monotonicity mode) {
    GradingFunction gf(std::move(shape), Variant::HeightDependent, mode);
    if (static_cast<int>(values.size()) != gf.shape_.total_steps() + 1) {
        throw std::invalid_argument("height table must have K+1 entries");
    }
    gf.values_ = std::move(values);
    gf.validate_monotone();
    return gf;
}

GradingFunction GradingFunction::separable(BundleShape shape,
                                           std::vector<std::vector<double>> factor_values,
                                           Monotonicity mode) {
    GradingFunction gf(std::move(shape), Variant::Separable, mode);
    if (static_cast<int>(factor_values.size()) != gf.shape_.num_chains()) {
        throw std::invalid_argument("one factor table per bundled chain required");
    }
    for (int r = 0; r < gf.shape_.num_chains(); ++r) {
        if (static_cast<int>(factor_values[r].size()) != gf.shape_.steps()[r] + 1) {
            throw std::invalid_argument("factor table " + std::to_string(r) +
                                        " must have n_r + 1 entries");
        }
    }
    gf.factors_ = std::move(factor_values);
    gf.validate_monotone();
    return gf;
}

void GradingFunction::validate_monotone() const {
    const bool strict = (mode_ == Monotonicity::Strict);
    auto check = [&](double lo, double hi, const char* what) {
        const bool ok = strict ? (hi > lo) : (hi >= lo);
        if (!ok) {
            throw std::invalid_argument(std::string(what) +
                                        (strict ? ": increment not positive"
                                                : ": increment negative"));
        }
    };
    switch (variant_) {
        case Variant::NaturalHeight:
            return;
        case Variant::HeightDependent:
            for (std::size_t k = 1; k < values_.size(); ++k) {
                check(values_[k - 1], values_[k], "height table");
            }
            return;
        case Variant::Separable:
            for (const auto& table : factors_) {
                for (std::size_t i = 1; i < table.size(); ++i) {
                    check(table[i - 1], table[i], "factor table");
                }
            }
            return;
        case Variant::Tabulated:
            for_each_element(shape_, [&](std::uint64_t lin, const IndexVector& idx, int) {
                for (int r = 0; r < shape_.num_chains(); ++r) {
                    if (idx.components[r] < shape_.steps()[r]) {
                        check(values_[lin], values_[lin + shape_.strides()[r]],
                              "tabulated values");
                    }
                }
            });
            return;
    }
}

double GradingFunction::evaluate(const IndexVector& idx) const {
    if (!shape_.contains(idx)) throw std::out_of_range("index vector outside bundle shape");
    switch (variant_) {
        case Variant::NaturalHeight:
            return idx.height();
        case Variant::HeightDependent:
            return values_[static_cast<std::size_t>(idx.height())];
        case Variant::Tabulated:
            return values_[shape_.linear_index(idx)];
        case Variant::Separable: {
            double sum = 0.0;
            for (std::size_t r = 0; r < factors_.size(); ++r) {
                sum += factors_[r][static_cast<std::size_t>(idx.components[r])];
            }
            return sum;
        }
    }
    return 0.0;  // unreachable
}

std::pair<double, double> GradingFunction::extremes() const {
    switch (variant_) {
        case Variant::NaturalHeight:
            return {0.0, static_cast<double>(shape_.total_steps())};
        case Variant::HeightDependent:
        case Variant::Tabulated:
            return {values_.front(), values_.back()};
        case Variant::Separable: {
            double lo = 0.0, hi = 0.0;
            for (const auto& table : factors_) {
                lo += table.front();
                hi += table.back();
            }
            return {lo, hi};
        }
    }
    return {0.0, 0.0};  // unreachable
}

namespace {

std::vector<double> affine(const std::vector<double>& v, double scale, double offset) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = offset + scale * v[i];
    return out;
}

}  // namespace

GradingFunction GradingFunction::standardized() const {
    const auto [m, M] = extremes();
    if (!(M > m)) throw std::invalid_argument("degenerate grading range: M must exceed m");
    const double inv = 1.0 / (M - m);
    switch (variant_) {
        case Variant::NaturalHeight: {
            std::vector<double> table(shape_.total_steps() + 1);
            for (std::size_t k = 0; k < table.size(); ++k) table[k] = k * inv;
            return height_dependent(shape_, std::move(table), mode_);
        }
        case Variant::HeightDependent:
            return height_dependent(shape_, affine(values_, inv, -m * inv), mode_);
        case Variant::Tabulated:
            return tabulated(shape_, affine(values_, inv, -m * inv), mode_);
        case Variant::Separable: {
            // (sum_r F_r - m) / (M - m) with each factor rebased at zero
            std::vector<std::vector<double>> tables;
            tables.reserve(factors_.size());
            for (const auto& t : factors_) {
                tables.push_back(affine(t, inv, -t.front() * inv));
            }
            return separable(shape_, std::move(tables), mode_);
        }
    }
    return *this;  // unreachable
}

GradingFunction GradingFunction::shifted(double c) const {
    switch (variant_) {
        case Variant::NaturalHeight: {
            std::vector<double> table(shape_.total_steps() + 1);
            for (std::size_t k = 0; k < table.size(); ++k) table[k] = c + static_cast<double>(k);
            return height_dependent(shape_, std::move(table), mode_);
        }
        case Variant::HeightDependent:
            return height_dependent(shape_, affine(values_, 1.0, c), mode_);
        case Variant::Tabulated:
            return tabulated(shape_, affine(values_, 1.0, c), mode_);
        case Variant::Separable: {
            auto tables = factors_;
            for (double& v : tables.front()) v += c;
            return separable(shape_, std::move(tables), mode_);
        }
    }
    return *this;  // unreachable
}

GradingFunction GradingFunction::scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("scale factor must be positive");
    switch (variant_) {
        case Variant::NaturalHeight: {
            std::vector<double> table(shape_.total_steps() + 1);
            for (std::size_t k = 0; k < table.size(); ++k) table[k] = c * static_cast<double>(k);
            return height_dependent(shape_, std::move(table), mode_);
        }
        case Variant::HeightDependent:
            return height_dependent(shape_, affine(values_, c, 0.0), mode_);
        case Variant::Tabulated:
            return tabulated(shape_, affine(values_, c, 0.0), mode_);
        case Variant::Separable: {
            auto tables = factors_;
            for (auto& t : tables) {
                for (double& v : t) v *= c;
            }
            return separable(shape_, std::move(tables), mode_);
        }
    }
    return *this;  // unreachable
}

std::vector<double> GradingFunction::dense_values() const {
    if (variant_ == Variant::Tabulated) return values_;
    std::vector<double> out(shape_.element_count());
    switch (variant_) {
        case Variant::NaturalHeight:
            for_each_element(shape_, [&](std::uint64_t lin, const IndexVector&, int height) {
                out[lin] = static_cast<double>(height);
            });
            break;
        case Variant::HeightDependent:
            for_each_element(shape_, [&](std::uint64_t lin, const IndexVector&, int height) {
                out[lin] = values_[static_cast<std::size_t>(height)];
            });
            break;
        case Variant::Separable:
            for_each_element(shape_, [&](std::uint64_t lin, const IndexVector& idx, int) {
                double sum = 0.0;
                for (std::size_t r = 0; r < factors_.size(); ++r) {
                    sum += factors_[r][static_cast<std::size_t>(idx.components[r])];
                }
                out[lin] = sum;
            });
            break;
        case Variant::Tabulated:
            break;  // handled above
    }
    return out;
}

}  // namespace chaingrade
