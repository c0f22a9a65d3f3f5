#include "gaussdfe/gaussian_space.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

namespace gaussdfe {

namespace {
const double kLnPiE = std::log(std::numbers::pi * std::numbers::e);
}

double EntropyValue::bits() const {
    if (neg_infinite) {
        return -std::numeric_limits<double>::infinity();
    }
    return nats / std::numbers::ln2;
}

GaussianSet::GaussianSet(std::vector<std::string> labels, HermitianGram gram)
    : labels_(std::move(labels)), gram_(std::move(gram)) {
    if (labels_.size() != gram_.dim()) {
        throw DimensionMismatch("GaussianSet: " + std::to_string(labels_.size()) + " labels for a " +
                                std::to_string(gram_.dim()) + "-dimensional gram");
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) {
            throw InvalidArgument("GaussianSet: duplicate label '" + l + "'");
        }
    }
}

std::size_t GaussianSet::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) {
            return i;
        }
    }
    throw InvalidArgument("unknown label '" + label + "'");
}

InnovationsForm innovations(const GaussianSet& x) { return ldl_semidefinite(x.gram()); }

EntropyValue entropy_from_pivots(std::span<const double> d2) {
    EntropyValue h;
    for (double d : d2) {
        if (d <= 0.0) {
            return {-std::numeric_limits<double>::infinity(), true};
        }
        h.nats += kLnPiE + std::log(d);
    }
    return h;
}

EntropyValue differential_entropy(const GaussianSet& x) { return entropy_from_pivots(innovations(x).d2); }

double entropy_rate_per_dim(const GaussianSet& x) {
    if (x.dim() == 0) {
        throw InvalidArgument("entropy_rate_per_dim: empty set");
    }
    const InnovationsForm f = innovations(x);
    if (f.rank < x.dim()) {
        throw SingularGram("entropy_rate_per_dim: set has rank " + std::to_string(f.rank) + " < " +
                           std::to_string(x.dim()));
    }
    // Geometric mean of the pivots, taken in the log domain.
    double log_det = 0.0;
    for (double d : f.d2) {
        log_det += std::log(d);
    }
    return kLnPiE + log_det / static_cast<double>(x.dim());
}

GaussianSet permute(const GaussianSet& x, std::span<const std::size_t> order) {
    const std::size_t n = x.dim();
    if (order.size() != n) {
        throw InvalidArgument("permute: permutation has " + std::to_string(order.size()) + " entries, expected " +
                              std::to_string(n));
    }
    std::vector<bool> hit(n, false);
    for (std::size_t k : order) {
        if (k >= n || hit[k]) {
            throw InvalidArgument("permute: not a permutation of 0.." + std::to_string(n - 1));
        }
        hit[k] = true;
    }
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t k : order) {
        labels.push_back(x.labels()[k]);
    }
    return GaussianSet(std::move(labels), x.gram().principal(order));
}

GaussianSet restrict(const GaussianSet& x, std::span<const std::string> subset) {
    std::vector<std::size_t> idx;
    idx.reserve(subset.size());
    for (const auto& l : subset) {
        idx.push_back(x.index_of(l));
    }
    return GaussianSet(std::vector<std::string>(subset.begin(), subset.end()), x.gram().principal(idx));
}

} // namespace gaussdfe
