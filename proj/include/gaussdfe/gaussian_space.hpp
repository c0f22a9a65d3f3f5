#pragma once

// Finite sets of zero-mean proper complex Gaussian variables, described
// entirely by their labeled Gram matrix.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gaussdfe/kernel.hpp"

namespace gaussdfe {

/// Entropy or information in nats, with -inf/+inf carried as an explicit flag.
struct EntropyValue {
    double nats = 0.0;
    bool neg_infinite = false;

    double bits() const;
    bool finite() const { return !neg_infinite; }
};

class GaussianSet {
public:
    GaussianSet() = default;
    GaussianSet(std::vector<std::string> labels, HermitianGram gram);

    const std::vector<std::string>& labels() const { return labels_; }
    const HermitianGram& gram() const { return gram_; }
    std::size_t dim() const { return labels_.size(); }

    /// Position of a label; throws InvalidArgument for unknown labels.
    std::size_t index_of(const std::string& label) const;

private:
    std::vector<std::string> labels_;
    HermitianGram gram_;
};

/// Innovations (Cholesky) form in label order; d2 are the innovation variances.
InnovationsForm innovations(const GaussianSet& x);

/// Sum of ln(pi e d2_i) over the innovations; -inf flag when any pivot is 0.
EntropyValue differential_entropy(const GaussianSet& x);

/// Same as differential_entropy, taking the pivots directly.
EntropyValue entropy_from_pivots(std::span<const double> d2);

/// ln(pi e |R_xx|^(1/N)). Throws SingularGram for a singular set.
double entropy_rate_per_dim(const GaussianSet& x);

/// Reorders the set: result position k holds input variable order[k].
GaussianSet permute(const GaussianSet& x, std::span<const std::size_t> order);

/// Principal sub-set, in the order the labels are listed.
GaussianSet restrict(const GaussianSet& x, std::span<const std::string> subset);

} // namespace gaussdfe
