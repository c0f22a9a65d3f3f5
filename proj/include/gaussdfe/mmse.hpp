#pragma once

// MMSE projection calculus on partitioned Gram matrices. Everything here is
// second-order algebra; no samples are involved.

#include <span>
#include <string>
#include <vector>

#include "gaussdfe/gaussian_space.hpp"
#include "gaussdfe/kernel.hpp"

namespace gaussdfe {

struct VariableGroup {
    std::string name;
    std::vector<std::string> labels;

    friend bool operator==(const VariableGroup&, const VariableGroup&) = default;
};

using GroupList = std::vector<std::string>;

/// Gram matrix over the concatenation of disjoint named variable groups.
class JointGram {
public:
    JointGram(std::vector<VariableGroup> groups, HermitianGram gram);

    const std::vector<VariableGroup>& groups() const { return groups_; }
    const HermitianGram& gram() const { return gram_; }
    std::vector<std::string> labels() const;

    bool has_group(const std::string& name) const;
    const VariableGroup& group(const std::string& name) const;

    /// Row/column indices of the listed groups, concatenated in list order.
    std::vector<std::size_t> indices(const GroupList& group_names) const;

    /// Principal Gram of the listed groups. Carries the joint reference
    /// scale so that derived zero thresholds stay consistent.
    HermitianGram gram_of(const GroupList& group_names) const;

    /// Cross block <rows, cols>.
    CMatrix block(const GroupList& rows, const GroupList& cols) const;

    /// 1 + largest variance in the joint Gram.
    double scale() const { return gram_.scale(); }

    GaussianSet as_set() const { return GaussianSet(labels(), gram_); }

private:
    std::vector<VariableGroup> groups_;
    HermitianGram gram_;
};

struct ProjectionResult {
    CMatrix coefficients;        ///< A_xy, |X| x |Y|
    HermitianGram estimate_gram; ///< Gram of X_{|Y}
    HermitianGram error_gram;    ///< Gram of X_{perp Y}
};

struct MutualInfo {
    double nats = 0.0;
    bool infinite = false;

    double bits() const;
};

/// A = R_xy R_yy^-1 with the matching estimate and error Grams.
/// Throws SingularGram if the observed groups are linearly dependent.
ProjectionResult mmse_project(const JointGram& j, const GroupList& target, const GroupList& observed);

/// max |R_xy - A R_yy| for the given coefficients.
double orthogonality_residual(const JointGram& j, const CMatrix& coefficients, const GroupList& target,
                              const GroupList& observed);

inline double orthogonality_residual(const JointGram& j, const ProjectionResult& p, const GroupList& target,
                                     const GroupList& observed) {
    return orthogonality_residual(j, p.coefficients, target, observed);
}

/// Innovation variances of the target variables after the given ones.
///
/// These are the trailing pivots of the semidefinite LDL* of the joint Gram
/// ordered (given, target), i.e. the pivots of the error Gram of target
/// given the span of `given`. Dependent members of `given` are handled by
/// the zero-pivot rule, so `given` need not be linearly independent.
std::vector<double> conditional_pivots(const JointGram& j, const GroupList& target, const GroupList& given);

/// I(X;Y) = ln(|R_xx| / |R_ee|). Infinite flag when R_ee is singular.
/// Throws SingularGram when R_xx is singular.
MutualInfo mutual_information(const JointGram& j, const GroupList& x, const GroupList& y);

/// X_{|YZ} assembled as X_{|Y} + (X_{perp Y})_{|Z_{perp Y}}; the returned
/// coefficients act on (Y, Z) jointly.
ProjectionResult chain_rule_project(const JointGram& j, const GroupList& x, const GroupList& y, const GroupList& z);

/// |I(X;Y) - I(X; X_{|Y})| in nats.
double sufficiency_check(const JointGram& j, const GroupList& x, const GroupList& y);

} // namespace gaussdfe
