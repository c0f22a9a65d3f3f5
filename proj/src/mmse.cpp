#include "gaussdfe/mmse.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

namespace gaussdfe {

namespace {

GroupList concat(const GroupList& a, const GroupList& b) {
    GroupList out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

void require_disjoint(const GroupList& a, const GroupList& b, const char* what) {
    for (const auto& x : a) {
        for (const auto& y : b) {
            if (x == y) {
                throw InvalidArgument(std::string(what) + ": group '" + x + "' appears on both sides");
            }
        }
    }
}

} // namespace

double MutualInfo::bits() const {
    if (infinite) {
        return std::numeric_limits<double>::infinity();
    }
    return nats / std::numbers::ln2;
}

// ---------------------------------------------------------------------------
// JointGram

JointGram::JointGram(std::vector<VariableGroup> groups, HermitianGram gram)
    : groups_(std::move(groups)), gram_(std::move(gram)) {
    std::unordered_set<std::string> names;
    std::unordered_set<std::string> labels;
    std::size_t total = 0;
    for (const auto& g : groups_) {
        if (g.name.empty()) {
            throw InvalidArgument("JointGram: empty group name");
        }
        if (!names.insert(g.name).second) {
            throw InvalidArgument("JointGram: duplicate group name '" + g.name + "'");
        }
        if (g.labels.empty()) {
            throw InvalidArgument("JointGram: group '" + g.name + "' has no variables");
        }
        for (const auto& l : g.labels) {
            if (!labels.insert(l).second) {
                throw InvalidArgument("JointGram: label '" + l + "' belongs to more than one group");
            }
        }
        total += g.labels.size();
    }
    if (total != gram_.dim()) {
        throw DimensionMismatch("JointGram: groups cover " + std::to_string(total) + " variables, gram is " +
                                std::to_string(gram_.dim()) + "-dimensional");
    }
}

std::vector<std::string> JointGram::labels() const {
    std::vector<std::string> out;
    for (const auto& g : groups_) {
        out.insert(out.end(), g.labels.begin(), g.labels.end());
    }
    return out;
}

bool JointGram::has_group(const std::string& name) const {
    for (const auto& g : groups_) {
        if (g.name == name) {
            return true;
        }
    }
    return false;
}

const VariableGroup& JointGram::group(const std::string& name) const {
    for (const auto& g : groups_) {
        if (g.name == name) {
            return g;
        }
    }
    throw InvalidArgument("unknown group '" + name + "'");
}

std::vector<std::size_t> JointGram::indices(const GroupList& group_names) const {
    std::vector<std::size_t> out;
    std::unordered_set<std::string> seen;
    for (const auto& name : group_names) {
        if (!seen.insert(name).second) {
            throw InvalidArgument("group '" + name + "' listed twice");
        }
        std::size_t offset = 0;
        bool found = false;
        for (const auto& g : groups_) {
            if (g.name == name) {
                for (std::size_t k = 0; k < g.labels.size(); ++k) {
                    out.push_back(offset + k);
                }
                found = true;
                break;
            }
            offset += g.labels.size();
        }
        if (!found) {
            throw InvalidArgument("unknown group '" + name + "'");
        }
    }
    return out;
}

HermitianGram JointGram::gram_of(const GroupList& group_names) const {
    const auto idx = indices(group_names);
    return HermitianGram(gram_.matrix().select(idx, idx), std::max(gram_.reference_scale(), gram_.max_diagonal()));
}

CMatrix JointGram::block(const GroupList& rows, const GroupList& cols) const {
    return gram_.matrix().select(indices(rows), indices(cols));
}

// ---------------------------------------------------------------------------
// Projections

ProjectionResult mmse_project(const JointGram& j, const GroupList& target, const GroupList& observed) {
    require_disjoint(target, observed, "mmse_project");
    const HermitianGram rxx = j.gram_of(target);
    const HermitianGram ryy = j.gram_of(observed);
    const CMatrix ryx = j.block(observed, target);

    // R_yy A* = R_yx
    const CMatrix a = conj_transpose(solve_psd(ryy, ryx));
    const CMatrix est = matmul(a, ryx);
    const double ref = rxx.reference_scale();
    return ProjectionResult{a, HermitianGram(est, ref), HermitianGram(rxx.matrix() - est, ref)};
}

double orthogonality_residual(const JointGram& j, const CMatrix& coefficients, const GroupList& target,
                              const GroupList& observed) {
    const CMatrix rxy = j.block(target, observed);
    const CMatrix ryy = j.block(observed, observed);
    return (rxy - matmul(coefficients, ryy)).max_abs();
}

std::vector<double> conditional_pivots(const JointGram& j, const GroupList& target, const GroupList& given) {
    require_disjoint(target, given, "conditional_pivots");
    const GroupList all = concat(given, target);
    const InnovationsForm f = ldl_semidefinite(j.gram_of(all));
    const std::size_t n_given = j.indices(given).size();
    return {f.d2.begin() + static_cast<std::ptrdiff_t>(n_given), f.d2.end()};
}

MutualInfo mutual_information(const JointGram& j, const GroupList& x, const GroupList& y) {
    const InnovationsForm fx = ldl_semidefinite(j.gram_of(x));
    if (fx.rank < fx.d2.size()) {
        throw SingularGram("mutual_information: R_xx has rank " + std::to_string(fx.rank) + " < " +
                           std::to_string(fx.d2.size()));
    }
    const std::vector<double> de = conditional_pivots(j, x, y);
    MutualInfo mi;
    for (std::size_t k = 0; k < de.size(); ++k) {
        if (de[k] <= 0.0) {
            return MutualInfo{std::numeric_limits<double>::infinity(), true};
        }
        mi.nats += std::log(fx.d2[k]) - std::log(de[k]);
    }
    return mi;
}

ProjectionResult chain_rule_project(const JointGram& j, const GroupList& x, const GroupList& y, const GroupList& z) {
    require_disjoint(y, z, "chain_rule_project");
    const ProjectionResult first = mmse_project(j, x, y);  // X_{|Y}
    const ProjectionResult z_on_y = mmse_project(j, z, y); // Z_{|Y}, Gram of Z_{perp Y}

    // <X_{perp Y}, Z_{perp Y}> = R_xz - A_xy R_yz
    const CMatrix cross = j.block(x, z) - matmul(first.coefficients, j.block(y, z));

    // Second stage: project the first-stage error onto the innovations of Z.
    CMatrix c;
    try {
        c = conj_transpose(solve_psd(z_on_y.error_gram, conj_transpose(cross)));
    } catch (const SingularGram&) {
        throw SingularGram("chain_rule_project: Z is linearly dependent on Y (Z_{perp Y} is singular)");
    }

    const std::size_t ny = first.coefficients.cols();
    const std::size_t nz = c.cols();
    const CMatrix ay = first.coefficients - matmul(c, z_on_y.coefficients);
    CMatrix coeff(ay.rows(), ny + nz);
    for (std::size_t r = 0; r < coeff.rows(); ++r) {
        for (std::size_t k = 0; k < ny; ++k) {
            coeff(r, k) = ay(r, k);
        }
        for (std::size_t k = 0; k < nz; ++k) {
            coeff(r, ny + k) = c(r, k);
        }
    }

    const CMatrix gain = matmul(c, conj_transpose(cross));
    const double ref = first.error_gram.reference_scale();
    return ProjectionResult{coeff, HermitianGram(first.estimate_gram.matrix() + gain, ref),
                            HermitianGram(first.error_gram.matrix() - gain, ref)};
}

double sufficiency_check(const JointGram& j, const GroupList& x, const GroupList& y) {
    const ProjectionResult p = mmse_project(j, x, y);
    if (ldl_semidefinite(p.estimate_gram).rank < p.estimate_gram.dim()) {
        throw SingularGram("sufficiency_check: the estimate X_{|Y} has a singular Gram");
    }
    const MutualInfo direct = mutual_information(j, x, y);
    if (direct.infinite) {
        throw SingularGram("sufficiency_check: R_ee is singular");
    }

    // Joint Gram of (X, X_{|Y}); <X, X_{|Y}> = R_xy A* equals the estimate Gram.
    const HermitianGram rxx = j.gram_of(x);
    const std::size_t n = rxx.dim();
    CMatrix joint(2 * n, 2 * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            joint(r, c) = rxx(r, c);
            joint(r, n + c) = p.estimate_gram(r, c);
            joint(n + r, c) = p.estimate_gram(r, c);
            joint(n + r, n + c) = p.estimate_gram(r, c);
        }
    }
    std::vector<std::string> xl;
    std::vector<std::string> vl;
    for (std::size_t k = 0; k < n; ++k) {
        xl.push_back("x" + std::to_string(k));
        vl.push_back("v" + std::to_string(k));
    }
    const JointGram jv({{"X", xl}, {"X|Y", vl}}, HermitianGram(joint, rxx.reference_scale()));
    const MutualInfo reduced = mutual_information(jv, {"X"}, {"X|Y"});
    if (reduced.infinite) {
        throw SingularGram("sufficiency_check: reduced error Gram is singular");
    }
    return std::abs(direct.nats - reduced.nats);
}

} // namespace gaussdfe
