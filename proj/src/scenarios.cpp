#include "gaussdfe/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

namespace gaussdfe {

namespace {

const double kLnPiE = std::log(std::numbers::pi * std::numbers::e);

std::vector<std::string> numbered(const char* prefix, std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        out.push_back(prefix + std::to_string(k));
    }
    return out;
}

GaussianSet input_set(const char* prefix, HermitianGram gram, const std::vector<VariableGroup>& groups) {
    if (groups.empty()) {
        return GaussianSet(numbered(prefix, gram.dim()), std::move(gram));
    }
    std::vector<std::string> labels;
    for (const auto& g : groups) {
        labels.insert(labels.end(), g.labels.begin(), g.labels.end());
    }
    return GaussianSet(std::move(labels), std::move(gram));
}

ChannelScenario assemble(ChannelKind kind, CMatrix H, GaussianSet input, HermitianGram noise,
                         std::vector<VariableGroup> groups) {
    if (groups.empty()) {
        groups = singleton_groups(input.labels());
    }
    ChannelScenario s{kind, std::move(H), std::move(input), std::move(noise), {}, std::move(groups), {}, 0};
    s.output_labels = numbered("y", s.H.rows());
    validate(s);
    return s;
}

void check_order(const JointGram& j, const GroupList& order, const std::string& observed) {
    std::unordered_set<std::string> seen;
    for (const auto& name : order) {
        if (name == observed) {
            throw InvalidArgument("decoding order lists the observation group '" + observed + "'");
        }
        if (!j.has_group(name)) {
            throw InvalidArgument("decoding order names unknown group '" + name + "'");
        }
        if (!seen.insert(name).second) {
            throw InvalidArgument("decoding order lists group '" + name + "' twice");
        }
    }
    for (const auto& g : j.groups()) {
        if (g.name != observed && !seen.contains(g.name)) {
            throw InvalidArgument("decoding order omits group '" + g.name + "'");
        }
    }
    if (!j.has_group(observed)) {
        throw InvalidArgument("joint gram has no observation group '" + observed + "'");
    }
}

} // namespace

const char* to_string(ChannelKind kind) {
    switch (kind) {
    case ChannelKind::Isi:
        return "isi";
    case ChannelKind::Mimo:
        return "mimo";
    case ChannelKind::Mac:
        return "mac";
    }
    return "?";
}

CMatrix isi_channel_matrix(std::span<const cplx> taps, std::size_t block_length) {
    if (taps.empty()) {
        throw InvalidArgument("isi_channel_matrix: empty tap list");
    }
    CMatrix h(block_length, block_length);
    for (std::size_t i = 0; i < block_length; ++i) {
        for (std::size_t l = 0; l < taps.size() && l <= i; ++l) {
            h(i, i - l) = taps[l];
        }
    }
    return h;
}

std::vector<VariableGroup> singleton_groups(std::span<const std::string> labels) {
    std::vector<VariableGroup> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        out.push_back({l, {l}});
    }
    return out;
}

ChannelScenario make_isi_scenario(std::vector<cplx> taps, std::size_t block_length, HermitianGram input_gram,
                                  HermitianGram noise_gram, std::vector<VariableGroup> groups) {
    if (block_length == 0) {
        throw InvalidArgument("ISI scenario: block length must be positive");
    }
    CMatrix h = isi_channel_matrix(taps, block_length);
    GaussianSet input = input_set("x", std::move(input_gram), groups);
    ChannelScenario s = assemble(ChannelKind::Isi, std::move(h), std::move(input), std::move(noise_gram),
                                 std::move(groups));
    s.taps = std::move(taps);
    s.block_length = block_length;
    return s;
}

ChannelScenario make_mimo_scenario(CMatrix H, HermitianGram input_gram, HermitianGram noise_gram,
                                   std::vector<VariableGroup> groups) {
    GaussianSet input = input_set("x", std::move(input_gram), groups);
    return assemble(ChannelKind::Mimo, std::move(H), std::move(input), std::move(noise_gram), std::move(groups));
}

ChannelScenario make_mac_scenario(std::span<const cplx> gains, HermitianGram input_gram, double noise_variance,
                                  std::vector<VariableGroup> groups) {
    if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
        throw InvalidArgument("MAC scenario: noise variance must be positive");
    }
    CMatrix h(1, gains.size(), std::vector<cplx>(gains.begin(), gains.end()));
    GaussianSet input = input_set("u", std::move(input_gram), groups);
    const double nv[] = {noise_variance};
    return assemble(ChannelKind::Mac, std::move(h), std::move(input), HermitianGram::diagonal(nv),
                    std::move(groups));
}

void validate(const ChannelScenario& s) {
    const std::size_t nin = s.input.dim();
    const std::size_t nout = s.noise_gram.dim();
    if (s.H.rows() != nout || s.H.cols() != nin) {
        throw DimensionMismatch("scenario: H is " + std::to_string(s.H.rows()) + "x" + std::to_string(s.H.cols()) +
                                " but there are " + std::to_string(nin) + " inputs and " + std::to_string(nout) +
                                " noise variables");
    }
    if (s.output_labels.size() != nout) {
        throw DimensionMismatch("scenario: output label count does not match H");
    }
    if (s.kind == ChannelKind::Mac && nout != 1) {
        throw DimensionMismatch("scenario: a multiple-access channel has a single output");
    }
    if (ldl_semidefinite(s.noise_gram).rank < nout) {
        throw SingularGram("scenario: noise Gram is singular");
    }
    ldl_semidefinite(s.input.gram());

    std::unordered_set<std::string> names;
    std::unordered_map<std::string, int> hits;
    for (const auto& l : s.input.labels()) {
        hits[l] = 0;
    }
    for (const auto& g : s.groups) {
        if (g.name == kObservationGroup) {
            throw InvalidArgument(std::string("scenario: group name '") + kObservationGroup + "' is reserved");
        }
        if (!names.insert(g.name).second) {
            throw InvalidArgument("scenario: duplicate group name '" + g.name + "'");
        }
        if (g.labels.empty()) {
            throw InvalidArgument("scenario: group '" + g.name + "' is empty");
        }
        for (const auto& l : g.labels) {
            auto it = hits.find(l);
            if (it == hits.end()) {
                throw InvalidArgument("scenario: group '" + g.name + "' names unknown input '" + l + "'");
            }
            if (++it->second > 1) {
                throw InvalidArgument("scenario: input '" + l + "' appears in more than one group");
            }
        }
    }
    for (const auto& [label, count] : hits) {
        if (count == 0) {
            throw InvalidArgument("scenario: input '" + label + "' is not in any group");
        }
    }
    for (const auto& l : s.output_labels) {
        if (hits.contains(l)) {
            throw InvalidArgument("scenario: label '" + l + "' is both an input and an output");
        }
    }
}

JointGram build_joint_gram(const ChannelScenario& s) {
    validate(s);
    // Input variables in group-concatenation order.
    std::vector<std::size_t> perm;
    for (const auto& g : s.groups) {
        for (const auto& l : g.labels) {
            perm.push_back(s.input.index_of(l));
        }
    }
    const CMatrix rxx = s.input.gram().matrix().select(perm, perm);
    std::vector<std::size_t> all_out(s.H.rows());
    for (std::size_t k = 0; k < all_out.size(); ++k) {
        all_out[k] = k;
    }
    const CMatrix h = s.H.select(all_out, perm);
    const CMatrix rxy = matmul(rxx, conj_transpose(h));
    const CMatrix ryy = matmul(h, rxy) + s.noise_gram.matrix();

    const std::size_t nx = rxx.rows();
    const std::size_t ny = ryy.rows();
    CMatrix joint(nx + ny, nx + ny);
    for (std::size_t r = 0; r < nx; ++r) {
        for (std::size_t c = 0; c < nx; ++c) {
            joint(r, c) = rxx(r, c);
        }
        for (std::size_t c = 0; c < ny; ++c) {
            joint(r, nx + c) = rxy(r, c);
            joint(nx + c, r) = std::conj(rxy(r, c));
        }
    }
    for (std::size_t r = 0; r < ny; ++r) {
        for (std::size_t c = 0; c < ny; ++c) {
            joint(nx + r, nx + c) = ryy(r, c);
        }
    }
    std::vector<VariableGroup> groups = s.groups;
    groups.push_back({kObservationGroup, s.output_labels});
    return JointGram(std::move(groups), HermitianGram(joint));
}

// ---------------------------------------------------------------------------
// Rates

std::vector<double> RateProfile::rates_bits() const {
    std::vector<double> out;
    out.reserve(rates_nats.size());
    for (double r : rates_nats) {
        out.push_back(r / std::numbers::ln2);
    }
    return out;
}

double RateProfile::total_bits() const { return total_nats / std::numbers::ln2; }

RateProfile incremental_rates(const JointGram& j, const GroupList& order, const std::string& observed) {
    check_order(j, order, observed);
    const InnovationsForm fx = ldl_semidefinite(j.gram_of(order));
    if (fx.rank < fx.d2.size()) {
        throw SingularGram("incremental_rates: input Gram R_xx is singular (rank " + std::to_string(fx.rank) +
                           " < " + std::to_string(fx.d2.size()) + ")");
    }
    const std::vector<double> de = conditional_pivots(j, order, {observed});
    for (double d : de) {
        if (d <= 0.0) {
            throw SingularGram("incremental_rates: error Gram R_ee is singular (some input is determined by Y)");
        }
    }

    RateProfile p;
    p.order = order;
    std::size_t k = 0;
    for (const auto& name : order) {
        double hx = 0.0;
        double he = 0.0;
        for (std::size_t m = 0; m < j.group(name).labels.size(); ++m, ++k) {
            hx += kLnPiE + std::log(fx.d2[k]);
            he += kLnPiE + std::log(de[k]);
        }
        p.input_entropy_nats.push_back(hx);
        p.error_entropy_nats.push_back(he);
        p.rates_nats.push_back(hx - he);
        p.total_nats += hx - he;
    }

    GroupList inputs;
    for (const auto& g : j.groups()) {
        if (g.name != observed) {
            inputs.push_back(g.name);
        }
    }
    p.reference = mutual_information(j, inputs, {observed});
    return p;
}

// ---------------------------------------------------------------------------
// Decision-feedback filters

std::size_t DfeFilters::stage_of(std::size_t var) const {
    for (std::size_t s = 0; s + 1 < stage_offsets.size(); ++s) {
        if (var < stage_offsets[s + 1]) {
            return s;
        }
    }
    throw InvalidArgument("DfeFilters::stage_of: variable index out of range");
}

DfeFilters dfe_filters(const JointGram& j, const GroupList& order, const std::string& observed) {
    check_order(j, order, observed);
    const ProjectionResult fwd = mmse_project(j, order, {observed});
    if (ldl_semidefinite(fwd.error_gram).rank < fwd.error_gram.dim()) {
        throw SingularGram("dfe_filters: error Gram R_ee is singular");
    }

    DfeFilters f;
    f.order = order;
    f.stage_offsets.push_back(0);
    std::vector<VariableGroup> stages;
    for (const auto& name : order) {
        const auto& g = j.group(name);
        f.labels.insert(f.labels.end(), g.labels.begin(), g.labels.end());
        f.stage_offsets.push_back(f.labels.size());
        stages.push_back(g);
    }
    f.forward = fwd.coefficients;
    f.error_gram = fwd.error_gram;

    // Row block i of B is the MMSE predictor of E_i from E_1^{i-1}.
    const JointGram errors(stages, fwd.error_gram);
    const std::size_t n = f.labels.size();
    f.predictor = CMatrix(n, n);
    for (std::size_t s = 0; s < order.size(); ++s) {
        if (s == 0) {
            f.stage_error_grams.push_back(errors.gram_of(GroupList{order[0]}));
            continue;
        }
        const GroupList past(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
        const ProjectionResult pred = mmse_project(errors, {order[s]}, past);
        for (std::size_t r = 0; r < pred.coefficients.rows(); ++r) {
            for (std::size_t c = 0; c < pred.coefficients.cols(); ++c) {
                f.predictor(f.stage_offsets[s] + r, c) = pred.coefficients(r, c);
            }
        }
        f.stage_error_grams.push_back(pred.error_gram);
    }

    f.feedforward_std = matmul(CMatrix::identity(n) - f.predictor, f.forward);
    f.feedback_std = f.predictor;
    return f;
}

CMatrix noise_predictive_input(const DfeFilters& f, const CMatrix& estimate, const CMatrix& x) {
    return estimate + matmul(f.predictor, x - estimate);
}

CMatrix standard_form_input(const DfeFilters& f, const CMatrix& estimate, const CMatrix& x) {
    const std::size_t n = f.predictor.rows();
    return matmul(CMatrix::identity(n) - f.feedback_std, estimate) + matmul(f.feedback_std, x);
}

JointGram reduce_observations(const JointGram& j, const std::string& y) {
    const VariableGroup& target = j.group(y);
    const InnovationsForm f = ldl_semidefinite(j.gram_of(GroupList{y}));

    std::vector<VariableGroup> groups;
    std::vector<std::size_t> keep;
    std::size_t offset = 0;
    for (const auto& g : j.groups()) {
        if (g.name != target.name) {
            groups.push_back(g);
            for (std::size_t k = 0; k < g.labels.size(); ++k) {
                keep.push_back(offset + k);
            }
        } else {
            VariableGroup reduced{g.name, {}};
            for (std::size_t k = 0; k < g.labels.size(); ++k) {
                if (f.d2[k] > 0.0) {
                    reduced.labels.push_back(g.labels[k]);
                    keep.push_back(offset + k);
                }
            }
            if (!reduced.labels.empty()) {
                groups.push_back(std::move(reduced));
            }
        }
        offset += g.labels.size();
    }
    return JointGram(std::move(groups), j.gram().principal(keep));
}

} // namespace gaussdfe
