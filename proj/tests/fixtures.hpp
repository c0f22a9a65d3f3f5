#pragma once

// Scenario generators shared by the unit and acceptance tests.

#include <string>
#include <vector>

#include "gaussdfe/scenarios.hpp"
#include "oracles.hpp"

namespace fixture {

using namespace gaussdfe;

/// Random MIMO channel: up to `max_in` inputs split into 2-4 groups of
/// unequal sizes, up to `max_out` outputs, random full-rank input and
/// noise Grams.
inline ChannelScenario random_scenario(oracle::Rng& rng, std::size_t max_in = 8, std::size_t max_out = 8) {
    const std::size_t n_groups = rng.index(2, 4);
    const std::size_t nin = rng.index(n_groups, max_in);
    const std::size_t nout = rng.index(1, max_out);

    // Cut points between groups.
    std::vector<std::size_t> sizes(n_groups, 1);
    for (std::size_t extra = nin - n_groups; extra > 0; --extra) {
        ++sizes[rng.index(0, n_groups - 1)];
    }
    // Labels are shuffled so group membership does not follow input order.
    std::vector<std::string> labels;
    for (std::size_t k = 1; k <= nin; ++k) {
        labels.push_back("x" + std::to_string(k));
    }
    const auto perm = rng.permutation(nin);
    std::vector<VariableGroup> groups;
    std::size_t pos = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
        VariableGroup grp{"g" + std::to_string(g + 1), {}};
        for (std::size_t k = 0; k < sizes[g]; ++k) {
            grp.labels.push_back(labels[perm[pos++]]);
        }
        groups.push_back(grp);
    }
    return make_mimo_scenario(rng.matrix(nout, nin), HermitianGram(rng.gram(nin)),
                              HermitianGram(rng.gram(nout, 0.5)), groups);
}

inline GroupList group_names(const ChannelScenario& s) {
    GroupList out;
    for (const auto& g : s.groups) {
        out.push_back(g.name);
    }
    return out;
}

inline GroupList random_order(oracle::Rng& rng, const ChannelScenario& s) {
    const GroupList names = group_names(s);
    GroupList out;
    for (std::size_t k : rng.permutation(names.size())) {
        out.push_back(names[k]);
    }
    return out;
}

/// Two-user MAC with unit gains, powers p1, p2 and noise variance s2.
inline ChannelScenario mac2(double p1 = 1.0, double p2 = 1.0, double s2 = 1.0) {
    const cplx gains[] = {1.0, 1.0};
    const double powers[] = {p1, p2};
    return make_mac_scenario(gains, HermitianGram::diagonal(powers), s2);
}

} // namespace fixture
