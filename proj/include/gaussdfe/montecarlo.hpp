#pragma once

// Seeded Monte Carlo checks: sampling through the innovations
// representation, genie-aided successive decoding, and a small
// random-codebook experiment.
//
// Randomness: every trial t draws from its own SplitMix64 substream keyed by
// (master_seed, t); the codebook experiment additionally keys codeword c by
// (master_seed, t, c + 1). Normals come from the Box-Muller transform on
// 53-bit uniforms, and a proper complex variable of variance v is
// (G1 + i G2) sqrt(v / 2). Results are reduced in trial-index order, so a
// given seed reproduces bit-identical output.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gaussdfe/gaussian_space.hpp"
#include "gaussdfe/scenarios.hpp"

namespace gaussdfe {

struct SeedSpec {
    std::uint64_t master_seed = 0;
};

/// SplitMix64; satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1].
    double uniform_open0();

    /// Proper complex Gaussian with the given variance.
    cplx proper_normal(double variance);

private:
    std::uint64_t state_;
};

/// Substream for (seed, trial, sub).
SplitMix64 substream(const SeedSpec& seed, std::uint64_t trial, std::uint64_t sub = 0);

struct SampleBatch {
    std::vector<std::string> labels;
    CMatrix values; ///< one row per trial, columns in label order

    std::size_t n_trials() const { return values.rows(); }
};

/// Draws X = L E with independent innovations E_i of variance d2_i.
SampleBatch sample_gaussian(const GaussianSet& x, const SeedSpec& seed, std::size_t n_trials);

/// (1/n) sum_t x_t x_t*. Needs at least two trials.
HermitianGram empirical_gram(const SampleBatch& b);

struct GenieRunReport {
    std::size_t n_trials = 0;
    GroupList order;
    std::vector<std::string> labels;   ///< decision variables, decoding order
    std::vector<std::size_t> stage;    ///< 1-based stage of each variable
    std::vector<double> theory_var;    ///< diagonal of the stage error Grams
    std::vector<double> empirical_var; ///< measured decision-point error variance
    std::vector<double> pivots;        ///< LDL* pivots of R_ee (decoding order)
    /// Normalized |<error_i, Y_k>| / sqrt(var_i var_k), one row per variable.
    CMatrix error_observation_corr;
    /// Empirical Gram of the forward-filter errors E = X - A_xy Y.
    HermitianGram forward_error_gram;

    double rel_err(std::size_t var) const;
    double max_abs_corr() const;
    /// 5 / sqrt(n): five standard errors of a normalized correlation.
    double corr_bound() const;
    /// |empirical - theory| <= 5 theory / sqrt(n) for every variable.
    bool variances_within_bounds() const;
    bool correlations_within_bounds() const;
};

/// Genie-aided successive decoding: every stage is fed back the true
/// transmitted values of the stages before it.
GenieRunReport run_genie_dfe(const ChannelScenario& s, const GroupList& order, const DfeFilters& f,
                             const SeedSpec& seed, std::size_t n_trials);

/// Upper bound on n * R (bits), i.e. at most 2^16 codewords.
inline constexpr double kMaxCodebookBits = 16.0;

struct CodebookExperiment {
    std::size_t stage = 0; ///< 1-based
    std::size_t block_length = 0;
    double rate_bits = 0.0;
    double incremental_rate_bits = 0.0;
    std::uint64_t codebook_size = 0;
    std::size_t trials = 0;
    std::size_t word_errors = 0;

    double wer() const { return trials == 0 ? 0.0 : static_cast<double>(word_errors) / static_cast<double>(trials); }
};

/// ceil(2^(n R)) with n R checked against kMaxCodebookBits.
std::uint64_t codebook_size(std::size_t block_length, double rate_bits);

/// Random Gaussian code for one stage over `block_length` channel uses.
/// The decoder sees the genie-aided decision-point values and picks the
/// codeword with the smallest Gaussian log-likelihood distance.
CodebookExperiment run_codebook_experiment(const ChannelScenario& s, const GroupList& order, std::size_t stage,
                                           std::size_t block_length, double rate_bits, const SeedSpec& seed,
                                           std::size_t trials);

} // namespace gaussdfe
