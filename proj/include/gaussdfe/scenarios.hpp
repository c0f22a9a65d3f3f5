#pragma once

// Linear Gaussian channels Y = H X + N, successive-decoding rates and the
// two equivalent decision-feedback filter forms.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gaussdfe/gaussian_space.hpp"
#include "gaussdfe/mmse.hpp"

namespace gaussdfe {

enum class ChannelKind { Isi, Mimo, Mac };

const char* to_string(ChannelKind kind);

/// Name of the observation group in every JointGram built from a scenario.
inline constexpr const char* kObservationGroup = "Y";

struct ChannelScenario {
    ChannelKind kind = ChannelKind::Mimo;
    CMatrix H;                              ///< n_out x n_in
    GaussianSet input;                      ///< R_xx with input labels
    HermitianGram noise_gram;               ///< R_nn, full rank
    std::vector<std::string> output_labels; ///< y1..y_nout
    std::vector<VariableGroup> groups;      ///< decoding stages; partition input labels

    /// ISI only: taps h0..hL and block length (H is derived from them).
    std::vector<cplx> taps;
    std::size_t block_length = 0;
};

/// Lower-triangular banded Toeplitz matrix H[i][j] = h[i-j], 0 <= i-j <= L,
/// truncated to an N x N block.
CMatrix isi_channel_matrix(std::span<const cplx> taps, std::size_t block_length);

/// Per-variable groups, each named after its single label.
std::vector<VariableGroup> singleton_groups(std::span<const std::string> labels);

ChannelScenario make_isi_scenario(std::vector<cplx> taps, std::size_t block_length, HermitianGram input_gram,
                                  HermitianGram noise_gram, std::vector<VariableGroup> groups = {});
ChannelScenario make_mimo_scenario(CMatrix H, HermitianGram input_gram, HermitianGram noise_gram,
                                   std::vector<VariableGroup> groups = {});
/// K-user multiple-access channel with a 1 x K row of gains.
ChannelScenario make_mac_scenario(std::span<const cplx> gains, HermitianGram input_gram, double noise_variance,
                                  std::vector<VariableGroup> groups = {});

/// Checks every scenario invariant; throws on violation.
void validate(const ChannelScenario& s);

/// JointGram over (input groups..., Y) with R_yy = H R_xx H* + R_nn and
/// R_xy = R_xx H*.
JointGram build_joint_gram(const ChannelScenario& s);

struct RateProfile {
    GroupList order;
    std::vector<double> rates_nats;           ///< R_i per stage
    std::vector<double> input_entropy_nats;   ///< h(X_i | X_1^{i-1})
    std::vector<double> error_entropy_nats;   ///< h(E_i | E_1^{i-1})
    double total_nats = 0.0;
    MutualInfo reference;                     ///< I(X;Y) computed directly

    std::vector<double> rates_bits() const;
    double total_bits() const;
};

/// Incremental rates R_i = h(X_i|X_1^{i-1}) - h(E_i|E_1^{i-1}) for the
/// given decoding order; `order` must list every non-observation group once.
RateProfile incremental_rates(const JointGram& j, const GroupList& order,
                              const std::string& observed = kObservationGroup);

struct DfeFilters {
    GroupList order;
    std::vector<std::string> labels;        ///< input labels in decoding order
    std::vector<std::size_t> stage_offsets; ///< stage i owns [offsets[i], offsets[i+1])
    CMatrix forward;                        ///< A_xy in decoding order
    CMatrix predictor;                      ///< B, strictly lower block triangular
    CMatrix feedforward_std;                ///< (I - B) A_xy
    CMatrix feedback_std;                   ///< B
    HermitianGram error_gram;               ///< R_ee in decoding order
    std::vector<HermitianGram> stage_error_grams; ///< Gram of (E_i)_{perp E_1^{i-1}}

    std::size_t stage_count() const { return order.size(); }
    std::size_t stage_of(std::size_t var) const;
};

DfeFilters dfe_filters(const JointGram& j, const GroupList& order, const std::string& observed = kObservationGroup);

/// Decoder input in noise-predictive form: X_{|Y} + B (X - X_{|Y}).
CMatrix noise_predictive_input(const DfeFilters& f, const CMatrix& estimate, const CMatrix& x);

/// Decoder input in standard form: (I - B) X_{|Y} + B X.
CMatrix standard_form_input(const DfeFilters& f, const CMatrix& estimate, const CMatrix& x);

/// Drops variables of group `y` whose innovations pivot is zero so that the
/// group becomes linearly independent. A group left empty is removed.
JointGram reduce_observations(const JointGram& j, const std::string& y);

} // namespace gaussdfe
