// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "mmcov/types.hpp"

namespace mmcov {

/// SVD precoder/combiner pair. F = V_{1:Ns} Xi^{1/2} and W = U_{1:Ns}, each
/// rescaled so that tr(F F^H) = N_t and tr(W W^H) = N_r.
struct BeamformerSolution {
  Eigen::MatrixXcd precoder;  // F, N_t x N_s
  Eigen::MatrixXcd combiner;  // W, N_r x N_s
  Eigen::VectorXd power;      // Xi diagonal, sums to the power budget
  Eigen::VectorXd singular_values;
  int streams = 0;
};

/// Waterfilling over parallel channels with power gains `gains` (|lambda|^2 /
/// noise). Returns allocations that sum to `total_power`.
Eigen::VectorXd waterfill(const Eigen::VectorXd &gains, double total_power);

/// Returns nullopt for an all-zero channel (the link cannot be served).
std::optional<BeamformerSolution> svd_beamformers(const ChannelMatrix &h, int streams, double total_power,
                                                  double noise_power);

/// Beamformed SNR with amplified relay noise:
///   tx_power / tr(FF^H) * tr(W^H H F F^H H^H W) / (N_r noise + tr(H_z H_z^H) relay_noise)
/// where H = H_d + H_ncr. With F and W at their trace normalization and a
/// single stream this is the usual received SNR.
double snr_ncr(const ChannelMatrix &h_direct, const ChannelMatrix &h_relay, const ChannelMatrix &h_noise,
               const Eigen::MatrixXcd &precoder, const Eigen::MatrixXcd &combiner, double tx_power, double noise_power,
               double relay_noise_power);

/// RIS form: as snr_ncr without the relay-noise term.
double snr_ris(const ChannelMatrix &h_direct, const ChannelMatrix &h_ris, const Eigen::MatrixXcd &precoder,
               const Eigen::MatrixXcd &combiner, double tx_power, double noise_power);

/// Blockage-averaged SNR in linear scale.
double long_term_snr(double snr_blocked, double snr_unblocked, double block_prob);

/// Blocked/unblocked SNR pair of one link plus its blockage probability.
struct LinkSnrs {
  double blocked = 0.0;
  double unblocked = 0.0;
  double block_prob = 0.0;

  double long_term() const { return long_term_snr(blocked, unblocked, block_prob); }
};

enum class JointMode { BestLink, Combined };
enum class ChosenLink { None, Direct, Relay, Joint };

std::string_view to_string(JointMode mode);
JointMode joint_mode_from_string(std::string_view name);
std::string_view to_string(ChosenLink link);

/// Aided SNR for each blockage state, indexed [2 * direct_blocked + relay_blocked].
using CombinationSnrs = std::array<double, 4>;

/// Probability-weighted average over the four independent blockage states.
double combination_average(const CombinationSnrs &snrs, double direct_block_prob, double relay_block_prob);

struct LinkAssessment {
  LinkSnrs direct;
  LinkSnrs relayed;
  double long_term = 0.0;
  ChosenLink chosen = ChosenLink::None;
};

/// Best-link mode keeps the larger long-term SNR; combined mode averages the
/// aided SNR of every blockage combination (`combinations` required).
LinkAssessment joint_long_term_snr(const LinkSnrs &direct, const LinkSnrs &relayed, JointMode mode,
                                   const std::optional<CombinationSnrs> &combinations = std::nullopt);

/// Channels of one UE position needed for the aided combinations.
struct AidedChannels {
  ChannelMatrix direct;
  ChannelMatrix relay;
  ChannelMatrix relay_noise;  // empty for RIS
  double direct_loss_db = 0.0;
  double relay_loss_db = 0.0;
};

struct NoiseBudget {
  double tx_power = 0.0;     // mW
  double noise = 0.0;        // UE noise, mW
  double relay_noise = 0.0;  // NCR noise, mW
  int streams = 1;
};

/// SNR of the summed channel with SVD beamforming; zero for a zero channel.
double beamformed_snr(const ChannelMatrix &h_direct, const ChannelMatrix &h_relay, const ChannelMatrix &h_noise,
                      const NoiseBudget &budget);

CombinationSnrs aided_snr_combinations(const AidedChannels &channels, const NoiseBudget &budget);

}  // namespace mmcov
