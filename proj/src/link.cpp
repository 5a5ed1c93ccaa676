// SPDX-License-Identifier: Apache-2.0
#include "mmcov/link.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace mmcov {

Eigen::VectorXd waterfill(const Eigen::VectorXd &gains, double total_power) {
  if (!(total_power >= 0.0)) throw DomainError("waterfill: negative power budget");
  const Eigen::Index n = gains.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < n; ++i)
    if (gains(i) > 0.0) order.push_back(i);
  if (order.empty() || total_power == 0.0) return out;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return gains(a) > gains(b); });

  // Drop the weakest channel until the water level clears its floor.
  std::size_t active = order.size();
  double level = 0.0;
  while (active > 0) {
    double inv_sum = 0.0;
    for (std::size_t i = 0; i < active; ++i) inv_sum += 1.0 / gains(order[i]);
    level = (total_power + inv_sum) / static_cast<double>(active);
    if (level > 1.0 / gains(order[active - 1])) break;
    --active;
  }
  for (std::size_t i = 0; i < active; ++i) out(order[i]) = level - 1.0 / gains(order[i]);
  // Remove the rounding residue so the budget is met exactly.
  const double sum = out.sum();
  if (sum > 0.0) out *= total_power / sum;
  return out;
}

std::optional<BeamformerSolution> svd_beamformers(const ChannelMatrix &h, int streams, double total_power,
                                                  double noise_power) {
  if (streams < 1) throw DomainError("svd_beamformers: stream count must be >= 1");
  if (!(noise_power > 0.0)) throw DomainError("svd_beamformers: noise power must be positive");
  if (!(total_power > 0.0)) throw DomainError("svd_beamformers: power budget must be positive");
  if (h.size() == 0 || h.cwiseAbs2().maxCoeff() == 0.0) return std::nullopt;

  Eigen::JacobiSVD<ChannelMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd &s = svd.singularValues();
  const double tol = s(0) * static_cast<double>(std::max(h.rows(), h.cols())) * std::numeric_limits<double>::epsilon();
  const int rank = static_cast<int>((s.array() > tol).count());
  if (streams > rank)
    throw DomainError("svd_beamformers: " + std::to_string(streams) + " streams requested but channel rank is " +
                      std::to_string(rank));

  BeamformerSolution sol;
  sol.streams = streams;
  sol.singular_values = s.head(streams);
  const Eigen::VectorXd gains = sol.singular_values.array().square() / noise_power;
  sol.power = waterfill(gains, total_power);

  const double nt = static_cast<double>(h.cols());
  const double nr = static_cast<double>(h.rows());
  const double ptot = sol.power.sum();
  sol.precoder = svd.matrixV().leftCols(streams) * sol.power.cwiseSqrt().asDiagonal();
  sol.precoder *= std::sqrt(nt / ptot);
  sol.combiner = svd.matrixU().leftCols(streams) * std::sqrt(nr / streams);
  return sol;
}

double snr_ncr(const ChannelMatrix &h_direct, const ChannelMatrix &h_relay, const ChannelMatrix &h_noise,
               const Eigen::MatrixXcd &precoder, const Eigen::MatrixXcd &combiner, double tx_power, double noise_power,
               double relay_noise_power) {
  if (h_direct.rows() != h_relay.rows() || h_direct.cols() != h_relay.cols())
    throw DomainError("snr: direct and relayed channel dimensions differ");
  if (precoder.rows() != h_direct.cols() || combiner.rows() != h_direct.rows() || precoder.cols() != combiner.cols())
    throw DomainError("snr: beamformer dimensions do not match the channel");
  const double f_trace = precoder.squaredNorm();
  if (f_trace == 0.0) return 0.0;
  const Eigen::MatrixXcd eff = combiner.adjoint() * (h_direct + h_relay) * precoder;
  const double signal = tx_power / f_trace * eff.squaredNorm();
  double denom = static_cast<double>(h_direct.rows()) * noise_power;
  if (h_noise.size() != 0) denom += h_noise.squaredNorm() * relay_noise_power;
  return signal / denom;
}

double snr_ris(const ChannelMatrix &h_direct, const ChannelMatrix &h_ris, const Eigen::MatrixXcd &precoder,
               const Eigen::MatrixXcd &combiner, double tx_power, double noise_power) {
  return snr_ncr(h_direct, h_ris, ChannelMatrix(), precoder, combiner, tx_power, noise_power, 0.0);
}

double long_term_snr(double snr_blocked, double snr_unblocked, double block_prob) {
  if (!(block_prob >= 0.0 && block_prob <= 1.0)) throw DomainError("long_term_snr: probability outside [0, 1]");
  return block_prob * snr_blocked + (1.0 - block_prob) * snr_unblocked;
}

std::string_view to_string(JointMode mode) { return mode == JointMode::BestLink ? "best-link" : "combined"; }

JointMode joint_mode_from_string(std::string_view name) {
  if (name == "best-link") return JointMode::BestLink;
  if (name == "combined") return JointMode::Combined;
  throw DomainError("unknown joint mode '" + std::string(name) + "'");
}

std::string_view to_string(ChosenLink link) {
  switch (link) {
    case ChosenLink::Direct: return "direct";
    case ChosenLink::Relay: return "relay";
    case ChosenLink::Joint: return "joint";
    case ChosenLink::None: break;
  }
  return "none";
}

double combination_average(const CombinationSnrs &snrs, double pd, double pr) {
  if (!(pd >= 0.0 && pd <= 1.0 && pr >= 0.0 && pr <= 1.0))
    throw DomainError("combination_average: probability outside [0, 1]");
  return (1 - pd) * (1 - pr) * snrs[0] + (1 - pd) * pr * snrs[1] + pd * (1 - pr) * snrs[2] + pd * pr * snrs[3];
}

LinkAssessment joint_long_term_snr(const LinkSnrs &direct, const LinkSnrs &relayed, JointMode mode,
                                   const std::optional<CombinationSnrs> &combinations) {
  LinkAssessment out{direct, relayed, 0.0, ChosenLink::None};
  if (mode == JointMode::Combined) {
    if (!combinations) throw DomainError("joint_long_term_snr: combined mode needs the blockage combinations");
    out.long_term = combination_average(*combinations, direct.block_prob, relayed.block_prob);
    out.chosen = out.long_term > 0.0 ? ChosenLink::Joint : ChosenLink::None;
    return out;
  }
  const double d = direct.long_term();
  const double r = relayed.long_term();
  out.long_term = std::max(d, r);
  if (out.long_term > 0.0) out.chosen = d >= r ? ChosenLink::Direct : ChosenLink::Relay;
  return out;
}

double beamformed_snr(const ChannelMatrix &h_direct, const ChannelMatrix &h_relay, const ChannelMatrix &h_noise,
                      const NoiseBudget &budget) {
  const ChannelMatrix sum = h_direct + h_relay;
  const auto bf = svd_beamformers(sum, budget.streams, budget.tx_power, budget.noise);
  if (!bf) return 0.0;
  return snr_ncr(h_direct, h_relay, h_noise, bf->precoder, bf->combiner, budget.tx_power, budget.noise,
                 budget.relay_noise);
}

CombinationSnrs aided_snr_combinations(const AidedChannels &ch, const NoiseBudget &budget) {
  const double ad = std::pow(10.0, -ch.direct_loss_db / 20.0);
  const double ar = std::pow(10.0, -ch.relay_loss_db / 20.0);
  CombinationSnrs out{};
  for (int d = 0; d < 2; ++d)
    for (int r = 0; r < 2; ++r) {
      const double sd = d ? ad : 1.0;
      const double sr = r ? ar : 1.0;
      const ChannelMatrix noise = ch.relay_noise.size() ? ChannelMatrix(sr * ch.relay_noise) : ChannelMatrix();
      out[static_cast<std::size_t>(2 * d + r)] = beamformed_snr(sd * ch.direct, sr * ch.relay, noise, budget);
    }
  return out;
}

}  // namespace mmcov
