// SPDX-License-Identifier: Apache-2.0
#include "mmcov/channel.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace mmcov {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::array<std::int64_t, 3> quantize(const Vec3 &p) {
  return {std::llround(p.x * 1e3), std::llround(p.y * 1e3), std::llround(p.z * 1e3)};
}

std::uint64_t hash_point(const std::array<std::int64_t, 3> &q, std::uint64_t h) {
  for (auto c : q) h = splitmix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

double amplitude_at(double distance_m, const PathGainModel &model, double shadow_factor) {
  return std::pow(10.0, -pathloss_db(distance_m, model) / 20.0) * shadow_factor;
}

// Near-field leg between every element of `from` and every element of `to`.
// Entry (i, j) couples element j of `from` to element i of `to`.
ChannelMatrix spherical_leg(const PlacedArray &from, const PlacedArray &to, const PathGainModel &gains) {
  const double wl = gains.wavelength();
  const double k = 2.0 * kPi / wl;
  const auto off_from = element_offsets(from.array);
  const auto off_to = element_offsets(to.array);
  const PathAmplitude center = path_amplitude(distance(from.position, to.position), gains,
                                              link_seed(from.position, to.position, gains.seed));
  const double shadow = std::pow(10.0, -center.shadowing_db / 20.0);

  const PanelAxes ax_from = panel_axes(from.array.boresight);
  const PanelAxes ax_to = panel_axes(to.array.boresight);
  ChannelMatrix h(static_cast<Eigen::Index>(off_to.size()), static_cast<Eigen::Index>(off_from.size()));
  for (std::size_t j = 0; j < off_from.size(); ++j) {
    const Vec3 pj = from.position + off_from[j];
    for (std::size_t i = 0; i < off_to.size(); ++i) {
      const Vec3 pi = to.position + off_to[i];
      const Vec3 d = pi - pj;
      const double r = d.norm();
      const Vec3 u = d * (1.0 / r);
      const double g_from = element_gain(from.array.pattern, local_direction(ax_from, u));
      const double g_to = element_gain(to.array.pattern, local_direction(ax_to, u * -1.0));
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::polar(amplitude_at(r, gains, shadow) * g_from * g_to, -k * r);
    }
  }
  return h;
}

bool in_front(const PlanarArray &array, const Vec3 &panel_pos, const Vec3 &target) {
  const Vec3 n = panel_axes(array.boresight).normal;
  return (target - panel_pos).dot(n) > 0.0;
}

}  // namespace

SeedContext link_seed(const Vec3 &a, const Vec3 &b, std::uint64_t global_seed) {
  auto qa = quantize(a);
  auto qb = quantize(b);
  if (qb < qa) std::swap(qa, qb);
  return {hash_point(qb, hash_point(qa, splitmix64(global_seed)))};
}

double pathloss_db(double distance_m, const PathGainModel &model) {
  if (!(distance_m > 0.0)) throw DomainError("path_amplitude: distance must be positive");
  switch (model.kind) {
    case PathlossKind::CloseIn3gpp:
      return 32.4 + 20.0 * std::log10(model.carrier_hz / 1e9) + 20.0 * std::log10(distance_m);
    case PathlossKind::FreeSpace:
      return 20.0 * std::log10(4.0 * kPi * distance_m / model.wavelength());
  }
  return 0.0;
}

double shadowing_draw_db(const PathGainModel &model, SeedContext ctx) {
  if (model.shadowing_std_db < 0.0) throw DomainError("path gain model: shadowing std must be >= 0");
  if (model.shadowing_std_db == 0.0) return 0.0;
  std::mt19937_64 rng(ctx.key);
  std::normal_distribution<double> normal(0.0, model.shadowing_std_db);
  return normal(rng);
}

PathAmplitude path_amplitude(double distance_m, const PathGainModel &model, SeedContext ctx) {
  const double pl = pathloss_db(distance_m, model);
  const double shadow = shadowing_draw_db(model, ctx);
  return {std::pow(10.0, -(pl + shadow) / 20.0), shadow};
}

double thermal_noise_mw(double bandwidth_hz, double noise_figure_db) {
  return dbm2mw(kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

CVector receive_response(const PlanarArray &array, const Direction &local, double wavelength) {
  return array_response(array, local, wavelength).conjugate();
}

ChannelMatrix far_field_channel(const PlacedArray &tx, const PlacedArray &rx, const PathGainModel &gains,
                                SeedContext seed) {
  const double wl = gains.wavelength();
  const double r = distance(tx.position, rx.position);
  const Vec3 u = (rx.position - tx.position).normalized();
  const Direction dep = local_direction(tx.array.boresight, u);
  const Direction arr = local_direction(rx.array.boresight, u * -1.0);
  const PathAmplitude amp = path_amplitude(r, gains, seed);
  const cplx alpha = std::polar(amp.amplitude, -2.0 * kPi * r / wl);
  const double rho = element_gain(tx.array.pattern, dep) * element_gain(rx.array.pattern, arr);
  const CVector a_t = array_response(tx.array, dep, wl);
  const CVector a_r = receive_response(rx.array, arr, wl);
  return (alpha * rho) * a_r * a_t.adjoint();
}

DirectChannel direct_channel(const PlacedArray &bs, const PlacedArray &ue, const ScenarioMap &map,
                             const PathGainModel &gains) {
  if (bs.position == ue.position) throw DomainError("direct_channel: BS and UE positions coincide");
  DirectChannel out;
  out.h = ChannelMatrix::Zero(ue.array.size(), bs.array.size());
  if (!in_sector_fov(bs.array.boresight, ue.position, bs.position)) {
    out.out_of_fov = true;
    return out;
  }
  if (!los_visible(bs.position, ue.position, map)) {
    out.static_blocked = true;
    return out;
  }
  out.h = far_field_channel(bs, ue, gains, link_seed(bs.position, ue.position, gains.seed));
  return out;
}

ChannelMatrix ris_incident_channel(const PlacedArray &bs, const PlacedArray &ris, const PathGainModel &gains) {
  if (!in_front(ris.array, ris.position, bs.position)) throw DomainError("ris_leg_channels: BS is behind the RIS plane");
  return spherical_leg(bs, ris, gains);
}

ChannelMatrix ris_reflected_channel(const PlacedArray &ris, const PlacedArray &ue, const PathGainModel &gains) {
  if (!in_front(ris.array, ris.position, ue.position)) throw DomainError("ris_leg_channels: UE is behind the RIS plane");
  return spherical_leg(ris, ue, gains);
}

RisLegs ris_leg_channels(const PlacedArray &bs, const PlacedArray &ris, const PlacedArray &ue,
                         const PathGainModel &gains) {
  return {ris_incident_channel(bs, ris, gains), ris_reflected_channel(ris, ue, gains)};
}

RISPhaseConfig configure_ris(const CVector &incident_ref, const CVector &reflected_ref) {
  if (incident_ref.size() != reflected_ref.size()) throw DomainError("configure_ris: leg sizes differ");
  RISPhaseConfig cfg;
  cfg.phases.resize(incident_ref.size());
  for (Eigen::Index m = 0; m < incident_ref.size(); ++m) {
    double phi = -std::arg(incident_ref(m)) - std::arg(reflected_ref(m));
    phi = std::fmod(phi, 2.0 * kPi);
    if (phi < 0.0) phi += 2.0 * kPi;
    cfg.phases(m) = phi;
  }
  return cfg;
}

ChannelMatrix ris_cascade(const ChannelMatrix &reflected, const RISPhaseConfig &phase, const ChannelMatrix &incident) {
  const auto m = phase.phases.size();
  if (reflected.cols() != m || incident.rows() != m)
    throw DomainError("ris_cascade: dimension mismatch (" + std::to_string(reflected.rows()) + "x" +
                      std::to_string(reflected.cols()) + ") * diag(" + std::to_string(m) + ") * (" +
                      std::to_string(incident.rows()) + "x" + std::to_string(incident.cols()) + ")");
  CVector phasor(m);
  for (Eigen::Index i = 0; i < m; ++i) phasor(i) = std::polar(1.0, phase.phases(i));
  return (reflected * phasor.asDiagonal()) * incident;
}

NcrBeamformers ncr_beamformers(const NCRConfig &ncr, const Vec3 &bs_position, const ChannelMatrix &service_channel,
                               double wavelength) {
  if (!in_sector_fov(ncr.donor.boresight, bs_position, ncr.position))
    throw DomainError("ncr_beamformers: BS is outside the donor panel FoV");
  const int np = ncr.panel_size();
  if (service_channel.cols() != ncr.service.size()) throw DomainError("ncr_beamformers: service channel size mismatch");

  NcrBeamformers bf;
  const Direction to_bs = local_direction(ncr.donor.boresight, (bs_position - ncr.position).normalized());
  bf.combiner = receive_response(ncr.donor, to_bs, wavelength);
  bf.combiner *= std::sqrt(static_cast<double>(np)) / bf.combiner.norm();

  Eigen::JacobiSVD<ChannelMatrix> svd(service_channel, Eigen::ComputeThinV);
  if (svd.singularValues().size() == 0 || svd.singularValues()(0) == 0.0) {
    bf.precoder = CVector::Zero(ncr.service.size());
    return bf;
  }
  bf.precoder = svd.matrixV().col(0) * std::sqrt(static_cast<double>(ncr.service.size()));
  return bf;
}

double ncr_e2e_gain_db(double amp_gain_db, int panel_elements) {
  return amp_gain_db + 20.0 * std::log10(static_cast<double>(panel_elements));
}

NcrChannel ncr_channel(const ChannelMatrix &donor_channel, const ChannelMatrix &service_channel, const NCRConfig &ncr,
                       const NcrBeamformers &bf) {
  if (!(ncr.amp_power_gain >= 0.0) || !std::isfinite(ncr.amp_power_gain))
    throw DomainError("ncr_channel: amplification power gain must be finite and non-negative");
  if (donor_channel.rows() != bf.combiner.size() || service_channel.cols() != bf.precoder.size())
    throw DomainError("ncr_channel: beamformer/channel dimension mismatch");

  NcrChannel out;
  double power_gain = ncr.amp_power_gain;
  const double array_term = bf.combiner.squaredNorm() * bf.precoder.squaredNorm();
  out.requested_gain_db = lin2db(power_gain * array_term);
  out.gain_db = out.requested_gain_db;
  if (out.requested_gain_db > ncr.max_e2e_gain_db) {
    power_gain = db2lin(ncr.max_e2e_gain_db) / array_term;
    out.gain_db = ncr.max_e2e_gain_db;
    out.clamped = true;
  }
  const double g = std::sqrt(power_gain);
  const CVector tx_beam = service_channel * bf.precoder;  // H_o f_p
  out.h_noise = g * tx_beam * bf.combiner.adjoint();
  out.h = g * tx_beam * (bf.combiner.adjoint() * donor_channel);
  return out;
}

}  // namespace mmcov
