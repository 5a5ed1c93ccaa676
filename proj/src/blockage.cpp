// SPDX-License-Identifier: Apache-2.0
#include "mmcov/blockage.hpp"

#include <algorithm>

namespace mmcov {

namespace {

// One TR 38.901 model-B edge term. `shadowed` is true when the direct ray
// passes on the screen side of this edge.
double edge_term(double d1, double d2, double r, bool shadowed, double wavelength) {
  const double excess = std::max(d1 + d2 - r, 0.0);
  const double mag = (kPi / 2.0) * std::sqrt(kPi / wavelength * excess);
  return std::atan(shadowed ? mag : -mag) / kPi;
}

}  // namespace

void validate_blockage(const BlockageParams &p) {
  if (!(p.density > 0.0 && p.speed > 0.0 && p.duration_s > 0.0 && p.blocker_height > 0.0 && p.blocker_width > 0.0))
    throw DomainError("blockage parameters must all be positive");
}

double blocker_rate_constant(double z_t, double z_r, const BlockageParams &p) {
  if (z_t == z_r) throw DomainError("dynamic_block_probability: transmitter and receiver heights are equal");
  if (z_t < z_r) std::swap(z_t, z_r);
  double ratio = 0.0;
  switch (p.form) {
    case HeightRatioForm::Corrected:
      ratio = (p.blocker_height - z_r) / (z_t - z_r);
      break;
    case HeightRatioForm::AsPrinted:
      ratio = (p.blocker_height - z_t) / (z_t - z_r);
      break;
  }
  // A blocker shorter than the lower endpoint never cuts the ray; one taller
  // than the upper endpoint cuts it wherever it stands.
  ratio = std::clamp(ratio, 0.0, 1.0);
  return (2.0 / kPi) * p.density * p.speed * ratio;
}

double dynamic_block_probability(double r, double z_t, double z_r, const BlockageParams &p) {
  if (!(r >= 0.0)) throw DomainError("dynamic_block_probability: negative link length");
  validate_blockage(p);
  const double x = r * p.duration_s * blocker_rate_constant(z_t, z_r, p);
  return x / (1.0 + x);
}

KnifeEdgeTerms knife_edge_terms(const KnifeEdgeGeometry &g, double wavelength) {
  const double dx = g.rx.x - g.tx.x, dy = g.rx.y - g.tx.y;
  const double len = std::hypot(dx, dy);
  if (len <= 1e-9) throw DomainError("knife_edge_loss: link has no horizontal extent");
  const double ux = dx / len, uy = dy / len;
  const double bx = g.blocker.x - g.tx.x, by = g.blocker.y - g.tx.y;
  const double along = bx * ux + by * uy;
  const double lateral = -bx * uy + by * ux;
  if (along <= 1e-9 || along >= len - 1e-9)
    throw DomainError("knife_edge_loss: blocker is not strictly between the endpoints");

  const double s = along / len;
  const double d_tx = along, d_rx = len - along;
  const double ray_z = g.tx.z + s * (g.rx.z - g.tx.z);

  KnifeEdgeTerms t;
  // Side view: vertical plane containing the link.
  const double r_side = std::hypot(len, g.rx.z - g.tx.z);
  const auto side = [&](double edge_z, bool shadowed) {
    return edge_term(std::hypot(d_tx, edge_z - g.tx.z), std::hypot(d_rx, edge_z - g.rx.z), r_side, shadowed,
                     wavelength);
  };
  t.f_h1 = side(g.blocker_height, ray_z < g.blocker_height);
  t.f_h2 = side(0.0, ray_z > 0.0);

  // Top view: horizontal plane, ray at lateral offset 0.
  const double w1 = lateral - 0.5 * g.blocker_width;
  const double w2 = lateral + 0.5 * g.blocker_width;
  const auto top = [&](double edge_y, bool shadowed) {
    return edge_term(std::hypot(d_tx, edge_y), std::hypot(d_rx, edge_y), len, shadowed, wavelength);
  };
  t.f_w1 = top(w1, w1 < 0.0);
  t.f_w2 = top(w2, w2 > 0.0);
  return t;
}

double knife_edge_loss(const KnifeEdgeGeometry &g, double wavelength) {
  const KnifeEdgeTerms t = knife_edge_terms(g, wavelength);
  return -20.0 * std::log10(1.0 - (t.f_h1 + t.f_h2) * (t.f_w1 + t.f_w2));
}

KnifeEdgeGeometry canonical_blocker(const Vec3 &a, const Vec3 &b, const BlockageParams &params) {
  KnifeEdgeGeometry g;
  g.tx = a.z >= b.z ? a : b;
  g.rx = a.z >= b.z ? b : a;
  g.blocker = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  g.blocker_height = params.blocker_height;
  g.blocker_width = params.blocker_width;
  return g;
}

LinkBlockageState link_blockage_state(const Vec3 &a, const Vec3 &b, const ScenarioMap &map,
                                      const BlockageParams &params, double wavelength) {
  if (a == b) throw DomainError("link_blockage_state: endpoints coincide");
  LinkBlockageState s;
  s.static_blocked = !los_visible(a, b, map);
  s.dynamic_block_prob = dynamic_block_probability(distance(a, b), a.z, b.z, params);
  s.blocked_loss_db = knife_edge_loss(canonical_blocker(a, b, params), wavelength);
  return s;
}

}  // namespace mmcov
