// SPDX-License-Identifier: Apache-2.0
#include <random>

#include "doctest.h"
#include "mmcov/link.hpp"

using namespace mmcov;
using doctest::Approx;

namespace {

// Water level by bisection on sum(max(mu - 1/g, 0)) = P.
Eigen::VectorXd waterfill_oracle(const Eigen::VectorXd &g, double p) {
  double lo = 0, hi = p + 1.0 / g.maxCoeff() + 1e6;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (g(i) > 0) hi = std::max(hi, p + 1.0 / g(i));
  for (int it = 0; it < 400; ++it) {
    const double mu = 0.5 * (lo + hi);
    double s = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i)
      if (g(i) > 0) s += std::max(mu - 1.0 / g(i), 0.0);
    (s > p ? hi : lo) = mu;
  }
  Eigen::VectorXd out(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) out(i) = g(i) > 0 ? std::max(lo - 1.0 / g(i), 0.0) : 0.0;
  return out;
}

ChannelMatrix random_channel(std::mt19937_64 &rng, int nr, int nt) {
  std::normal_distribution<double> n(0, 1);
  ChannelMatrix h(nr, nt);
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = cplx(n(rng), n(rng));
  return h;
}

ChannelMatrix m1(cplx v) { return ChannelMatrix::Constant(1, 1, v); }

}  // namespace

TEST_CASE("waterfilling matches bisection oracle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.01, 20);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd g(1 + t % 6);
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = u(rng) * (t % 3 == 0 ? 0.05 : 1.0);
    const double p = 0.1 + t * 0.3;
    const auto w = waterfill(g, p);
    const auto o = waterfill_oracle(g, p);
    CHECK((w - o).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(w.sum() - p) < 1e-9);
    CHECK(w.minCoeff() >= 0.0);
  }
  // symmetric channels share the power evenly
  const auto even = waterfill(Eigen::VectorXd::Constant(2, 3.0), 4.0);
  CHECK(even(0) == Approx(2.0));
  CHECK(even(1) == Approx(2.0));
  CHECK(waterfill(Eigen::VectorXd::Zero(3), 1.0).sum() == 0.0);
}

TEST_CASE("SVD beamformers") {
  std::mt19937_64 rng(7);
  SUBCASE("trace normalization and rank checks") {
    const ChannelMatrix h = random_channel(rng, 4, 8);
    const auto s = svd_beamformers(h, 2, 10.0, 1.0);
    REQUIRE(s);
    CHECK(s->precoder.squaredNorm() == Approx(8.0));
    CHECK(s->combiner.squaredNorm() == Approx(4.0));
    CHECK(s->power.sum() == Approx(10.0));
    CHECK_THROWS_AS(svd_beamformers(h, 5, 10.0, 1.0), DomainError);
    CHECK_FALSE(svd_beamformers(ChannelMatrix::Zero(2, 2), 1, 1.0, 1.0));
  }
  SUBCASE("identity channel splits power evenly") {
    const auto s = svd_beamformers(ChannelMatrix::Identity(2, 2), 2, 2.0, 1.0);
    REQUIRE(s);
    CHECK(s->power(0) == Approx(1.0));
    CHECK(s->power(1) == Approx(1.0));
  }
  SUBCASE("single stream beats random beamformers") {
    std::normal_distribution<double> n(0, 1);
    for (int c = 0; c < 10; ++c) {
      const ChannelMatrix h = random_channel(rng, 2, 6);
      const auto s = svd_beamformers(h, 1, 1.0, 1.0);
      REQUIRE(s);
      const double best = snr_ris(h, ChannelMatrix::Zero(2, 6), s->precoder, s->combiner, 1.0, 1.0);
      for (int t = 0; t < 100; ++t) {
        Eigen::MatrixXcd f(6, 1), w(2, 1);
        for (Eigen::Index i = 0; i < 6; ++i) f(i) = cplx(n(rng), n(rng));
        for (Eigen::Index i = 0; i < 2; ++i) w(i) = cplx(n(rng), n(rng));
        f *= std::sqrt(6.0) / f.norm();
        w *= std::sqrt(2.0) / w.norm();
        CHECK(snr_ris(h, ChannelMatrix::Zero(2, 6), f, w, 1.0, 1.0) <= best * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("SNR expressions") {
  const Eigen::MatrixXcd one = Eigen::MatrixXcd::Ones(1, 1);
  const cplx hd(0.3, 0.1), hr(-0.05, 0.4);
  // scalar: |h_d + h_r|^2 sigma_s^2 / sigma_n^2
  CHECK(snr_ris(m1(hd), m1(hr), one, one, 2.0, 0.5) == Approx(std::norm(hd + hr) * 2.0 / 0.5));
  CHECK(snr_ris(m1(hd), m1(0), one, one, 2.0, 0.5) == Approx(std::norm(hd) * 4.0));
  CHECK(snr_ris(m1(hd), m1(hr), one, one, 2.0, 1.0) == Approx(0.5 * snr_ris(m1(hd), m1(hr), one, one, 2.0, 0.5)));
  // NCR without relay noise reduces to the RIS form
  CHECK(snr_ncr(m1(hd), m1(hr), m1(0.7), one, one, 2.0, 0.5, 0.0) == Approx(snr_ris(m1(hd), m1(hr), one, one, 2.0, 0.5)));

  // amplification raises the SNR toward the relay-noise ceiling |h_i|^2 P / sigma_z^2
  const double hi = 0.02, ho = 0.03, p = 1.0, sn = 1e-6, sz = 1e-6;
  double prev = 0;
  const double ceiling = hi * hi * p / sz;
  for (double g = 1; g < 1e6; g *= 3) {
    const double s = snr_ncr(m1(0), m1(g * ho * hi), m1(g * ho), one, one, p, sn, sz);
    const double closed = g * g * ho * ho * hi * hi * p / (sn + g * g * ho * ho * sz);
    CHECK(s == Approx(closed));
    CHECK(s > prev);
    CHECK(s < ceiling);
    prev = s;
  }
  CHECK(prev == Approx(ceiling).epsilon(1e-3));
}

TEST_CASE("long-term averaging") {
  CHECK(long_term_snr(2, 10, 0) == 10);
  CHECK(long_term_snr(2, 10, 1) == 2);
  CHECK(long_term_snr(2, 10, 0.5) == 6);
  CHECK_THROWS_AS(long_term_snr(2, 10, 1.5), DomainError);
}

TEST_CASE("joint assessment") {
  const LinkSnrs d{1.0, 8.0, 0.3}, r{0.5, 12.0, 0.6};
  SUBCASE("best link") {
    const auto a = joint_long_term_snr(d, r, JointMode::BestLink);
    CHECK(a.long_term == Approx(std::max(d.long_term(), r.long_term())));
    CHECK(a.chosen == ChosenLink::Direct);
    const auto none = joint_long_term_snr({}, {}, JointMode::BestLink);
    CHECK(none.chosen == ChosenLink::None);
  }
  SUBCASE("combined needs the combinations") {
    CHECK_THROWS_AS(joint_long_term_snr(d, r, JointMode::Combined), DomainError);
    const CombinationSnrs c{30, 9, 14, 0.2};
    const auto a = joint_long_term_snr(d, r, JointMode::Combined, c);
    CHECK(a.long_term >= 0.2);
    CHECK(a.long_term <= 30);
    CHECK(a.chosen == ChosenLink::Joint);
    const auto nob = joint_long_term_snr({1, 8, 0}, {1, 8, 0}, JointMode::Combined, c);
    CHECK(nob.long_term == 30);
  }
  SUBCASE("combinations from channels") {
    NoiseBudget b{1.0, 1.0, 0.5, 1};
    AidedChannels ch;
    ch.direct = ChannelMatrix::Constant(1, 2, cplx(1, 0));
    ch.relay = ChannelMatrix::Zero(1, 2);
    ch.direct_loss_db = 6;
    ch.relay_loss_db = 20;
    const auto c = aided_snr_combinations(ch, b);
    // no relay: combined collapses to the direct link's long-term SNR
    const double pd = 0.25;
    const double direct_lt = long_term_snr(c[2], c[0], pd);
    CHECK(combination_average(c, pd, 0.4) == Approx(direct_lt));
    CHECK(c[2] == Approx(c[0] * std::pow(10, -0.6)));
  }
  SUBCASE("Monte-Carlo agreement") {
    const CombinationSnrs c{25.0, 7.0, 11.0, 0.4};
    const double pd = 0.37, pr = 0.58;
    std::mt19937_64 rng(2024);
    std::bernoulli_distribution bd(pd), br(pr);
    const int n = 1'000'000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double v = c[static_cast<std::size_t>(2 * bd(rng) + br(rng))];
      s += v;
      s2 += v * v;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(combination_average(c, pd, pr) - mean) < 3 * se);
  }
}

TEST_CASE("names round-trip") {
  CHECK(joint_mode_from_string(to_string(JointMode::Combined)) == JointMode::Combined);
  CHECK(joint_mode_from_string("best-link") == JointMode::BestLink);
  CHECK_THROWS_AS(joint_mode_from_string("both"), DomainError);
  CHECK(to_string(ChosenLink::None) == "none");
}
