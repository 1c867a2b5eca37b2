// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "urllc/mimo.hpp"

using namespace urllc::mimo;
using urllc::simcore::SeededStream;

namespace {

std::array<CovariancePair, kTerminals> covariances(const ClusterChannelSpec& spec) {
  return {covariance(spec, 0), covariance(spec, 1)};
}

ClusterChannelSpec default_spec(std::size_t n) {
  ScenarioParams p;
  p.terminal_antennas = n;
  return make_cluster_spec(p);
}

// Departure angle whose steering vector is the k-th DFT column of an M array.
double dft_angle(std::size_t m, int k) { return std::asin(2.0 * k / static_cast<double>(m)); }

}  // namespace

TEST_CASE("steering vectors") {
  for (double a : {-1.0, 0.0, 0.3}) CHECK(steering_vector(16, a).norm() == doctest::Approx(1.0).epsilon(1e-14));
  const auto s = steering_vector(4, std::asin(0.5));
  CHECK(std::abs(s(1) - std::polar(0.5, std::numbers::pi / 2)) < 1e-14);
  // DFT angles give orthogonal responses.
  CHECK(std::abs(steering_vector(8, dft_angle(8, 0)).dot(steering_vector(8, dft_angle(8, 1)))) < 1e-14);
}

TEST_CASE("scenario geometry") {
  ScenarioParams p;
  const auto spec = make_cluster_spec(p);
  for (std::size_t k = 0; k < kTerminals; ++k) {
    REQUIRE(spec.paths[k].size() == 10);
    CHECK(std::abs(spec.total_power(k) - 200.0) < 1e-12 * 200.0);
    CHECK(spec.paths[k].front().power / spec.paths[k].back().power == doctest::Approx(100.0).epsilon(1e-12));
    for (const auto& path : spec.paths[k]) {
      const double dep = path.departure_rad * 180.0 / std::numbers::pi;
      CHECK(std::abs(dep - p.cluster_center_deg[k]) <= 5.0);
      CHECK(std::abs(path.arrival_rad) <= std::numbers::pi / 3);
    }
  }
  const auto again = make_cluster_spec(p);
  CHECK(again.paths[0][3].departure_rad == spec.paths[0][3].departure_rad);
  p.geometry_seed = 2;
  CHECK(make_cluster_spec(p).paths[0][3].departure_rad != spec.paths[0][3].departure_rad);
  p.path_gain_total = 0.0;
  CHECK_THROWS(make_cluster_spec(p));
}

TEST_CASE("single-path channel is rank one") {
  ClusterChannelSpec spec;
  spec.bs_antennas = 16;
  spec.terminal_antennas = 3;
  spec.paths[0] = {{0.2, -0.4, 1.0}};
  spec.paths[1] = {{-0.3, 0.1, 1.0}};
  SeededStream s(5, 0);
  const auto ch = draw_channel(spec, s);
  const CVector tx = steering_vector(16, 0.2), rx = steering_vector(3, -0.4);
  const std::complex<double> alpha = rx.dot(ch.H[0] * tx);
  CHECK((ch.H[0] - alpha * rx * tx.adjoint()).norm() < 1e-12);
  CHECK(ch.H[0].norm() == doctest::Approx(std::abs(alpha)).epsilon(1e-12));

  const auto c = covariance(spec, 0);
  CHECK(c.rank == 1);
  CHECK(std::abs(std::abs(c.v_max().dot(tx)) - 1.0) < 1e-12);

  SeededStream s2(5, 0);
  CHECK(draw_channel(spec, s2).H[0] == ch.H[0]);
}

TEST_CASE("covariance structure") {
  ClusterChannelSpec spec;
  spec.bs_antennas = 8;
  spec.paths[0] = {{dft_angle(8, 0), 0.0, 2.0}, {dft_angle(8, 1), 0.0, 2.0}};
  spec.paths[1] = {{dft_angle(8, 2), 0.0, 1.0}};
  const auto c = covariance(spec, 0);
  CHECK(c.rank == 2);
  CHECK(c.lambda(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c.lambda(1) == doctest::Approx(2.0).epsilon(1e-12));
  const CMatrix Vb = c.signal_subspace();
  for (int k : {0, 1}) {
    const CVector s = steering_vector(8, dft_angle(8, k));
    CHECK((Vb * (Vb.adjoint() * s) - s).norm() < 1e-12);
  }

  const auto rnd = default_spec(2);
  for (std::size_t k = 0; k < kTerminals; ++k) {
    const auto ck = covariance(rnd, k);
    CHECK(std::abs(ck.R_tx.trace().real() - rnd.total_power(k)) < 1e-10 * rnd.total_power(k));
    CHECK(std::abs(ck.lambda.sum() - rnd.total_power(k)) < 1e-10 * rnd.total_power(k));
    for (Eigen::Index i = 1; i < ck.lambda.size(); ++i) CHECK(ck.lambda(i) <= ck.lambda(i - 1));
  }
}

TEST_CASE("zero forcing nulls the other terminal") {
  for (std::size_t n : {1u, 4u}) {
    const auto spec = default_spec(n);
    const auto covs = covariances(spec);
    const Beamformer bf(covs, {});
    const ChannelSampler sampler(spec);
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 200; ++t) {
      SeededStream s(1, t);
      const auto ch = sampler.draw(s);
      for (BeamMethod m : kAllMethods) {
        if (!is_zero_forcing(m)) continue;
        for (std::size_t k = 0; k < kTerminals; ++k) {
          const CMatrix f = bf.precoder(m, k, &ch);
          REQUIRE(f.norm() > 0.0);
          worst = std::max(worst, (ch.H[1 - k] * f).norm() / (ch.H[1 - k].norm() * f.norm()));
        }
      }
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("precoder power and csi requirements") {
  const auto spec = default_spec(2);
  const auto covs = covariances(spec);
  SeededStream s(2, 0);
  const auto ch = draw_channel(spec, s);
  for (Multiplexing mux : {Multiplexing::space, Multiplexing::time}) {
    const Beamformer bf(covs, {mux, 3.0, 0.0});
    const double expected = mux == Multiplexing::space ? 1.5 : 3.0;
    CHECK(bf.per_user_power() == expected);
    for (BeamMethod m : kAllMethods) {
      const CMatrix f = bf.precoder(m, 0, &ch);
      CHECK(std::abs(f.squaredNorm() - expected) < 1e-12 * expected);
      if (requires_csi(m)) {
        CHECK_THROWS_AS(bf.precoder(m, 0, nullptr), MissingCsiError);
      } else {
        CHECK_NOTHROW(bf.precoder(m, 0, nullptr));
      }
    }
    if (mux == Multiplexing::time) CHECK(bf.projection(0).isIdentity(1e-15));
  }
  CHECK(parse_method("all_sv_ncoh") == BeamMethod::all_sv_ncoh);
  CHECK_THROWS(parse_method("mrt"));
}

TEST_CASE("coherent combining never beats the unconstrained beam") {
  const auto spec = default_spec(4);
  const auto covs = covariances(spec);
  const Beamformer bf(covs, {});
  const ChannelSampler sampler(spec);
  for (std::uint64_t t = 0; t < 200; ++t) {
    SeededStream s(3, t);
    const auto ch = sampler.draw(s);
    const CMatrix fi = bf.precoder(BeamMethod::interference_free, 0, &ch);
    const CMatrix fc = bf.precoder(BeamMethod::all_sv_coh, 0, &ch);
    const double si = sinr(ch.H[0], fi, CMatrix(), bf.receiver(BeamMethod::interference_free, 0, ch.H[0], fi), 1.0);
    const double sc = sinr(ch.H[0], fc, CMatrix(), bf.receiver(BeamMethod::all_sv_coh, 0, ch.H[0], fc), 1.0);
    CHECK(sc <= si * (1.0 + 1e-12));
    // The unconstrained beam achieves the top singular value.
    Eigen::JacobiSVD<CMatrix> svd(ch.H[0]);
    CHECK(si == doctest::Approx(svd.singularValues()(0) * svd.singularValues()(0) * 0.5).epsilon(1e-9));
  }
}

TEST_CASE("orthogonal terminals make zero forcing free") {
  ClusterChannelSpec spec;
  spec.bs_antennas = 16;
  spec.terminal_antennas = 2;
  spec.paths[0] = {{dft_angle(16, 0), 0.1, 3.0}, {dft_angle(16, 1), -0.5, 1.0}};
  spec.paths[1] = {{dft_angle(16, 3), 0.2, 2.0}, {dft_angle(16, 4), 0.7, 1.0}};
  const auto covs = covariances(spec);
  const Beamformer bf(covs, {});
  CHECK((bf.projection(0) * covs[0].signal_subspace() - covs[0].signal_subspace()).norm() < 1e-12);
  for (std::uint64_t t = 0; t < 20; ++t) {
    SeededStream s(4, t);
    const auto ch = draw_channel(spec, s);
    const CVector fi = bf.precoder(BeamMethod::interference_free, 0, &ch).col(0);
    const CVector fc = bf.precoder(BeamMethod::all_sv_coh, 0, &ch).col(0);
    CHECK(std::abs(fi.dot(fc)) == doctest::Approx(fi.squaredNorm()).epsilon(1e-9));
  }
}

TEST_CASE("sinr and packet error formulas") {
  CMatrix H(2, 3);
  H << std::complex<double>(1, 0), std::complex<double>(0, 1), 2.0, 0.5, std::complex<double>(-1, 1), 0.0;
  CMatrix f = CMatrix::Zero(3, 1), fi = CMatrix::Zero(3, 1), g(2, 1);
  f(0) = 1.0;
  fi(2) = 0.5;
  g << 1.0, std::complex<double>(0, 1);
  const std::complex<double> sig = (g.adjoint() * H * f)(0, 0);
  const std::complex<double> itf = (g.adjoint() * H * fi)(0, 0);
  const double expected = std::norm(sig) / (std::norm(itf) + 0.3 * g.squaredNorm());
  CHECK(sinr(H, f, fi, g, 0.3) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(sinr(H, f, CMatrix(), g, 0.3) == doctest::Approx(std::norm(sig) / (0.3 * g.squaredNorm())).epsilon(1e-14));

  for (double snr : {0.1, 1.0, 5.0}) {
    const double ber = oracle::gaussian_tail(std::sqrt(2.0 * snr));
    CHECK(packet_error(snr, 100) == doctest::Approx(1.0 - std::pow(1.0 - ber, 100)).epsilon(1e-10));
  }
  CHECK(packet_error(0.0, 10) == doctest::Approx(1.0 - std::pow(0.5, 10)));
}

TEST_CASE("evaluation") {
  const auto spec = default_spec(2);
  EvaluationConfig cfg;
  const auto a = evaluate(spec, cfg, {5000, 1, 1});
  const auto b = evaluate(spec, cfg, {5000, 1, 2});
  REQUIRE(a.methods.size() == 5);
  for (std::size_t i = 0; i < a.methods.size(); ++i) {
    CHECK(a.methods[i].sinr.mean == b.methods[i].sinr.mean);
    CHECK(a.methods[i].per_by_slot == b.methods[i].per_by_slot);
    const auto& per = a.methods[i].per_by_slot;
    REQUIRE(per.size() == 10);
    for (std::size_t t = 1; t < per.size(); ++t) CHECK(per[t] <= per[t - 1]);
    const auto& s = a.methods[i].sinr;
    CHECK(s.p05 <= s.p25);
    CHECK(s.p25 <= s.p50);
    CHECK(s.p50 <= s.p75);
    CHECK(s.p75 <= s.p95);
    CHECK(s.ci_lo <= s.mean);
  }
  CHECK(cfg.opportunities(BeamMethod::all_sv_coh, 3) == 3);
  CHECK(cfg.opportunities(BeamMethod::all_sv_ncoh, 3) == 6);
  cfg.multiplexing = Multiplexing::time;
  CHECK(cfg.opportunities(BeamMethod::all_sv_coh, 3) == 2);
  CHECK(cfg.opportunities(BeamMethod::all_sv_coh, 4) == 2);

  EvaluationConfig loud;
  loud.methods = {BeamMethod::interference_free};
  loud.rho_db = 60.0;
  CHECK(evaluate(spec, loud, {2000, 1, 1}).methods[0].mean_packet_error < 1e-12);
  loud.payload_bits = 0;
  CHECK_THROWS(evaluate(spec, loud, {10, 1, 1}));
}
