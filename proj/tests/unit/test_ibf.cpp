#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "flowgrowth/ibf.hpp"
#include "flowgrowth/philox.hpp"
#include "flowgrowth/schatten.hpp"
#include "oracles.hpp"

using namespace flowgrowth;
using namespace flowgrowth::ibf;

namespace {

IbfModel gaussian(double ell, int d) { return build_model("potential-gaussian", {{{"ell", ell}}, {}}, d); }

CorrelationTable gaussian_table(double ell, double r_max, double step) {
  std::ostringstream os;
  os.precision(17);
  os << "r,B_L,B_N\n";
  for (int i = 0; i * step <= r_max + 1e-12; ++i) {
    const double r = i * step;
    const double x = r * r / (ell * ell);
    os << r << "," << (1 - x) * std::exp(-x / 2) << "," << std::exp(-x / 2) << "\n";
  }
  std::istringstream is(os.str());
  return read_correlation_table(is);
}

}  // namespace

TEST_CASE("potential gaussian curvatures and exponent") {
  const auto m = gaussian(1.0, 2);
  CHECK(m.beta_l() == 3.0);
  CHECK(m.beta_n() == 1.0);
  CHECK(m.lambda1() == -1.0);
  CHECK(m.k1() == 3.0);
  CHECK(gaussian(1.0, 4).lambda1() == 0.0);
  CHECK(gaussian(2.0, 3).beta_l() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m.describe() == "potential-gaussian(ell=1)");
}

TEST_CASE("correlations equal one at the origin") {
  for (double ell : {0.3, 1.0, 4.0}) {
    const auto m = gaussian(ell, 3);
    CHECK(m.b_l(0.0) == 1.0);
    CHECK(m.b_n(0.0) == 1.0);
  }
}

TEST_CASE("closed-form correlations match direct evaluation") {
  const auto m = gaussian(1.5, 2);
  for (double r : {0.01, 0.5, 1.0, 2.0, 5.0}) {
    const double x = r * r / 2.25;
    CHECK(m.b_l(r) == doctest::Approx((1 - x) * std::exp(-x / 2)).epsilon(1e-13));
    CHECK(m.b_n(r) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-13));
  }
}

TEST_CASE("curvature agrees with a finite-difference second derivative") {
  const double h = 1e-4;
  for (double ell : {0.5, 1.0, 2.0}) {
    const auto m = gaussian(ell, 2);
    // B even in r: B''(0) ~ 2 (B(h) - 1) / h^2
    CHECK(std::abs(2 * m.one_minus_b_l(h) / (h * h) - m.beta_l()) < 1e-6 * std::max(1.0, m.beta_l()));
    CHECK(std::abs(2 * m.one_minus_b_n(h) / (h * h) - m.beta_n()) < 1e-6 * std::max(1.0, m.beta_n()));
  }
}

TEST_CASE("Taylor domination holds on a grid") {
  for (double ell : {0.5, 1.0, 2.0}) {
    for (int d : {2, 3, 5}) {
      const auto m = gaussian(ell, d);
      for (int j = 0; j <= 2000; ++j) {
        const double r = 0.005 * j;
        CHECK(m.one_minus_b_l(r) <= 0.5 * m.beta_l() * r * r * (1 + 1e-12) + 1e-15);
        CHECK(m.one_minus_b_n(r) <= 0.5 * m.beta_n() * r * r * (1 + 1e-12) + 1e-15);
      }
    }
  }
}

TEST_CASE("growth constants of the unit gaussian model") {
  const auto rc = ibf_growth_constants(gaussian(1.0, 2));
  CHECK(rc.c == 246.0);
  CHECK(rc.c_hat == -2.0);
  CHECK(rc.k == 1.5);
  CHECK(rc.k_hat == 0.0);
  const auto rc4 = ibf_growth_constants(gaussian(1.0, 4));
  CHECK(rc4.c_hat == 0.0);
  CHECK(rc4.k_hat == 0.0);
}

TEST_CASE("xi at zero dimension is the positive part of lambda_1") {
  for (double ell : {0.5, 1.0, 3.0}) {
    for (int d : {2, 3, 4, 6}) {
      const auto m = gaussian(ell, d);
      CHECK(ibf_xi(m, 0.0).xi == std::max(m.lambda1(), 0.0));
    }
  }
}

TEST_CASE("xi regression for the unit gaussian model") {
  const auto m = gaussian(1.0, 2);
  const double xi = ibf_xi(m, 1.0).xi;
  CHECK(xi == doctest::Approx(70.9155380921176).epsilon(1e-12));
  CHECK(std::abs(xi - oracle::xi_by_crossing({246, -2, 1.5, 0, 2, 1})) < 1e-9 * xi);
}

TEST_CASE("xi is nondecreasing in the dimension") {
  const auto m = gaussian(1.0, 2);
  double prev = -HUGE_VAL;
  for (double delta : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const double xi = ibf_xi(m, delta).xi;
    CHECK(xi >= prev);
    prev = xi;
  }
}

TEST_CASE("two-point moment bound") {
  const auto m = gaussian(1.0, 2);
  CHECK(rho_moment_bound(m, 2.0, 0.1, 1.0) == doctest::Approx(std::log(0.01) + 4.0).epsilon(1e-14));
  CHECK(std::exp(rho_moment_bound(m, 3.0, 0.5, 0.0)) == doctest::Approx(0.125).epsilon(1e-14));
  // q = 1: rate lambda_1 + beta_L / 2 = 0.5
  CHECK(rho_moment_bound(m, 1.0, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(rho_moment_bound(m, 0.5, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rho_moment_bound(m, 1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("derivative norm law") {
  const auto m = gaussian(1.0, 2);
  CHECK(std::exp(derivative_norm_law(m, 2.0, 1.0)) ==
        doctest::Approx(std::sqrt(2.0) * std::exp(4.0)).epsilon(1e-13));
  CHECK(derivative_norm_law(m, 0.0, 5.0) == 0.0);
  CHECK(std::exp(derivative_norm_law(m, 1.0, 0.0)) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-15));
  CHECK_THROWS_AS(derivative_norm_law(m, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("model construction rejects bad input") {
  CHECK_THROWS_AS(gaussian(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(gaussian(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_model("potential-gaussian", {}, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_model("no-such-model", {{{"ell", 1.0}}, {}}, 2), std::invalid_argument);
}

TEST_CASE("user table parsing") {
  std::istringstream ok("r,B_L,B_N\n0,1,1\n0.5,0.7,0.9\n1,0.2,0.6\n");
  const auto t = read_correlation_table(ok);
  REQUIRE(t.r.size() == 3);
  CHECK(t.b_l[1] == 0.7);
  CHECK(t.b_n[2] == 0.6);

  std::istringstream no_header("0,1,1\n0.5,0.7,0.9\n");
  CHECK_THROWS_AS(read_correlation_table(no_header), std::invalid_argument);
  std::istringstream bad_start("r,B_L,B_N\n0.1,1,1\n0.5,0.7,0.9\n");
  CHECK_THROWS_AS(read_correlation_table(bad_start), std::invalid_argument);
  std::istringstream not_increasing("r,B_L,B_N\n0,1,1\n0.5,0.7,0.9\n0.5,0.6,0.8\n");
  CHECK_THROWS_AS(read_correlation_table(not_increasing), std::invalid_argument);
  std::istringstream junk("r,B_L,B_N\n0,1,1\n0.5,x,0.9\n");
  CHECK_THROWS_AS(read_correlation_table(junk), std::invalid_argument);
}

TEST_CASE("user table model with generous curvatures") {
  ModelParams p;
  p.table = gaussian_table(1.0, 4.0, 0.05);
  p.values = {{"beta_L", 3.6}, {"beta_N", 1.2}};
  const auto m = build_model("user-table", p, 3);
  CHECK(m.lambda1() == doctest::Approx((2 * 1.2 - 3.6) / 2).epsilon(1e-15));
  CHECK(m.b_l(0.0) == 1.0);
  CHECK(m.b_n(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(m.one_minus_b_n(10.0) == doctest::Approx(1 - std::exp(-8.0)).epsilon(1e-12));
}

TEST_CASE("user table violating Taylor domination reports r") {
  ModelParams p;
  p.table = gaussian_table(1.0, 4.0, 0.05);
  p.values = {{"beta_L", 3.6}, {"beta_N", 0.5}};
  try {
    build_model("user-table", p, 2);
    FAIL("expected rejection");
  } catch (const ModelRejected& e) {
    CHECK(e.violating_r() > 0.0);
    CHECK(e.violating_r() <= 0.05);
  }
  ModelParams q = p;
  q.values["beta_N"] = 1.2;
  q.table->b_l[0] = 0.99;
  CHECK_THROWS_AS(build_model("user-table", q, 2), ModelRejected);
}

TEST_CASE("Schatten norm special cases") {
  for (int d : {1, 2, 3, 7}) {
    CHECK(schatten_norm(Eigen::MatrixXd::Identity(d, d)).value ==
          doctest::Approx(std::pow(double(d), 0.25)).epsilon(1e-14));
  }
  Eigen::MatrixXd a(2, 2);
  a << 3, 0, 0, 4;
  CHECK(schatten_norm(a).value == doctest::Approx(std::pow(337.0, 0.25)).epsilon(1e-14));
  CHECK(schatten_norm(Eigen::MatrixXd::Zero(3, 3)).value == 0.0);
  CHECK_THROWS_AS(schatten_norm(Eigen::MatrixXd::Ones(2, 3)), std::invalid_argument);
}

TEST_CASE("Schatten norm is orthogonally invariant and both routes agree") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> z;
  auto random_matrix = [&](int d) {
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = z(gen);
    return m;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 5;
    const Eigen::MatrixXd a = random_matrix(d);
    const Eigen::MatrixXd q1 = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(d)).householderQ();
    const Eigen::MatrixXd q2 = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(d)).householderQ();
    const double n = schatten_norm(a).value;
    CHECK(std::abs(schatten_norm(q1 * a * q2).value - n) < 1e-10 * n);
    CHECK(std::abs(schatten_norm_entrywise(a) - n) < 1e-12 * n);
  }
}

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using P = sim::Philox4x32;
  CHECK(P::apply({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(P::apply({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        P::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(P::apply({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        P::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("substreams are independent of draw order") {
  sim::Substream a(42, sim::StreamDomain::Rho, 5);
  std::vector<double> first;
  for (int i = 0; i < 10; ++i) first.push_back(a.uniform());
  sim::Substream b(42, sim::StreamDomain::Rho, 5);
  for (int i = 0; i < 10; ++i) CHECK(b.uniform() == first[i]);
  sim::Substream other(42, sim::StreamDomain::DerivativeNorm, 5);
  CHECK(other.uniform() != first[0]);
  for (double u : first) CHECK((u > 0.0 && u < 1.0));
}

TEST_CASE("inverse-CDF normals have unit moments") {
  sim::Substream s(1, sim::StreamDomain::Rho, 0);
  const int n = 200000;
  double m1 = 0, m2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    m1 += z;
    m2 += z * z;
  }
  m1 /= n;
  m2 /= n;
  CHECK(std::abs(m1) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
}
