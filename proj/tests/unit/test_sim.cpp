#include <doctest.h>

#include <cmath>
#include <sstream>

#include "flowgrowth/ensemble_io.hpp"
#include "flowgrowth/ibf.hpp"
#include "flowgrowth/sim.hpp"

using namespace flowgrowth;
using namespace flowgrowth::sim;

namespace {

ibf::IbfModel unit_model(int d = 2) { return ibf::build_model("potential-gaussian", {{{"ell", 1.0}}, {}}, d); }

SimConfig config(double horizon, double dt, std::size_t n, std::uint64_t seed) {
  SimConfig c;
  c.horizon = horizon;
  c.dt = dt;
  c.n_paths = n;
  c.seed = seed;
  return c;
}

PathEnsemble constant_ensemble(double v, std::size_t n, bool log_domain) {
  PathEnsemble e;
  e.times = {0.0, 1.0};
  e.log_domain = log_domain;
  e.config = config(1.0, 1.0, n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    e.stream_ids.push_back(i);
    e.values.push_back(v);
    e.values.push_back(v);
  }
  return e;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(config(1.0, 0.25, 10, 1).validate());
  CHECK_THROWS_AS(config(1.0, 0.3, 10, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(config(0.0, 0.1, 10, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(config(1.0, 2.0, 10, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(config(1.0, 0.1, 0, 1).validate(), std::invalid_argument);
  auto c = config(1.0, 1e-3, 1000, 1);
  c.budget_cap = 1e5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.budget_cap = 1e6;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("recording grid keeps both ends") {
  auto c = config(1.0, 0.1, 1, 1);
  c.record_stride = 3;
  CHECK(c.steps() == 10);
  CHECK(c.recorded_steps() == std::vector<std::size_t>{0, 3, 6, 9, 10});
}

TEST_CASE("initial values") {
  auto c = config(0.1, 0.01, 50, 3);
  c.r0 = 0.25;
  const auto rho = simulate_rho(unit_model(3), c);
  const auto der = simulate_derivative_norm(unit_model(3), c);
  REQUIRE(rho.n_paths() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(rho.at(i, 0) == 0.25);
    CHECK(der.at(i, 0) == doctest::Approx(std::log(3.0) / 4).epsilon(1e-15));
  }
  CHECK(der.log_domain);
  CHECK_FALSE(rho.log_domain);
}

TEST_CASE("rho paths are nonnegative") {
  auto c = config(2.0, 1e-2, 500, 11);
  c.r0 = 0.05;
  const auto rho = simulate_rho(unit_model(), c);
  for (double v : rho.values) CHECK(v >= 0.0);
}

TEST_CASE("results do not depend on the worker count") {
  auto c = config(0.5, 1e-2, 37, 99);
  const auto m = unit_model();
  const auto one = simulate_rho(m, c, 1);
  for (unsigned w : {2u, 3u, 8u, 64u}) {
    const auto many = simulate_rho(m, c, w);
    CHECK(many.values == one.values);
    CHECK(many.stream_ids == one.stream_ids);
  }
  const auto d1 = simulate_derivative_norm(m, c, 1);
  CHECK(simulate_derivative_norm(m, c, 5).values == d1.values);
}

TEST_CASE("different seeds give different paths") {
  const auto m = unit_model();
  CHECK(simulate_rho(m, config(0.1, 0.01, 4, 1)).values != simulate_rho(m, config(0.1, 0.01, 4, 2)).values);
}

TEST_CASE("coarse steps are refused") {
  const auto sharp = ibf::build_model("potential-gaussian", {{{"ell", 0.01}}, {}}, 2);
  CHECK_THROWS_AS(simulate_rho(sharp, config(1.0, 1e-3, 10, 1)), std::invalid_argument);
}

TEST_CASE("small separations grow at the top exponent") {
  auto c = config(5.0, 1e-3, 4000, 2024);
  c.r0 = 1e-4;
  c.record_stride = 5000;
  const auto m = unit_model();
  const auto rho = simulate_rho(m, c, 4);
  const auto rate = growth_rate(rho, 5.0);
  CHECK(rate.excluded == 0);
  CHECK(std::abs(rate.mean - m.lambda1()) < 3 * rate.std_error);
}

TEST_CASE("derivative norm moments follow the exact law") {
  const auto m = unit_model();
  const auto ens = simulate_derivative_norm(m, config(1.0, 0.5, 200000, 5), 4);
  for (double p : {1.0, 2.0}) {
    for (double t : {0.5, 1.0}) {
      const double log_law = ibf::derivative_norm_law(m, p, t);
      const auto ln = estimate_lognormal_moment(ens, p, t);
      CHECK(std::abs(ln.log_estimate - log_law) < 3 * ln.log_std_error);
      if (p * p * m.beta_l() * t <= 6.0) {
        const auto est = estimate_moments(ens, {p}, {t}).front();
        CHECK(std::abs(est.estimate - std::exp(log_law)) < 3 * est.std_error);
      }
    }
  }
  const auto rate = growth_rate(ens, 1.0);
  CHECK(std::abs(rate.mean - m.lambda1()) < 3 * rate.std_error);
}

TEST_CASE("moment estimates of a constant ensemble") {
  const auto e = constant_ensemble(2.0, 10, false);
  const auto est = estimate_moments(e, {0.0, 1.0, 3.0}, {1.0});
  REQUIRE(est.size() == 3);
  CHECK(est[0].estimate == 1.0);
  CHECK(est[1].estimate == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(est[2].estimate == doctest::Approx(8.0).epsilon(1e-15));
  for (const auto& m : est) CHECK(m.std_error == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("overflowing moments switch to log domain") {
  const auto e = constant_ensemble(800.0, 4, true);
  const auto est = estimate_moments(e, {1.0}, {1.0}).front();
  CHECK(est.log_domain);
  CHECK(est.log_estimate == doctest::Approx(800.0).epsilon(1e-12));
}

TEST_CASE("off-grid times are rejected") {
  const auto e = constant_ensemble(1.0, 2, false);
  CHECK_THROWS_AS(e.time_index(0.5), std::invalid_argument);
  CHECK(e.time_index(1.0) == 1);
}

TEST_CASE("binary ensemble round trip") {
  auto c = config(0.2, 0.05, 6, 17);
  c.r0 = 0.3;
  c.record_stride = 2;
  for (bool log_domain : {false, true}) {
    const auto ens = log_domain ? simulate_derivative_norm(unit_model(), c) : simulate_rho(unit_model(), c);
    std::stringstream buf;
    write_ensemble_binary(buf, ens);
    const auto back = read_ensemble_binary(buf);
    CHECK(back.values == ens.values);
    CHECK(back.times == ens.times);
    CHECK(back.stream_ids == ens.stream_ids);
    CHECK(back.model_ref == ens.model_ref);
    CHECK(back.log_domain == ens.log_domain);
    CHECK(back.config.seed == 17);
    CHECK(back.config.record_stride == 2);
    CHECK(back.config.r0 == 0.3);
  }
  std::stringstream junk("FGEN2xxxxxxxx");
  CHECK_THROWS(read_ensemble_binary(junk));
  std::stringstream truncated;
  write_ensemble_binary(truncated, simulate_rho(unit_model(), c));
  std::string s = truncated.str();
  std::stringstream cut(s.substr(0, s.size() - 3));
  CHECK_THROWS(read_ensemble_binary(cut));
}

TEST_CASE("CSV ensemble layout") {
  const auto ens = simulate_rho(unit_model(), config(0.1, 0.05, 2, 1));
  std::ostringstream os;
  write_ensemble_csv(os, ens);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,path_id,value");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 6);
}
