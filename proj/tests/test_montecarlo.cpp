#include <doctest.h>

#include <cmath>
#include <random>

#include "models.hpp"
#include "rbody/equilibrium.hpp"
#include "rbody/estimators.hpp"
#include "rbody/montecarlo.hpp"

using namespace rbody;

TEST_CASE("quantile initialization") {
  auto q = quantile_init([](double) { return 1.0; }, {{0.0, 1.0}}, 4);
  REQUIRE(q.size() == 4u);
  for (int i = 0; i < 4; ++i) CHECK(q[i] == doctest::Approx((i + 1) / 4.0).epsilon(1e-6));
  auto eq = solve_equilibrium(testmodels::gaussian());
  auto s = quantile_init(eq, 200);
  for (size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
  // semicircle CDF at the quantiles
  auto F = [](double x) {
    x = std::clamp(x / std::sqrt(2.0), -1.0, 1.0);
    return 0.5 + (x * std::sqrt(1 - x * x) + std::asin(x)) / kPi;
  };
  double err = 0.0;
  for (int i = 0; i < 199; ++i) err = std::max(err, std::abs(F(s[i]) - (i + 1) / 200.0));
  CHECK(err < 1e-2);
}

TEST_CASE("incremental ratios match full recomputation") {
  auto cfg = testmodels::two_cut();
  auto eq = solve_equilibrium(cfg);
  auto a = detailed_balance_audit(cfg, eq, 30, 1000, 7);
  CHECK(a.proposals == 1000);
  CHECK(a.max_error < 1e-10);
}

TEST_CASE("sampler is reproducible and respects fixed counts") {
  auto cfg = testmodels::two_cut();
  auto eq = solve_equilibrium(cfg);
  SamplerOptions o;
  o.N = 20;
  o.sweeps = 200;
  o.burnin = 100;
  o.chains = 2;
  o.seed = 11;
  auto obs = std::vector<Observable>{[](double x) { return cplx(x); }};
  auto r1 = sample(cfg, eq, o, obs);
  auto r2 = sample(cfg, eq, o, obs);
  CHECK(r1.chains[1].samples.back()[0] == r2.chains[1].samples.back()[0]);
  CHECK(r1.chains[0].final_state == r2.chains[0].final_state);
  o.fixed_filling = true;
  o.counts = {7, 13};
  auto f = sample(cfg, eq, o, obs);
  for (const auto& ch : f.chains)
    for (const auto& c : ch.counts) CHECK((c[0] == 7 && c[1] == 13));
}

TEST_CASE("Gaussian second moment") {
  auto cfg = testmodels::gaussian();
  auto eq = solve_equilibrium(cfg);
  SamplerOptions o;
  o.N = 40;
  o.sweeps = 4000;
  o.chains = 4;
  o.seed = 3;
  auto r = sample(cfg, eq, o, {[](double x) { return cplx(x * x); }});
  std::vector<std::vector<double>> s;
  for (const auto& ch : r.chains) {
    s.emplace_back();
    for (const auto& row : ch.samples) s.back().push_back(row[0].real() / o.N);
    CHECK(ch.max_audit_drift < 1e-9);
  }
  auto b = batch_means(s);
  CHECK(std::abs(b.mean - 0.5) < 3 * b.se);
  CHECK(b.se < 0.01);
}

TEST_CASE("batch means on an AR(1) series") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> n;
  auto series = [&](long len) {
    std::vector<double> v(len);
    double x = 0.0;
    for (auto& y : v) y = x = 0.5 * x + n(g);
    return v;
  };
  double r = 0.0;
  const int reps = 40;
  for (int k = 0; k < reps; ++k) r += batch_means(series(400000)).se / batch_means(series(200000)).se;
  r /= reps;
  CHECK(r > 0.6);
  CHECK(r < 0.82);
  // integrated autocorrelation time (1 + 0.5) / (1 - 0.5) = 3
  auto b = batch_means(series(400000));
  CHECK(b.ess == doctest::Approx(400000 / 3.0).epsilon(0.25));
}

TEST_CASE("connected correlators of independent particles") {
  SampleResult res;
  res.N = 10;
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<cplx> probes{cplx(2.0), cplx(0.0, 1.5)};
  for (int c = 0; c < 2; ++c) {
    ChainResult ch;
    for (int s = 0; s < 20000; ++s) {
      std::vector<cplx> row(2, 0.0);
      for (int i = 0; i < res.N; ++i) {
        double x = u(g);
        for (int k = 0; k < 2; ++k) row[k] += 1.0 / (probes[k] - x);
      }
      ch.samples.push_back(row);
    }
    res.chains.push_back(ch);
  }
  Domain d = build_domain({{-1, 1}});
  auto e = estimate_correlators(res, 0, probes, d);
  // covariance of sums of independent terms: N Cov(f(x), g(x)) for one uniform particle
  cplx ef = 0.0, eg = 0.0, efg = 0.0;
  const int M = 200000;
  for (int j = 0; j < M; ++j) {
    double x = -1 + 2 * (j + 0.5) / M;
    cplx f = 1.0 / (probes[0] - x), h = 1.0 / (probes[1] - x);
    ef += f / double(M);
    eg += h / double(M);
    efg += f * h / double(M);
  }
  e.connected.compare(double(res.N) * (efg - ef * eg));
  CHECK(e.connected.z < 4.0);
  e.disconnected.compare(double(res.N) * double(res.N) * ef * eg + double(res.N) * (efg - ef * eg));
  CHECK(e.disconnected.z < 4.0);
}

TEST_CASE("set partitions count Bell numbers") {
  const int bell[] = {1, 1, 2, 5, 15, 52, 203};
  for (int n = 1; n <= 6; ++n) CHECK(set_partitions(n).size() == static_cast<size_t>(bell[n]));
}

TEST_CASE("probes too close to the domain are rejected") {
  Domain d = build_domain({{-3, 3}});
  CHECK_THROWS_AS(check_probes(d, {cplx(3.05)}), Error);
  CHECK_THROWS_AS(check_probes(d, {cplx(0.0, 0.05)}), Error);
  CHECK_NOTHROW(check_probes(d, {cplx(3.5), cplx(0.5, 1.0)}));
}

TEST_CASE("expensive many-body runs are refused") {
  ModelConfig cfg = testmodels::gaussian();
  Poly x = Poly::monomial(1);
  cfg.potential.add(separable_component(4, {{0.01, {x, x, x, x}}}));
  auto eq = solve_equilibrium(testmodels::gaussian());
  SamplerOptions o;
  o.N = 300;
  o.sweeps = 10;
  CHECK_THROWS_AS(sample(cfg, eq, o, {}), Error);
}

TEST_CASE("concentration report on synthetic deviations") {
  std::vector<int> Ns{32, 64, 128, 256};
  std::vector<std::vector<double>> dev, esc;
  std::mt19937_64 g(2);
  std::normal_distribution<double> n;
  for (int N : Ns) {
    dev.emplace_back();
    esc.emplace_back();
    for (int s = 0; s < 4000; ++s) {
      dev.back().push_back(std::sqrt(N) * n(g));
      esc.back().push_back(0.0);
    }
  }
  auto r = check_concentration(Ns, dev, esc);
  CHECK(r.slope_median == doctest::Approx(0.5).epsilon(0.1));
  CHECK(r.pass());
  // fixed counts: every deviation is zero and the check is trivially satisfied
  for (auto& d : dev) std::fill(d.begin(), d.end(), 0.0);
  CHECK(check_concentration(Ns, dev, esc, true).pass());
}
