#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "newsgame/rng.hpp"
#include "newsgame/stationary.hpp"
#include "newsgame/strategy.hpp"

using namespace newsgame;

namespace {

// --- independent oracle for the single-receiver chain ---------------------
// States 0=(c,t) 1=(c,f) 2=(n,t) 3=(n,f). Built straight from the round
// definition (story drawn from the transmitter response, then one engagement
// draw), with the error flip applied to both realised actions. Long-run
// distribution from (n,t) via Cesaro-averaged power iteration, which also
// handles reducible and periodic cases.
using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 oracle_matrix(const TransmitterStrategy& r, const ReceiverStrategy& q,
                   double eps) {
  auto flip = [eps](double p) { return eps + (1 - 2 * eps) * p; };
  Mat4 P{};
  const bool cons[4] = {true, true, false, false};
  const Story type[4] = {Story::True, Story::Fake, Story::True, Story::Fake};
  for (int s = 0; s < 4; ++s) {
    int k = cons[s] ? 1 : 0;
    Story j = type[s];
    double base = (j == Story::True) ? r.alpha + r.gamma * k : r.beta + r.theta * k;
    double pt = flip(base);
    for (int l = 0; l < 2; ++l) {
      Story story = (l == 0) ? Story::True : Story::Fake;
      double ps = (l == 0) ? pt : 1 - pt;
      double att = (story == Story::True) ? 1.0 : 0.0;
      double pq = q.p0;  // a1 mixes habit p0 with the table entry
      double table = cons[s] ? (j == Story::True ? q.p_ct : q.p_cf)
                             : (j == Story::True ? q.p_nt : q.p_nf);
      double engage = q.a0 * att + (1 - q.a0) * ((1 - q.a1) * pq + q.a1 * table);
      engage = flip(engage);
      P[s][l == 0 ? 0 : 1] += ps * engage;
      P[s][l == 0 ? 2 : 3] += ps * (1 - engage);
    }
  }
  return P;
}

std::array<double, 4> oracle_longrun(const TransmitterStrategy& r,
                                     const ReceiverStrategy& q, double eps,
                                     int iters = 200000) {
  Mat4 P = oracle_matrix(r, q, eps);
  std::array<double, 4> v{0, 0, 1, 0}, acc{0, 0, 0, 0};
  for (int t = 0; t < iters; ++t) {
    std::array<double, 4> nv{0, 0, 0, 0};
    for (int s = 0; s < 4; ++s)
      for (int d = 0; d < 4; ++d) nv[d] += v[s] * P[s][d];
    v = nv;
    if (t >= iters / 2)
      for (int d = 0; d < 4; ++d) acc[d] += v[d];
  }
  double tot = acc[0] + acc[1] + acc[2] + acc[3];
  for (auto& x : acc) x /= tot;
  return acc;  // (tc, fc, tn, fn)
}

double tv_against_oracle(const Stationary& got, const std::array<double, 4>& want) {
  double tv = 0;
  tv += std::abs(got.v_tc - want[0]);
  tv += std::abs(got.v_fc - want[1]);
  tv += std::abs(got.v_tn - want[2]);
  tv += std::abs(got.v_fn - want[3]);
  return tv / 2;
}

ReceiverStrategy flat_receiver(double p0) {
  ReceiverStrategy q;
  q.p0 = p0;
  return q;  // a0 = a1 = 0: engage with probability p0 always
}

}  // namespace

TEST_CASE("poisson binomial pmf") {
  auto pmf = poisson_binomial({0.1, 0.2, 0.3});
  REQUIRE(pmf.size() == 4);
  CHECK(pmf[0] == doctest::Approx(0.504).epsilon(1e-12));
  CHECK(pmf[3] == doctest::Approx(0.006).epsilon(1e-12));

  // degenerate: no receivers
  auto none = poisson_binomial({});
  REQUIRE(none.size() == 1);
  CHECK(none[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(poisson_binomial({0.5, 1.2}), std::invalid_argument);
  CHECK_THROWS_AS(poisson_binomial({-0.1}), std::invalid_argument);

  // oracle: enumerate all subsets
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + int(rng.below(9));
    std::vector<double> p(n);
    for (auto& x : p) x = rng.uniform();
    std::vector<double> want(n + 1, 0.0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      double prob = 1;
      int k = 0;
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          prob *= p[i];
          ++k;
        } else {
          prob *= 1 - p[i];
        }
      }
      want[k] += prob;
    }
    auto got = poisson_binomial(p);
    REQUIRE(got.size() == want.size());
    double sum = 0;
    for (size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-11));
      sum += got[k];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("effective strategy under execution errors") {
  TransmitterStrategy r{1.0, 0.1, -0.9, -0.1};
  TransmitterStrategy e = effective_strategy(r, 1e-3);
  CHECK(e.alpha == doctest::Approx(0.999).epsilon(1e-12));
  CHECK(e.beta == doctest::Approx(0.1008).epsilon(1e-12));
  CHECK(e.gamma == doctest::Approx(-0.8982).epsilon(1e-12));
  CHECK(e.theta == doctest::Approx(-0.0998).epsilon(1e-12));

  TransmitterStrategy id = effective_strategy(r, 0.0);
  CHECK(id.alpha == r.alpha);
  CHECK(id.theta == r.theta);

  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    double a = rng.uniform(), b = rng.uniform();
    TransmitterStrategy v{a, b, rng.uniform(-a, 1 - a), rng.uniform(-b, 1 - b)};
    CHECK(validate_strategy(effective_strategy(v, rng.uniform(0, 0.49))).ok);
  }
}

TEST_CASE("exact stationary: absorbing corner cases") {
  SimConfig cfg;
  cfg.epsilon = 0;

  TransmitterStrategy always_true{1, 1, 0, 0};
  Stationary a = exact_stationary_single(always_true, flat_receiver(1.0), cfg);
  CHECK(a.v_tc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.v_fc + a.v_tn + a.v_fn == doctest::Approx(0.0).epsilon(1e-12));

  Stationary b = exact_stationary_single(always_true, flat_receiver(0.0), cfg);
  CHECK(b.v_tn == doctest::Approx(1.0).epsilon(1e-12));

  // coercive fake strategy vs an always-engaging receiver: engagement keeps
  // the strategy in the fake state, which absorbs
  TransmitterStrategy coercive{1.0, 0.1, -0.9, -0.1};
  Stationary c = exact_stationary_single(coercive, flat_receiver(1.0), cfg);
  auto want = oracle_longrun(coercive, flat_receiver(1.0), 0.0);
  CHECK(tv_against_oracle(c, want) <= 1e-9);
  CHECK(c.v_fc == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("exact stationary agrees with power iteration") {
  SimConfig cfg;
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    double a = rng.uniform(), b = rng.uniform();
    TransmitterStrategy r{a, b, rng.uniform(-a, 1 - a), rng.uniform(-b, 1 - b)};
    ReceiverStrategy q;
    q.a0 = rng.uniform();
    q.a1 = rng.uniform();
    q.p0 = rng.uniform();
    q.p_ct = rng.uniform();
    q.p_cf = rng.uniform();
    q.p_nt = rng.uniform();
    q.p_nf = rng.uniform();
    cfg.epsilon = (trial % 2) ? 1e-3 : 0.0;
    Stationary v = exact_stationary_single(r, q, cfg);
    auto want = oracle_longrun(r, q, cfg.epsilon, 40000);
    CHECK(tv_against_oracle(v, want) <= 1e-8);
    CHECK(validate_stationary(v).ok);
  }
}

TEST_CASE("exact stationary: flat receivers") {
  // a0 = a1 = 0 receivers engage at a state-independent rate, which the solver
  // treats via a closed form; must agree with the general oracle
  SimConfig cfg;
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    double a = rng.uniform(), b = rng.uniform();
    TransmitterStrategy r{a, b, rng.uniform(-a, 1 - a), rng.uniform(-b, 1 - b)};
    ReceiverStrategy q = flat_receiver(rng.uniform());
    cfg.epsilon = (trial % 2) ? 1e-3 : 0.0;
    Stationary v = exact_stationary_single(r, q, cfg);
    auto want = oracle_longrun(r, q, cfg.epsilon, 40000);
    CHECK(tv_against_oracle(v, want) <= 1e-8);
  }
}

TEST_CASE("every stationary point satisfies the enforced-rate constraint") {
  SimConfig cfg;
  Rng rng(31337);
  for (int trial = 0; trial < 400; ++trial) {
    double a = rng.uniform(0, 0.999), b = rng.uniform();
    TransmitterStrategy r{a, b, rng.uniform(-a, 1 - a), rng.uniform(-b, 1 - b)};
    ReceiverStrategy q;
    q.a0 = rng.uniform();
    q.a1 = rng.uniform();
    q.p0 = rng.uniform();
    q.p_ct = rng.uniform();
    q.p_cf = rng.uniform();
    q.p_nt = rng.uniform();
    q.p_nf = rng.uniform();

    cfg.epsilon = 0;
    Stationary v = exact_stationary_single(r, q, cfg);
    CHECK(v.v_f() ==
          doctest::Approx(enforced_fake_rate(r, v.v_tc, v.v_fc)).epsilon(1e-9));

    // with execution errors the same identity holds for the error-adjusted
    // coefficients
    cfg.epsilon = 1e-3;
    Stationary ve = exact_stationary_single(r, q, cfg);
    TransmitterStrategy eff = effective_strategy(r, cfg.epsilon);
    CHECK(ve.v_f() ==
          doctest::Approx(enforced_fake_rate(eff, ve.v_tc, ve.v_fc)).epsilon(1e-9));
  }
}

TEST_CASE("group simulation: determinism and sanity") {
  TransmitterStrategy r{0.7, 0.4, -0.2, 0.1};
  std::vector<ReceiverStrategy> qs(3);
  qs[0] = flat_receiver(0.2);
  qs[1] = flat_receiver(0.5);
  qs[2].a0 = 0.3;
  qs[2].a1 = 0.5;
  qs[2].p0 = 0.6;
  qs[2].p_cf = 0.9;

  SimConfig cfg;
  cfg.rounds = 20000;
  cfg.seed = 42;
  Stationary v1 = simulate_group(r, qs, cfg);
  Stationary v2 = simulate_group(r, qs, cfg);
  CHECK(v1.v_tc == v2.v_tc);  // bit-identical
  CHECK(v1.mass_true == v2.mass_true);
  CHECK(validate_stationary(v1).ok);
  CHECK(v1.group_size == 3);
  REQUIRE(v1.mass_true.size() == 4);

  cfg.seed = 43;
  Stationary v3 = simulate_group(r, qs, cfg);
  CHECK(v1.v_tc != v3.v_tc);  // a different world realises
}

TEST_CASE("group simulation matches the exact chain at N=1") {
  TransmitterStrategy r{0.7, 0.4, -0.2, 0.1};
  ReceiverStrategy q;
  q.a0 = 0.2;
  q.a1 = 0.6;
  q.p0 = 0.4;
  q.p_ct = 0.5;
  q.p_cf = 0.1;
  q.p_nt = 0.8;
  q.p_nf = 0.3;

  SimConfig cfg;
  cfg.epsilon = 1e-3;
  Stationary exact = exact_stationary_single(r, q, cfg);

  // replicate batches give both the estimate and its standard error
  const int reps = 10;
  double sum[4] = {0, 0, 0, 0}, sumsq[4] = {0, 0, 0, 0};
  for (int i = 0; i < reps; ++i) {
    cfg.rounds = 100000;
    cfg.seed = 1000 + i;
    Stationary s = simulate_group(r, {q}, cfg);
    double cells[4] = {s.v_tc, s.v_tn, s.v_fc, s.v_fn};
    for (int c = 0; c < 4; ++c) {
      sum[c] += cells[c];
      sumsq[c] += cells[c] * cells[c];
    }
  }
  double want[4] = {exact.v_tc, exact.v_tn, exact.v_fc, exact.v_fn};
  for (int c = 0; c < 4; ++c) {
    double mean = sum[c] / reps;
    double var = (sumsq[c] - reps * mean * mean) / (reps - 1);
    double se = std::sqrt(std::max(var, 0.0) / reps);
    CHECK(std::abs(mean - want[c]) <= 4 * se + 5e-4);
  }

  // a single long run stays within a loose total-variation band
  cfg.rounds = 100000;
  cfg.seed = 7;
  Stationary one = simulate_group(r, {q}, cfg);
  double tv = (std::abs(one.v_tc - want[0]) + std::abs(one.v_tn - want[1]) +
               std::abs(one.v_fc - want[2]) + std::abs(one.v_fn - want[3])) / 2;
  CHECK(tv <= 0.01);
}

TEST_CASE("group engagement counts follow the poisson binomial") {
  // flat receivers engage independently of history, so the stationary k-pmf
  // must match the closed-form pmf of their error-adjusted rates
  TransmitterStrategy r{0.6, 0.3, 0.2, 0.4};
  std::vector<double> p0s = {0.15, 0.5, 0.85, 0.3};
  std::vector<ReceiverStrategy> qs;
  for (double p : p0s) qs.push_back(flat_receiver(p));

  SimConfig cfg;
  cfg.epsilon = 1e-3;
  cfg.rounds = 400000;
  cfg.seed = 99;
  Stationary v = simulate_group(r, qs, cfg);

  std::vector<double> adj;
  for (double p : p0s) adj.push_back(with_error(p, cfg.epsilon));
  auto want = poisson_binomial(adj);
  for (size_t k = 0; k < want.size(); ++k) {
    double got = v.mass_true[k] + v.mass_fake[k];
    CHECK(got == doctest::Approx(want[k]).epsilon(0.05));
  }
}

TEST_CASE("receiver memory labels the transmitter by its recent record") {
  SimConfig cfg;
  cfg.epsilon = 0;
  cfg.rounds = 5000;

  // trusts only a clean 3-round record; transmitter always shares fake
  ReceiverStrategy q;
  q.a1 = 1;
  q.p_ct = 1;
  q.p_nt = 1;
  q.p_cf = 0;
  q.p_nf = 0;
  q.memory_len = 3;
  Stationary v = simulate_group({0, 0, 0, 0}, {q}, cfg);
  CHECK(v.v_fn == doctest::Approx(1.0));

  // ... and an always-true transmitter keeps the label clean forever
  Stationary w = simulate_group({1, 1, 0, 0}, {q}, cfg);
  CHECK(w.v_tc == doctest::Approx(1.0));
}

TEST_CASE("sim config validation") {
  SimConfig bad;
  bad.epsilon = 0.5;
  CHECK_FALSE(validate_sim(bad).ok);
  bad.epsilon = -0.1;
  CHECK_FALSE(validate_sim(bad).ok);
  bad.epsilon = 0.1;
  bad.rounds = 0;
  CHECK_FALSE(validate_sim(bad).ok);
  SimConfig ok;
  CHECK(validate_sim(ok).ok);
  CHECK_THROWS_AS(exact_stationary_single({0, 0, 0, 0}, ReceiverStrategy{}, bad),
                  std::invalid_argument);
}
