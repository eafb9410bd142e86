#pragma once
#include <cstdint>
#include <vector>

#include "newsgame/strategy.hpp"

namespace newsgame {

struct SimConfig {
  double epsilon = 1e-3;  // execution-error rate, in [0, 0.5)
  long long rounds = 10000;
  uint64_t seed = 0;
  long long burn_in = -1;  // rounds discarded before measuring; -1 => rounds/10
};

Validity validate_sim(const SimConfig& cfg);

// Each realised binary action is inverted independently with probability eps,
// so an intended probability p is played as eps + (1-2*eps)*p.
inline double with_error(double p, double eps) { return eps + (1 - 2 * eps) * p; }

// The strategy whose error-free play equals r's play under error rate eps.
// Always viable when r is.
TransmitterStrategy effective_strategy(const TransmitterStrategy& r, double eps);

// Stationary occupation measure of the repeated game. The four cell values are
// per-receiver rates: v_tc = sum_k (k/N) * mass_true[k] is the rate of
// consuming true stories, v_tn its complement within true stories, etc.
// For N == 1 these are just the probabilities of the four (consumed?, type)
// states. Group form (group_size == N) carries the per-k masses as well.
struct Stationary {
  double v_tc = 0, v_tn = 0, v_fc = 0, v_fn = 0;
  int group_size = 1;
  std::vector<double> mass_true, mass_fake;  // size N+1 each when present

  double v_t() const { return v_tc + v_tn; }
  double v_f() const { return v_fc + v_fn; }
  double v_c() const { return v_tc + v_fc; }
};

// Checks: cells nonnegative, v_t + v_f == 1 within tol, and (group form)
// masses summing to 1 with marginals consistent with the cells.
Validity validate_stationary(const Stationary& v, double tol = 1e-9);

// pmf of the number of successes among independent Bernoulli(probs[i]) draws;
// O(n^2) convolution, returns a vector of size probs.size()+1.
std::vector<double> poisson_binomial(const std::vector<double>& probs);

// Exact stationary distribution of the single-receiver chain (four states
// (consumed?, type)). With eps > 0 the chain is strictly positive and the
// stationary point unique; with eps == 0 the chain may be reducible, and the
// solver returns the long-run distribution started from (not consumed,
// previous story true), i.e. the absorption-weighted mixture of the stationary
// distributions of the closed classes reachable from that state.
// Requires q.memory_len == 1.
Stationary exact_stationary_single(const TransmitterStrategy& r,
                                   const ReceiverStrategy& q,
                                   const SimConfig& cfg);

// Monte Carlo occupation measure for N = qs.size() receivers sharing one
// transmitter. Initial state: previous story true, nobody engaged. Bit-exact
// reproducible for identical (qs, cfg).
Stationary simulate_group(const TransmitterStrategy& r,
                          const std::vector<ReceiverStrategy>& qs,
                          const SimConfig& cfg);

// simulate_group plus per-receiver consumption tallies (imitation dynamics pay
// each receiver from its own consumption).
struct GroupSim {
  Stationary dist;
  std::vector<double> tc, fc;  // per-receiver consumed-true / consumed-fake rates
};
GroupSim simulate_group_detail(const TransmitterStrategy& r,
                               const std::vector<ReceiverStrategy>& qs,
                               const SimConfig& cfg);

}  // namespace newsgame
