#pragma once
#include <cstdint>
#include <limits>
#include <vector>

#include "newsgame/rng.hpp"
#include "newsgame/stationary.hpp"
#include "newsgame/strategy.hpp"

namespace newsgame {

// Adoption probability of the candidate under noisy best response:
//   1 / (1 + exp(sigma * (w_current - w_candidate)))
// sigma >= 0; sigma == 0 is random drift (1/2).
double fermi(double w_current, double w_candidate, double sigma);

// p0 and the four p_ij shifted by independent U[-delta_max, +delta_max] draws
// and clamped to [0,1]. a0, a1 and memory_len are part of the receiver's type,
// not of its evolving behaviour, and are never mutated.
ReceiverStrategy mutate_local(const ReceiverStrategy& q, double delta_max, Rng& rng);

// Label the transmitter "fake" iff any of the last m realised stories were.
// history is ordered oldest..newest; m >= 1.
Story memory_label(const std::vector<Story>& history, int m);

// Engagement rate helper: consumed/total, NaN when total < 1e-6 (an
// engagement rate against stories that effectively never occur is undefined).
inline double engagement_rate(double consumed, double total) {
  return total >= 1e-6 ? consumed / total
                       : std::numeric_limits<double>::quiet_NaN();
}

// Uniform draw from the viable strategy polytope (alpha, beta uniform in
// [0,1), then gamma | alpha and theta | beta uniform on their slabs).
TransmitterStrategy sample_viable(Rng& rng);

// Restriction of the global transmitter draw used by co-optimisation.
enum class Assumption { PrefersFake, PrefersTrue, None };
TransmitterStrategy sample_assumption(Assumption a, Rng& rng);

struct OptimizerConfig {
  double sigma = 1.0;
  double delta_max = 0.05;
  long long burn_in_events = 10000;
  long long measure_events = 10000;
};

struct OptimizeResult {
  Stationary mean;  // stationary cells averaged over the measure phase
  double receiver_payoff_mean = 0;
  double engagement_true = 0, engagement_false = 0;  // rates of mean, guarded
  double acceptance_rate = 0;
  ReceiverStrategy final_strategy;
};

// Local hill climbing of a single receiver against a fixed transmitter: per
// event propose mutate_local, evaluate both payoffs at the exact stationary
// distribution (memory_len == 1) or by Monte Carlo (memory_len > 1, cfg.rounds
// per evaluation), adopt with Fermi probability. For falsehood-preferring
// receivers the game is mirrored internally (see strategy.hpp) and the
// reported marginals are mapped back to the original story labels.
OptimizeResult optimize_receiver(const TransmitterStrategy& r,
                                 const ReceiverStrategy& q0,
                                 const PayoffConfig& pc,
                                 const OptimizerConfig& oc,
                                 const SimConfig& cfg, uint64_t seed);

struct CoOptConfig {
  Assumption assumption = Assumption::PrefersFake;
  double sigma_receiver = 1.0;
  double sigma_transmitter = 100.0;
  double delta_max = 0.05;
  long long pairs = 10000;     // receiver update + transmitter update
  long long record_every = 10; // trajectory thinning
  double tail_fraction = 0.25; // window for the long-run summary
};

struct CoOptPoint {
  long long pair = 0;
  double v_tc = 0, v_tn = 0, v_fc = 0, v_fn = 0;
  double engagement_diff_pct = 0;  // 100*(E_t-E_f)/((E_t+E_f)/2); NaN if undefined
};

struct CoOptResult {
  std::vector<CoOptPoint> trajectory;
  TransmitterStrategy final_transmitter;
  ReceiverStrategy final_receiver;
  double long_run_diff_pct = 0;     // mean over the defined tail points
  double long_run_consumption = 0;  // mean v_c over the tail
};

// Strictly alternating receiver/transmitter co-optimisation. The receiver
// mutates locally (sigma_receiver); the transmitter proposes fresh global
// draws from the assumption region (sigma_transmitter). Transmitter payoff is
// b_t*v_tc + b_f*v_fc. One replicate; callers average across seeds.
CoOptResult co_optimize(const TransmitterStrategy& r0, const ReceiverStrategy& q0,
                        const PayoffConfig& pc, const CoOptConfig& cc,
                        const SimConfig& cfg, uint64_t seed);

struct CoOptEnsemble {
  std::vector<long long> pair;      // recorded pair index per point
  std::vector<double> diff_pct;     // pooled engagement difference per point
  std::vector<double> consumption;  // replicate-mean v_tc + v_fc per point
  double long_run_diff_pct = 0;     // tail mean of diff_pct
  double long_run_consumption = 0;  // tail mean of consumption
  long long replicates = 0;
};

// Replicate ensemble of co_optimize runs seeded from mix_seed(master_seed, i).
// Engagement rates are pooled: at each recorded point the stationary cells are
// summed across replicates before the conditional rates are formed, so the
// statistic captures the covariance between how much a receiver engages and
// what mix of stories its transmitter is feeding it. (Per-replicate rates
// cancel that covariance and understate the effect for weakly conditioned
// receivers.) The long-run summary averages the final tail_fraction of points.
CoOptEnsemble co_optimize_ensemble(const TransmitterStrategy& r0,
                                   const ReceiverStrategy& q0,
                                   const PayoffConfig& pc, const CoOptConfig& cc,
                                   const SimConfig& cfg, uint64_t master_seed,
                                   long long replicates);

struct SocialConfig {
  int n_receivers = 10;
  double sigma = 1.0;
  double mu = -1;  // per-event mutation probability; -1 => 1/N
  long long burn_in_events = 1000;
  long long measure_events = 1000;
};

struct SocialResult {
  Stationary mean;  // group occupation, per-receiver rates, measure average
  double engagement_true = 0, engagement_false = 0;
  double consumption = 0;
  double acceptance_rate = 0;  // fraction of imitation events adopted
};

// Imitation dynamics in a group of n receivers facing one transmitter: each
// event re-simulates the group (cfg.rounds), pays every receiver from its own
// consumption, lets a random pair imitate by Fermi comparison, and then with
// probability mu resamples one receiver's behaviour uniformly.
SocialResult social_learning_run(const TransmitterStrategy& r,
                                 const ReceiverStrategy& q0,
                                 const PayoffConfig& pc, const SocialConfig& sc,
                                 const SimConfig& cfg, uint64_t seed);

struct MicroConfig {
  int groups = 1;  // G independently optimising single-receiver groups
  double sigma = 1.0;
  double delta_max = 0.05;
  long long burn_in_events = 10000;
  long long measure_events = 10000;
};

struct MicroResult {
  Stationary mean;
  double engagement_true = 0, engagement_false = 0;
  double consumption = 0;
};

// One transmitter state shared across G groups: the story is offered to all
// groups and the transmitter reacts to the aggregate engagement count k of G.
// Each event one uniformly chosen group proposes a local mutation, judged on
// its own consumption payoff (exact solver when G == 1 — identical to
// optimize_receiver under the same seed — Monte Carlo otherwise).
MicroResult microtargeting_run(const TransmitterStrategy& r,
                               const ReceiverStrategy& q0,
                               const PayoffConfig& pc, const MicroConfig& mc,
                               const SimConfig& cfg, uint64_t seed);

struct CompeteConfig {
  int n_transmitters = 2;
  int n_fake = 1;  // remaining sites use the mainstream strategy
  double sigma = 1.0;
  double delta_max = 0.05;
  long long burn_in_events = 10000;
  long long measure_events = 10000;
};

struct CompeteResult {
  double fake_source_engagement = 0;   // v_c of the fake-source game
  double fake_news_consumption = 0;    // v_fc of the fake-source game
  double mainstream_engagement = 0;    // mean v_c across mainstream games
  double total_consumption = 0;        // mean v_c across all games
  ReceiverStrategy final_strategy;
};

// One receiver following all n sites with a single behavioural strategy; each
// site runs its own independent game against the receiver. Per event the
// receiver mutates the shared strategy and compares mean payoffs across sites
// (exact per-site stationary distributions). Fake-source figures are 0 when
// n_fake == 0; with a single fake site and no mainstream ones the run reduces
// to optimize_receiver under the same seed.
CompeteResult competition_run(const TransmitterStrategy& fake,
                              const TransmitterStrategy& mainstream,
                              const ReceiverStrategy& q0, const PayoffConfig& pc,
                              const CompeteConfig& cc, const SimConfig& cfg,
                              uint64_t seed);

}  // namespace newsgame
