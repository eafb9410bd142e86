#pragma once
#include <cstdint>
#include <vector>

#include "newsgame/classify.hpp"
#include "newsgame/dynamics.hpp"

namespace newsgame {

struct SweepConfig {
  long long n = 10000;
  uint64_t master_seed = 0;
  int workers = 1;  // records are independent of this
  OptimizerConfig opt;
  SimConfig sim;
  PayoffConfig payoffs;
  ReceiverStrategy q0;  // initial receiver for every sample
  double delta = 0.05;  // classification neighbourhood
};

struct SweepRecord {
  long long index = 0;
  uint64_t sample_seed = 0;
  TransmitterStrategy r;
  double v_t = 0, v_f = 0, v_tc = 0, v_fc = 0;       // measure-phase means
  double engagement_true = 0, engagement_false = 0;  // NaN when undefined
  double receiver_payoff = 0, transmitter_payoff = 0;
  Coercion coercion = Coercion::Neither;
  ExtortionClass extortion = ExtortionClass::None;
  ExtortionClass delta_extortion = ExtortionClass::None;
  double kappa = 0, lambda = 0, chi = 0;  // NaN when degenerate
};

// Draw n transmitter strategies uniformly from the viable polytope, run the
// receiver optimisation against each, classify, and return records ordered by
// index. Sample i depends only on mix_seed(master_seed, i): records are
// identical under any worker count.
std::vector<SweepRecord> run_sweep(const SweepConfig& sc);

// Nearest-rank percentile (1-based ceil(p/100 * n)); optionally linear
// interpolation between closest ranks for sensitivity checks. p in [0,100],
// values must be non-empty; NaNs are not allowed here (filter first).
double percentile(std::vector<double> values, double p, bool interpolate = false);

enum class SiteKind { Misinformation, Mainstream };

// Indices of "successful" records: share rate of the relevant story type
// above share_threshold and engagement with that type at or above the
// engagement_percentile cutoff (computed over all defined values).
std::vector<size_t> successful_filter(const std::vector<SweepRecord>& records,
                                      SiteKind kind,
                                      double engagement_percentile = 90,
                                      double share_threshold = 0.5);

struct ThresholdPoint {
  double threshold = 0;
  double mean_engagement_diff = 0;   // mean(E_t - E_f) over the subset
  double mean_consumption_diff = 0;  // mean(v_tc - v_fc)
  long long n = 0;
};

// successful_filter at several share thresholds, same percentile cutoff.
std::vector<ThresholdPoint> threshold_sensitivity(
    const std::vector<SweepRecord>& records, SiteKind kind,
    const std::vector<double>& thresholds, double engagement_percentile = 90);

struct Enrichment {
  long long successful_n = 0;
  long long successful_extortioners = 0;
  double successful_rate = 0;
  double null_rate = 0;  // delta-extortioner rate in the unfiltered sample
  double p_value = 1;    // one-sided binomial upper tail at the null rate
};

// Over-representation of delta-extortioners among successful strategies of the
// given kind, against the empirical null rate of the full sample.
Enrichment extortion_prevalence(const std::vector<SweepRecord>& records,
                                SiteKind kind,
                                double engagement_percentile = 90,
                                double share_threshold = 0.5);

}  // namespace newsgame
