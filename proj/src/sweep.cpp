#include "newsgame/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "newsgame/stats.hpp"

namespace newsgame {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SweepRecord run_one(const SweepConfig& sc, long long index) {
  SweepRecord rec;
  rec.index = index;
  rec.sample_seed = mix_seed(sc.master_seed, uint64_t(index));

  // the strategy draw and the optimizer stream both derive from sample_seed,
  // so a record depends only on (master_seed, index)
  Rng rng(rec.sample_seed);
  rec.r = sample_viable(rng);
  OptimizeResult res = optimize_receiver(rec.r, sc.q0, sc.payoffs, sc.opt,
                                         sc.sim, mix_seed(rec.sample_seed, 1));

  rec.v_t = res.mean.v_t();
  rec.v_f = res.mean.v_f();
  rec.v_tc = res.mean.v_tc;
  rec.v_fc = res.mean.v_fc;
  rec.engagement_true = res.engagement_true;
  rec.engagement_false = res.engagement_false;
  rec.receiver_payoff = res.receiver_payoff_mean;
  rec.transmitter_payoff = transmitter_payoff(res.mean, sc.payoffs);

  StrategyClass cls = classify(rec.r, sc.delta);
  rec.coercion = cls.coercion;
  rec.extortion = cls.extortion;
  rec.delta_extortion = cls.delta_extortion;
  if (cls.params) {
    rec.kappa = cls.params->kappa;
    rec.lambda = cls.params->lambda;
    rec.chi = cls.params->chi;
  } else {
    rec.kappa = rec.lambda = rec.chi = kNaN;
  }
  return rec;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepConfig& sc) {
  if (sc.n < 1) throw std::invalid_argument("run_sweep: n must be >= 1");
  if (sc.workers < 1)
    throw std::invalid_argument("run_sweep: workers must be >= 1");
  if (!(sc.delta >= 0))
    throw std::invalid_argument("run_sweep: delta must be >= 0");
  // validate up front so a bad config throws here, not inside a worker thread
  Validity v = validate_receiver(sc.q0);
  if (!v.ok) throw std::invalid_argument("run_sweep: " + v.reason);
  v = validate_sim(sc.sim);
  if (!v.ok) throw std::invalid_argument("run_sweep: " + v.reason);

  std::vector<SweepRecord> records(size_t(sc.n));
  int workers = int(std::min<long long>(sc.workers, sc.n));
  if (workers == 1) {
    for (long long i = 0; i < sc.n; ++i) records[size_t(i)] = run_one(sc, i);
    return records;
  }

  // samples are written by index, so scheduling order cannot leak into output
  std::atomic<long long> next(0);
  std::vector<std::thread> pool;
  pool.reserve(size_t(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (long long i = next.fetch_add(1); i < sc.n; i = next.fetch_add(1))
        records[size_t(i)] = run_one(sc, i);
    });
  }
  for (std::thread& t : pool) t.join();
  return records;
}

double percentile(std::vector<double> values, double p, bool interpolate) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  if (!(p >= 0 && p <= 100))
    throw std::invalid_argument("percentile: p outside [0,100]");
  for (double v : values)
    if (std::isnan(v))
      throw std::invalid_argument("percentile: NaN in input (filter first)");
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  if (!interpolate) {
    size_t rank = size_t(std::ceil(p / 100.0 * double(n)));  // 1-based
    if (rank < 1) rank = 1;
    return values[rank - 1];
  }
  double h = p / 100.0 * double(n - 1);
  size_t lo = size_t(std::floor(h));
  if (lo + 1 >= n) return values[n - 1];
  double frac = h - double(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

// rate/share accessors for the story type the site kind cares about
double kind_rate(const SweepRecord& r, SiteKind k) {
  return k == SiteKind::Misinformation ? r.engagement_false : r.engagement_true;
}
double kind_share(const SweepRecord& r, SiteKind k) {
  return k == SiteKind::Misinformation ? r.v_f : r.v_t;
}

}  // namespace

std::vector<size_t> successful_filter(const std::vector<SweepRecord>& records,
                                      SiteKind kind, double engagement_percentile,
                                      double share_threshold) {
  if (records.empty())
    throw std::invalid_argument("successful_filter: no records");
  std::vector<double> defined;
  defined.reserve(records.size());
  for (const SweepRecord& r : records) {
    double e = kind_rate(r, kind);
    if (!std::isnan(e)) defined.push_back(e);
  }
  std::vector<size_t> out;
  if (defined.empty()) return out;
  double cutoff = percentile(defined, engagement_percentile);
  for (size_t i = 0; i < records.size(); ++i) {
    double e = kind_rate(records[i], kind);
    if (std::isnan(e)) continue;
    if (e >= cutoff && kind_share(records[i], kind) > share_threshold)
      out.push_back(i);
  }
  return out;
}

std::vector<ThresholdPoint> threshold_sensitivity(
    const std::vector<SweepRecord>& records, SiteKind kind,
    const std::vector<double>& thresholds, double engagement_percentile) {
  std::vector<ThresholdPoint> out;
  out.reserve(thresholds.size());
  for (double th : thresholds) {
    ThresholdPoint pt;
    pt.threshold = th;
    std::vector<size_t> sel =
        successful_filter(records, kind, engagement_percentile, th);
    double esum = 0, csum = 0;
    long long edef = 0;
    for (size_t i : sel) {
      const SweepRecord& r = records[i];
      if (!std::isnan(r.engagement_true) && !std::isnan(r.engagement_false)) {
        esum += r.engagement_true - r.engagement_false;
        ++edef;
      }
      csum += r.v_tc - r.v_fc;
    }
    pt.n = (long long)sel.size();
    pt.mean_engagement_diff = edef > 0 ? esum / double(edef) : kNaN;
    pt.mean_consumption_diff = pt.n > 0 ? csum / double(pt.n) : kNaN;
    out.push_back(pt);
  }
  return out;
}

Enrichment extortion_prevalence(const std::vector<SweepRecord>& records,
                                SiteKind kind, double engagement_percentile,
                                double share_threshold) {
  if (records.empty())
    throw std::invalid_argument("extortion_prevalence: no records");
  ExtortionClass family = kind == SiteKind::Misinformation
                              ? ExtortionClass::FakeExtortioner
                              : ExtortionClass::MainstreamExtortioner;
  Enrichment out;
  long long null_count = 0;
  for (const SweepRecord& r : records)
    if (r.delta_extortion == family) ++null_count;
  out.null_rate = double(null_count) / double(records.size());

  std::vector<size_t> sel =
      successful_filter(records, kind, engagement_percentile, share_threshold);
  out.successful_n = (long long)sel.size();
  for (size_t i : sel)
    if (records[i].delta_extortion == family) ++out.successful_extortioners;
  out.successful_rate = out.successful_n > 0
                            ? double(out.successful_extortioners) /
                                  double(out.successful_n)
                            : 0.0;
  out.p_value = out.successful_n > 0
                    ? binom_sf(out.successful_extortioners, out.successful_n,
                               out.null_rate)
                    : 1.0;
  return out;
}

}  // namespace newsgame
