#include "newsgame/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace newsgame {

namespace {

void check_common(const TransmitterStrategy& r, const ReceiverStrategy& q,
                  const SimConfig& cfg, const char* who) {
  Validity v = validate_strategy(r);
  if (!v.ok) throw std::invalid_argument(std::string(who) + ": " + v.reason);
  v = validate_receiver(q);
  if (!v.ok) throw std::invalid_argument(std::string(who) + ": " + v.reason);
  v = validate_sim(cfg);
  if (!v.ok) throw std::invalid_argument(std::string(who) + ": " + v.reason);
}

void check_optimizer(double sigma, double delta_max, long long burn,
                     long long measure, const char* who) {
  if (!(sigma >= 0))
    throw std::invalid_argument(std::string(who) + ": sigma must be >= 0");
  if (!(delta_max >= 0 && delta_max <= 1))
    throw std::invalid_argument(std::string(who) + ": delta_max outside [0,1]");
  if (burn < 0 || measure < 1)
    throw std::invalid_argument(std::string(who) +
                                ": need burn_in >= 0 and measure >= 1 events");
}

void require_truth(const PayoffConfig& pc, const char* who) {
  if (pc.receiver_prefers != Preference::Truth)
    throw std::invalid_argument(
        std::string(who) + ": only truth-preferring receivers are supported");
}

void add_cells(Stationary& acc, const Stationary& v) {
  acc.v_tc += v.v_tc;
  acc.v_tn += v.v_tn;
  acc.v_fc += v.v_fc;
  acc.v_fn += v.v_fn;
}

void scale_cells(Stationary& acc, double s) {
  acc.v_tc *= s;
  acc.v_tn *= s;
  acc.v_fc *= s;
  acc.v_fn *= s;
}

// relabel story types in the receiver's conditioning table
ReceiverStrategy swap_labels(const ReceiverStrategy& q) {
  ReceiverStrategy s = q;
  std::swap(s.p_ct, s.p_cf);
  std::swap(s.p_nt, s.p_nf);
  return s;
}

}  // namespace

double fermi(double w_current, double w_candidate, double sigma) {
  if (!(sigma >= 0)) throw std::invalid_argument("fermi: sigma must be >= 0");
  return 1.0 / (1.0 + std::exp(sigma * (w_current - w_candidate)));
}

ReceiverStrategy mutate_local(const ReceiverStrategy& q, double delta_max,
                              Rng& rng) {
  Validity v = validate_receiver(q);
  if (!v.ok) throw std::invalid_argument("mutate_local: " + v.reason);
  if (!(delta_max >= 0 && delta_max <= 1))
    throw std::invalid_argument("mutate_local: delta_max outside [0,1]");
  ReceiverStrategy m = q;
  // draw order is part of the reproducibility contract
  for (double* p : {&m.p0, &m.p_ct, &m.p_cf, &m.p_nt, &m.p_nf})
    *p = std::clamp(*p + rng.uniform(-delta_max, delta_max), 0.0, 1.0);
  return m;
}

Story memory_label(const std::vector<Story>& history, int m) {
  if (m < 1) throw std::invalid_argument("memory_label: m must be >= 1");
  size_t window = std::min(history.size(), size_t(m));
  for (size_t i = 0; i < window; ++i)
    if (history[history.size() - 1 - i] == Story::Fake) return Story::Fake;
  return Story::True;
}

TransmitterStrategy sample_viable(Rng& rng) {
  double a = rng.uniform();
  double b = rng.uniform();
  return {a, b, rng.uniform(-a, 1 - a), rng.uniform(-b, 1 - b)};
}

TransmitterStrategy sample_assumption(Assumption as, Rng& rng) {
  if (as == Assumption::None) return sample_viable(rng);
  double a, b;
  do a = rng.uniform(); while (a == 0.0);
  do b = rng.uniform(); while (b == 0.0);
  if (as == Assumption::PrefersFake)
    // both slopes strictly negative: engagement is punished with fake news
    return {a, b, -a * (1 - rng.uniform()), -b * (1 - rng.uniform())};
  return {a, b, (1 - a) * (1 - rng.uniform()), (1 - b) * (1 - rng.uniform())};
}

OptimizeResult optimize_receiver(const TransmitterStrategy& r,
                                 const ReceiverStrategy& q0,
                                 const PayoffConfig& pc,
                                 const OptimizerConfig& oc,
                                 const SimConfig& cfg, uint64_t seed) {
  check_common(r, q0, cfg, "optimize_receiver");
  check_optimizer(oc.sigma, oc.delta_max, oc.burn_in_events, oc.measure_events,
                  "optimize_receiver");

  if (pc.receiver_prefers == Preference::Falsehood) {
    // run the relabelled game (mirror the transmitter, swap the receiver's
    // conditioning table) and map the marginals back afterwards
    PayoffConfig p2 = pc;
    p2.receiver_prefers = Preference::Truth;
    OptimizeResult res =
        optimize_receiver(mirrored(r), swap_labels(q0), p2, oc, cfg, seed);
    std::swap(res.mean.v_tc, res.mean.v_fc);
    std::swap(res.mean.v_tn, res.mean.v_fn);
    std::swap(res.mean.mass_true, res.mean.mass_fake);
    std::swap(res.engagement_true, res.engagement_false);
    res.final_strategy = swap_labels(res.final_strategy);
    return res;
  }

  Rng rng(seed);
  const bool exact = q0.memory_len == 1;
  ReceiverStrategy cur = q0;
  long long sim_counter = 0;
  auto evaluate = [&](const ReceiverStrategy& q) {
    if (exact) return exact_stationary_single(r, q, cfg);
    SimConfig c2 = cfg;
    c2.seed = mix_seed(seed ^ 0x6d6f6e7465ULL, uint64_t(sim_counter++));
    return simulate_group(r, std::vector<ReceiverStrategy>(1, q), c2);
  };

  Stationary vcur = evaluate(cur);
  double wcur = receiver_payoff(vcur, pc);
  const long long total = oc.burn_in_events + oc.measure_events;
  long long accepted = 0;
  OptimizeResult out;
  Stationary acc;
  std::vector<double> acc_mt, acc_mf;
  double wsum = 0;
  for (long long e = 0; e < total; ++e) {
    ReceiverStrategy cand = mutate_local(cur, oc.delta_max, rng);
    Stationary vcand;
    double wcand;
    if (exact) {
      vcand = evaluate(cand);
      wcand = receiver_payoff(vcand, pc);
    } else {
      // fresh noisy estimates for both sides each event
      vcur = evaluate(cur);
      wcur = receiver_payoff(vcur, pc);
      vcand = evaluate(cand);
      wcand = receiver_payoff(vcand, pc);
    }
    if (rng.uniform() < fermi(wcur, wcand, oc.sigma)) {
      cur = cand;
      vcur = vcand;
      wcur = wcand;
      ++accepted;
    }
    if (e >= oc.burn_in_events) {
      add_cells(acc, vcur);
      wsum += wcur;
      if (!vcur.mass_true.empty()) {
        acc_mt.resize(vcur.mass_true.size(), 0.0);
        acc_mf.resize(vcur.mass_fake.size(), 0.0);
        for (size_t k = 0; k < acc_mt.size(); ++k) {
          acc_mt[k] += vcur.mass_true[k];
          acc_mf[k] += vcur.mass_fake[k];
        }
      }
    }
  }
  double inv = 1.0 / double(oc.measure_events);
  scale_cells(acc, inv);
  acc.group_size = vcur.group_size;
  for (double& x : acc_mt) x *= inv;
  for (double& x : acc_mf) x *= inv;
  acc.mass_true = std::move(acc_mt);
  acc.mass_fake = std::move(acc_mf);
  out.mean = std::move(acc);
  out.receiver_payoff_mean = wsum * inv;
  out.engagement_true = engagement_rate(out.mean.v_tc, out.mean.v_t());
  out.engagement_false = engagement_rate(out.mean.v_fc, out.mean.v_f());
  out.acceptance_rate = double(accepted) / double(total);
  out.final_strategy = cur;
  return out;
}

CoOptResult co_optimize(const TransmitterStrategy& r0, const ReceiverStrategy& q0,
                        const PayoffConfig& pc, const CoOptConfig& cc,
                        const SimConfig& cfg, uint64_t seed) {
  check_common(r0, q0, cfg, "co_optimize");
  require_truth(pc, "co_optimize");
  check_optimizer(cc.sigma_receiver, cc.delta_max, 0, 1, "co_optimize");
  if (!(cc.sigma_transmitter >= 0))
    throw std::invalid_argument("co_optimize: sigma_transmitter must be >= 0");
  if (cc.pairs < 1 || cc.record_every < 1)
    throw std::invalid_argument("co_optimize: pairs and record_every must be >= 1");
  if (!(cc.tail_fraction > 0 && cc.tail_fraction <= 1))
    throw std::invalid_argument("co_optimize: tail_fraction outside (0,1]");
  if (q0.memory_len != 1)
    throw std::invalid_argument("co_optimize: memory_len must be 1");

  Rng rng(seed);
  TransmitterStrategy tcur = r0;
  ReceiverStrategy qcur = q0;
  Stationary vcur = exact_stationary_single(tcur, qcur, cfg);

  CoOptResult out;
  for (long long pair = 1; pair <= cc.pairs; ++pair) {
    ReceiverStrategy qcand = mutate_local(qcur, cc.delta_max, rng);
    Stationary vq = exact_stationary_single(tcur, qcand, cfg);
    if (rng.uniform() < fermi(receiver_payoff(vcur, pc), receiver_payoff(vq, pc),
                              cc.sigma_receiver)) {
      qcur = qcand;
      vcur = vq;
    }
    TransmitterStrategy tcand = sample_assumption(cc.assumption, rng);
    Stationary vt = exact_stationary_single(tcand, qcur, cfg);
    if (rng.uniform() < fermi(transmitter_payoff(vcur, pc),
                              transmitter_payoff(vt, pc), cc.sigma_transmitter)) {
      tcur = tcand;
      vcur = vt;
    }
    if (pair % cc.record_every == 0) {
      CoOptPoint p;
      p.pair = pair;
      p.v_tc = vcur.v_tc;
      p.v_tn = vcur.v_tn;
      p.v_fc = vcur.v_fc;
      p.v_fn = vcur.v_fn;
      double et = engagement_rate(vcur.v_tc, vcur.v_t());
      double ef = engagement_rate(vcur.v_fc, vcur.v_f());
      double mean = (et + ef) / 2;
      p.engagement_diff_pct = (std::isnan(et) || std::isnan(ef) || mean <= 0)
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : 100.0 * (et - ef) / mean;
      out.trajectory.push_back(p);
    }
  }
  out.final_transmitter = tcur;
  out.final_receiver = qcur;

  size_t n = out.trajectory.size();
  size_t tail = std::max<size_t>(1, size_t(std::ceil(cc.tail_fraction * double(n))));
  tail = std::min(tail, n);
  double dsum = 0, csum = 0;
  size_t ddef = 0;
  for (size_t i = n - tail; i < n; ++i) {
    const CoOptPoint& p = out.trajectory[i];
    if (!std::isnan(p.engagement_diff_pct)) {
      dsum += p.engagement_diff_pct;
      ++ddef;
    }
    csum += p.v_tc + p.v_fc;
  }
  out.long_run_diff_pct =
      ddef > 0 ? dsum / double(ddef) : std::numeric_limits<double>::quiet_NaN();
  out.long_run_consumption = n > 0 ? csum / double(tail) : 0.0;
  return out;
}

CoOptEnsemble co_optimize_ensemble(const TransmitterStrategy& r0,
                                   const ReceiverStrategy& q0,
                                   const PayoffConfig& pc, const CoOptConfig& cc,
                                   const SimConfig& cfg, uint64_t master_seed,
                                   long long replicates) {
  if (replicates < 1)
    throw std::invalid_argument("co_optimize_ensemble: replicates must be >= 1");

  size_t npts = 0;
  std::vector<double> tc, tn, fc, fn;
  CoOptEnsemble out;
  for (long long i = 0; i < replicates; ++i) {
    CoOptResult rep = co_optimize(r0, q0, pc, cc, cfg, mix_seed(master_seed, uint64_t(i)));
    if (i == 0) {
      npts = rep.trajectory.size();
      tc.assign(npts, 0.0);
      tn.assign(npts, 0.0);
      fc.assign(npts, 0.0);
      fn.assign(npts, 0.0);
      out.pair.resize(npts);
      for (size_t k = 0; k < npts; ++k) out.pair[k] = rep.trajectory[k].pair;
    }
    for (size_t k = 0; k < npts; ++k) {
      tc[k] += rep.trajectory[k].v_tc;
      tn[k] += rep.trajectory[k].v_tn;
      fc[k] += rep.trajectory[k].v_fc;
      fn[k] += rep.trajectory[k].v_fn;
    }
  }
  out.replicates = replicates;
  out.diff_pct.resize(npts);
  out.consumption.resize(npts);
  for (size_t k = 0; k < npts; ++k) {
    double et = engagement_rate(tc[k], tc[k] + tn[k]);
    double ef = engagement_rate(fc[k], fc[k] + fn[k]);
    double mean = (et + ef) / 2;
    out.diff_pct[k] = (std::isnan(et) || std::isnan(ef) || mean <= 0)
                          ? std::numeric_limits<double>::quiet_NaN()
                          : 100.0 * (et - ef) / mean;
    out.consumption[k] = (tc[k] + fc[k]) / double(replicates);
  }

  size_t tail = std::max<size_t>(1, size_t(std::ceil(cc.tail_fraction * double(npts))));
  tail = std::min(tail, npts);
  double dsum = 0, csum = 0;
  size_t ddef = 0;
  for (size_t k = npts - tail; k < npts; ++k) {
    if (!std::isnan(out.diff_pct[k])) {
      dsum += out.diff_pct[k];
      ++ddef;
    }
    csum += out.consumption[k];
  }
  out.long_run_diff_pct =
      ddef > 0 ? dsum / double(ddef) : std::numeric_limits<double>::quiet_NaN();
  out.long_run_consumption = npts > 0 ? csum / double(tail) : 0.0;
  return out;
}

SocialResult social_learning_run(const TransmitterStrategy& r,
                                 const ReceiverStrategy& q0,
                                 const PayoffConfig& pc, const SocialConfig& sc,
                                 const SimConfig& cfg, uint64_t seed) {
  check_common(r, q0, cfg, "social_learning_run");
  require_truth(pc, "social_learning_run");
  if (sc.n_receivers < 2)
    throw std::invalid_argument("social_learning_run: need at least 2 receivers");
  if (sc.burn_in_events < 0 || sc.measure_events < 1)
    throw std::invalid_argument(
        "social_learning_run: need burn_in >= 0 and measure >= 1 events");
  if (!(sc.sigma >= 0))
    throw std::invalid_argument("social_learning_run: sigma must be >= 0");
  const int N = sc.n_receivers;
  double mu = sc.mu < 0 ? 1.0 / N : sc.mu;
  if (!(mu >= 0 && mu <= 1))
    throw std::invalid_argument("social_learning_run: mu outside [0,1]");

  Rng rng(seed);
  std::vector<ReceiverStrategy> pop(size_t(N), q0);
  std::vector<double> w(pop.size(), 0.0);
  const long long total = sc.burn_in_events + sc.measure_events;
  long long adopted = 0;
  std::vector<double> acc_mt(size_t(N) + 1, 0.0), acc_mf(size_t(N) + 1, 0.0);
  for (long long e = 0; e < total; ++e) {
    SimConfig c2 = cfg;
    c2.seed = mix_seed(seed ^ 0x736f6369616cULL, uint64_t(e));
    GroupSim g = simulate_group_detail(r, pop, c2);
    for (int i = 0; i < N; ++i) w[size_t(i)] = pc.B * g.tc[size_t(i)] - pc.C * g.fc[size_t(i)];
    size_t i = size_t(rng.below(uint64_t(N)));
    size_t j = size_t(rng.below(uint64_t(N - 1)));
    if (j >= i) ++j;
    if (rng.uniform() < fermi(w[i], w[j], sc.sigma)) {
      pop[i] = pop[j];
      ++adopted;
    }
    if (rng.uniform() < mu) {
      size_t m = size_t(rng.below(uint64_t(N)));
      for (double* p : {&pop[m].p0, &pop[m].p_ct, &pop[m].p_cf, &pop[m].p_nt,
                        &pop[m].p_nf})
        *p = rng.uniform();
    }
    if (e >= sc.burn_in_events)
      for (int k = 0; k <= N; ++k) {
        acc_mt[size_t(k)] += g.dist.mass_true[size_t(k)];
        acc_mf[size_t(k)] += g.dist.mass_fake[size_t(k)];
      }
  }
  SocialResult out;
  double inv = 1.0 / double(sc.measure_events);
  out.mean.group_size = N;
  out.mean.mass_true.resize(size_t(N) + 1);
  out.mean.mass_fake.resize(size_t(N) + 1);
  for (int k = 0; k <= N; ++k) {
    out.mean.mass_true[size_t(k)] = acc_mt[size_t(k)] * inv;
    out.mean.mass_fake[size_t(k)] = acc_mf[size_t(k)] * inv;
    out.mean.v_tc += out.mean.mass_true[size_t(k)] * double(k) / N;
    out.mean.v_fc += out.mean.mass_fake[size_t(k)] * double(k) / N;
    out.mean.v_tn += out.mean.mass_true[size_t(k)] * double(N - k) / N;
    out.mean.v_fn += out.mean.mass_fake[size_t(k)] * double(N - k) / N;
  }
  out.engagement_true = engagement_rate(out.mean.v_tc, out.mean.v_t());
  out.engagement_false = engagement_rate(out.mean.v_fc, out.mean.v_f());
  out.consumption = out.mean.v_c();
  out.acceptance_rate = double(adopted) / double(total);
  return out;
}

MicroResult microtargeting_run(const TransmitterStrategy& r,
                               const ReceiverStrategy& q0,
                               const PayoffConfig& pc, const MicroConfig& mc,
                               const SimConfig& cfg, uint64_t seed) {
  check_common(r, q0, cfg, "microtargeting_run");
  require_truth(pc, "microtargeting_run");
  if (mc.groups < 1)
    throw std::invalid_argument("microtargeting_run: groups must be >= 1");
  check_optimizer(mc.sigma, mc.delta_max, mc.burn_in_events, mc.measure_events,
                  "microtargeting_run");
  if (mc.groups == 1) {
    OptimizerConfig oc;
    oc.sigma = mc.sigma;
    oc.delta_max = mc.delta_max;
    oc.burn_in_events = mc.burn_in_events;
    oc.measure_events = mc.measure_events;
    OptimizeResult o = optimize_receiver(r, q0, pc, oc, cfg, seed);
    MicroResult out;
    out.mean = o.mean;
    out.engagement_true = o.engagement_true;
    out.engagement_false = o.engagement_false;
    out.consumption = o.mean.v_c();
    return out;
  }

  const int G = mc.groups;
  Rng rng(seed);
  std::vector<ReceiverStrategy> pop(size_t(G), q0);
  const long long total = mc.burn_in_events + mc.measure_events;
  Stationary acc;
  std::vector<double> acc_mt(size_t(G) + 1, 0.0), acc_mf(size_t(G) + 1, 0.0);
  long long sim_counter = 0;
  auto run_sim = [&](const std::vector<ReceiverStrategy>& p) {
    SimConfig c2 = cfg;
    c2.seed = mix_seed(seed ^ 0x6d6963726fULL, uint64_t(sim_counter++));
    return simulate_group_detail(r, p, c2);
  };
  for (long long e = 0; e < total; ++e) {
    size_t g = size_t(rng.below(uint64_t(G)));
    ReceiverStrategy cand = mutate_local(pop[g], mc.delta_max, rng);
    GroupSim cur_sim = run_sim(pop);
    std::vector<ReceiverStrategy> trial = pop;
    trial[g] = cand;
    GroupSim cand_sim = run_sim(trial);
    double wcur = pc.B * cur_sim.tc[g] - pc.C * cur_sim.fc[g];
    double wcand = pc.B * cand_sim.tc[g] - pc.C * cand_sim.fc[g];
    bool adopt = rng.uniform() < fermi(wcur, wcand, mc.sigma);
    const GroupSim& seen = adopt ? cand_sim : cur_sim;
    if (adopt) pop[g] = cand;
    if (e >= mc.burn_in_events)
      for (int k = 0; k <= G; ++k) {
        acc_mt[size_t(k)] += seen.dist.mass_true[size_t(k)];
        acc_mf[size_t(k)] += seen.dist.mass_fake[size_t(k)];
      }
  }
  MicroResult out;
  double inv = 1.0 / double(mc.measure_events);
  out.mean.group_size = G;
  out.mean.mass_true.resize(size_t(G) + 1);
  out.mean.mass_fake.resize(size_t(G) + 1);
  for (int k = 0; k <= G; ++k) {
    out.mean.mass_true[size_t(k)] = acc_mt[size_t(k)] * inv;
    out.mean.mass_fake[size_t(k)] = acc_mf[size_t(k)] * inv;
    out.mean.v_tc += out.mean.mass_true[size_t(k)] * double(k) / G;
    out.mean.v_fc += out.mean.mass_fake[size_t(k)] * double(k) / G;
    out.mean.v_tn += out.mean.mass_true[size_t(k)] * double(G - k) / G;
    out.mean.v_fn += out.mean.mass_fake[size_t(k)] * double(G - k) / G;
  }
  out.engagement_true = engagement_rate(out.mean.v_tc, out.mean.v_t());
  out.engagement_false = engagement_rate(out.mean.v_fc, out.mean.v_f());
  out.consumption = out.mean.v_c();
  return out;
}

CompeteResult competition_run(const TransmitterStrategy& fake,
                              const TransmitterStrategy& mainstream,
                              const ReceiverStrategy& q0, const PayoffConfig& pc,
                              const CompeteConfig& cc, const SimConfig& cfg,
                              uint64_t seed) {
  check_common(fake, q0, cfg, "competition_run");
  Validity vm = validate_strategy(mainstream);
  if (!vm.ok) throw std::invalid_argument("competition_run: " + vm.reason);
  require_truth(pc, "competition_run");
  if (cc.n_transmitters < 1 || cc.n_fake < 0 || cc.n_fake > cc.n_transmitters)
    throw std::invalid_argument("competition_run: need 0 <= n_fake <= n >= 1");
  check_optimizer(cc.sigma, cc.delta_max, cc.burn_in_events, cc.measure_events,
                  "competition_run");
  if (q0.memory_len != 1)
    throw std::invalid_argument("competition_run: memory_len must be 1");

  const int n = cc.n_transmitters;
  std::vector<TransmitterStrategy> sites;
  for (int i = 0; i < n; ++i) sites.push_back(i < cc.n_fake ? fake : mainstream);

  Rng rng(seed);
  ReceiverStrategy cur = q0;
  std::vector<Stationary> vcur(sites.size());
  auto evaluate = [&](const ReceiverStrategy& q, std::vector<Stationary>& vs) {
    double w = 0;
    for (int i = 0; i < n; ++i) {
      vs[size_t(i)] = exact_stationary_single(sites[size_t(i)], q, cfg);
      w += receiver_payoff(vs[size_t(i)], pc);
    }
    return w / n;
  };
  double wcur = evaluate(cur, vcur);
  std::vector<Stationary> vcand(sites.size());
  std::vector<Stationary> acc(sites.size());
  const long long total = cc.burn_in_events + cc.measure_events;
  for (long long e = 0; e < total; ++e) {
    ReceiverStrategy cand = mutate_local(cur, cc.delta_max, rng);
    double wcand = evaluate(cand, vcand);
    if (rng.uniform() < fermi(wcur, wcand, cc.sigma)) {
      cur = cand;
      wcur = wcand;
      vcur.swap(vcand);
    }
    if (e >= cc.burn_in_events)
      for (int i = 0; i < n; ++i) add_cells(acc[size_t(i)], vcur[size_t(i)]);
  }
  double inv = 1.0 / double(cc.measure_events);
  CompeteResult out;
  double fake_c = 0, fake_fc = 0, main_c = 0, all_c = 0;
  for (int i = 0; i < n; ++i) {
    scale_cells(acc[size_t(i)], inv);
    double c = acc[size_t(i)].v_c();
    all_c += c;
    if (i < cc.n_fake) {
      fake_c += c;
      fake_fc += acc[size_t(i)].v_fc;
    } else {
      main_c += c;
    }
  }
  out.fake_source_engagement = cc.n_fake > 0 ? fake_c / cc.n_fake : 0.0;
  out.fake_news_consumption = cc.n_fake > 0 ? fake_fc / cc.n_fake : 0.0;
  out.mainstream_engagement = n > cc.n_fake ? main_c / (n - cc.n_fake) : 0.0;
  out.total_consumption = all_c / n;
  out.final_strategy = cur;
  return out;
}

}  // namespace newsgame
