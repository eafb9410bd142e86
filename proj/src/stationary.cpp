#include "newsgame/stationary.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>

#include "newsgame/rng.hpp"

namespace newsgame {

Validity validate_sim(const SimConfig& cfg) {
  if (!(cfg.epsilon >= 0.0) || cfg.epsilon >= 0.5)
    return {false, "epsilon outside [0, 0.5)"};
  if (cfg.rounds < 1) return {false, "rounds < 1"};
  if (cfg.burn_in >= cfg.rounds) return {false, "burn_in >= rounds"};
  return {true, ""};
}

TransmitterStrategy effective_strategy(const TransmitterStrategy& r, double eps) {
  Validity v = validate_strategy(r);
  if (!v.ok) throw std::invalid_argument("effective_strategy: " + v.reason);
  if (!(eps >= 0.0) || eps >= 0.5)
    throw std::invalid_argument("effective_strategy: epsilon outside [0, 0.5)");
  double s = 1 - 2 * eps;
  return {eps + s * r.alpha, eps + s * r.beta, s * r.gamma, s * r.theta};
}

std::vector<double> poisson_binomial(const std::vector<double>& probs) {
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("poisson_binomial: probability outside [0,1]");
  std::vector<double> pmf(probs.size() + 1, 0.0);
  pmf[0] = 1.0;
  size_t n = 0;
  for (double p : probs) {
    ++n;
    // convolve in place, highest count first
    pmf[n] = pmf[n - 1] * p;
    for (size_t k = n - 1; k > 0; --k) pmf[k] = pmf[k] * (1 - p) + pmf[k - 1] * p;
    pmf[0] *= 1 - p;
  }
  return pmf;
}

namespace {

// state order: 0=(c,t) 1=(c,f) 2=(n,t) 3=(n,f); start state is (n,t)
constexpr int kStart = 2;

struct Chain4 {
  double P[4][4];
};

// engage probabilities for (current l, consumed i, label j), error-adjusted
struct Engage8 {
  double e[2][2][2];  // [l: 0=t 1=f][i: 0=c 1=n][j: 0=t 1=f]
  bool flat;
};

Engage8 engage_table(const ReceiverStrategy& q, double eps) {
  Engage8 t{};
  const double tab[2][2] = {{q.p_ct, q.p_cf}, {q.p_nt, q.p_nf}};
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double base = q.a0 * (l == 0 ? 1.0 : 0.0) +
                      (1 - q.a0) * ((1 - q.a1) * q.p0 + q.a1 * tab[i][j]);
        t.e[l][i][j] = with_error(base, eps);
      }
  double lo = t.e[0][0][0], hi = lo;
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        lo = std::min(lo, t.e[l][i][j]);
        hi = std::max(hi, t.e[l][i][j]);
      }
  t.flat = (lo == hi);
  return t;
}

Chain4 build_chain(const TransmitterStrategy& r, const Engage8& e, double eps) {
  Chain4 c{};
  for (int s = 0; s < 4; ++s) {
    int i = s < 2 ? 0 : 1;  // consumed?
    int j = s % 2;          // previous story type
    double base = j == 0 ? r.alpha + r.gamma * (i == 0 ? 1 : 0)
                         : r.beta + r.theta * (i == 0 ? 1 : 0);
    double pt = with_error(std::clamp(base, 0.0, 1.0), eps);
    for (int l = 0; l < 2; ++l) {
      double ps = l == 0 ? pt : 1 - pt;
      double qe = e.e[l][i][j];
      c.P[s][l] += ps * qe;          // -> (c, l)
      c.P[s][l + 2] += ps * (1 - qe);  // -> (n, l)
    }
  }
  return c;
}

Stationary from_vec(const double v[4]) {
  Stationary s;
  s.v_tc = v[0];
  s.v_fc = v[1];
  s.v_tn = v[2];
  s.v_fn = v[3];
  s.group_size = 1;
  return s;
}

double residual(const Chain4& c, const double v[4]) {
  double worst = 0;
  for (int d = 0; d < 4; ++d) {
    double x = -v[d];
    for (int s = 0; s < 4; ++s) x += v[s] * c.P[s][d];
    worst = std::max(worst, std::abs(x));
  }
  return worst;
}

// Flat receivers (identical engagement probability x in every state): the
// engagement draw decouples from everything else, so the story type follows a
// two-state chain with transition rates averaged over the engagement count,
// and the cells factorise as v_{l,c} = x * v_l.
Stationary flat_stationary(const TransmitterStrategy& r, double x, double eps) {
  auto pt = [&](double base0, double slope) {
    return (1 - x) * with_error(std::clamp(base0, 0.0, 1.0), eps) +
           x * with_error(std::clamp(base0 + slope, 0.0, 1.0), eps);
  };
  double a_t = pt(r.alpha, r.gamma);  // P(true | prev true)
  double a_f = pt(r.beta, r.theta);   // P(true | prev fake)
  double p_tf = 1 - a_t, p_ft = a_f;
  double v_t;
  if (p_tf == 0.0)
    v_t = 1.0;  // truth absorbs (and we start there)
  else if (p_ft == 0.0)
    v_t = 0.0;
  else
    v_t = p_ft / (p_tf + p_ft);
  double v[4] = {x * v_t, x * (1 - v_t), (1 - x) * v_t, (1 - x) * (1 - v_t)};
  return from_vec(v);
}

Stationary positive_chain_stationary(const Chain4& c) {
  // unique fixed point: solve (P^T - I) v = 0 with sum v = 1
  Eigen::Matrix4d M;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) M(a, b) = c.P[b][a] - (a == b ? 1.0 : 0.0);
  Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
  M.row(3).setOnes();
  rhs(3) = 1.0;
  Eigen::PartialPivLU<Eigen::Matrix4d> lu(M);
  Eigen::Vector4d v = lu.solve(rhs);
  // one refinement pass keeps the residual at rounding level even for stiff
  // chains (tiny epsilon)
  Eigen::Vector4d corr = lu.solve(rhs - M * v);
  v += corr;
  double vv[4] = {v(0), v(1), v(2), v(3)};
  if (residual(c, vv) > 1e-12)
    throw std::runtime_error("exact_stationary_single: solver residual too large");
  return from_vec(vv);
}

// eps == 0: the chain may be reducible. Report the long-run distribution from
// the start state: absorption-probability-weighted mixture of the stationary
// distributions of the closed communicating classes.
Stationary longrun_from_start(const Chain4& c) {
  bool reach[4][4] = {};
  for (int s = 0; s < 4; ++s) {
    reach[s][s] = true;
    for (int d = 0; d < 4; ++d)
      if (c.P[s][d] > 0.0) reach[s][d] = true;
  }
  for (int m = 0; m < 4; ++m)
    for (int s = 0; s < 4; ++s)
      if (reach[s][m])
        for (int d = 0; d < 4; ++d)
          if (reach[m][d]) reach[s][d] = true;

  int cls[4];  // communicating class id per state
  std::fill(cls, cls + 4, -1);
  int n_cls = 0;
  for (int s = 0; s < 4; ++s) {
    if (cls[s] >= 0) continue;
    cls[s] = n_cls;
    for (int d = s + 1; d < 4; ++d)
      if (reach[s][d] && reach[d][s]) cls[d] = n_cls;
    ++n_cls;
  }
  std::vector<bool> closed(n_cls, true);
  for (int s = 0; s < 4; ++s)
    for (int d = 0; d < 4; ++d)
      if (c.P[s][d] > 0.0 && cls[d] != cls[s]) closed[cls[s]] = false;

  // stationary distribution within one closed class
  auto class_pi = [&](int id, double out[4]) {
    std::vector<int> members;
    for (int s = 0; s < 4; ++s)
      if (cls[s] == id) members.push_back(s);
    int m = int(members.size());
    Eigen::MatrixXd M(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        M(a, b) = c.P[members[b]][members[a]] - (a == b ? 1.0 : 0.0);
    M.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    Eigen::VectorXd pi = M.partialPivLu().solve(rhs);
    std::fill(out, out + 4, 0.0);
    for (int a = 0; a < m; ++a) out[members[a]] = pi(a);
  };

  double v[4] = {0, 0, 0, 0};
  if (closed[cls[kStart]]) {
    class_pi(cls[kStart], v);
  } else {
    // transient start: solve absorption probabilities into each reachable
    // closed class, then mix their stationary distributions
    std::vector<int> trans;
    int pos[4] = {-1, -1, -1, -1};
    for (int s = 0; s < 4; ++s)
      if (!closed[cls[s]]) {
        pos[s] = int(trans.size());
        trans.push_back(s);
      }
    int nt = int(trans.size());
    Eigen::MatrixXd IQ(nt, nt);
    for (int a = 0; a < nt; ++a)
      for (int b = 0; b < nt; ++b)
        IQ(a, b) = (a == b ? 1.0 : 0.0) - c.P[trans[a]][trans[b]];
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(IQ);
    double total = 0;
    for (int id = 0; id < n_cls; ++id) {
      if (!closed[id]) continue;
      bool reachable = false;
      for (int s = 0; s < 4; ++s)
        if (cls[s] == id && reach[kStart][s]) reachable = true;
      if (!reachable) continue;
      Eigen::VectorXd b(nt);
      for (int a = 0; a < nt; ++a) {
        double x = 0;
        for (int d = 0; d < 4; ++d)
          if (cls[d] == id) x += c.P[trans[a]][d];
        b(a) = x;
      }
      double w = lu.solve(b)(pos[kStart]);
      if (w <= 0) continue;
      double pi[4];
      class_pi(id, pi);
      for (int s = 0; s < 4; ++s) v[s] += w * pi[s];
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::runtime_error(
          "exact_stationary_single: absorption probabilities do not sum to 1");
    for (auto& x : v) x /= total;
  }
  if (residual(c, v) > 1e-12)
    throw std::runtime_error("exact_stationary_single: solver residual too large");
  return from_vec(v);
}

}  // namespace

Stationary exact_stationary_single(const TransmitterStrategy& r,
                                   const ReceiverStrategy& q,
                                   const SimConfig& cfg) {
  Validity vr = validate_strategy(r);
  if (!vr.ok) throw std::invalid_argument("exact_stationary_single: " + vr.reason);
  Validity vq = validate_receiver(q);
  if (!vq.ok) throw std::invalid_argument("exact_stationary_single: " + vq.reason);
  if (q.memory_len != 1)
    throw std::invalid_argument(
        "exact_stationary_single: memory_len must be 1 (use simulate_group)");
  Validity vc = validate_sim(cfg);
  if (!vc.ok) throw std::invalid_argument("exact_stationary_single: " + vc.reason);

  Engage8 e = engage_table(q, cfg.epsilon);
  if (e.flat) return flat_stationary(r, e.e[0][0][0], cfg.epsilon);
  Chain4 c = build_chain(r, e, cfg.epsilon);
  if (cfg.epsilon > 0.0) return positive_chain_stationary(c);
  return longrun_from_start(c);
}

Validity validate_stationary(const Stationary& v, double tol) {
  const double cells[4] = {v.v_tc, v.v_tn, v.v_fc, v.v_fn};
  for (double c : cells)
    if (!(c >= -tol) || std::isnan(c)) return {false, "negative cell"};
  if (std::abs(v.v_t() + v.v_f() - 1.0) > tol)
    return {false, "cells do not sum to 1"};
  if (!v.mass_true.empty() || !v.mass_fake.empty()) {
    size_t n = size_t(v.group_size) + 1;
    if (v.mass_true.size() != n || v.mass_fake.size() != n)
      return {false, "mass vectors sized differently from group_size+1"};
    double sum = 0, tc = 0, fc = 0, vt = 0;
    for (size_t k = 0; k < n; ++k) {
      if (!(v.mass_true[k] >= -tol) || !(v.mass_fake[k] >= -tol))
        return {false, "negative mass"};
      sum += v.mass_true[k] + v.mass_fake[k];
      vt += v.mass_true[k];
      tc += v.mass_true[k] * double(k) / v.group_size;
      fc += v.mass_fake[k] * double(k) / v.group_size;
    }
    if (std::abs(sum - 1.0) > tol) return {false, "masses do not sum to 1"};
    if (std::abs(tc - v.v_tc) > tol || std::abs(fc - v.v_fc) > tol ||
        std::abs(vt - v.v_t()) > tol)
      return {false, "marginals inconsistent with masses"};
  }
  return {true, ""};
}

GroupSim simulate_group_detail(const TransmitterStrategy& r,
                               const std::vector<ReceiverStrategy>& qs,
                               const SimConfig& cfg) {
  Validity vr = validate_strategy(r);
  if (!vr.ok) throw std::invalid_argument("simulate_group: " + vr.reason);
  if (qs.empty()) throw std::invalid_argument("simulate_group: no receivers");
  for (const auto& q : qs) {
    Validity vq = validate_receiver(q);
    if (!vq.ok) throw std::invalid_argument("simulate_group: " + vq.reason);
  }
  Validity vc = validate_sim(cfg);
  if (!vc.ok) throw std::invalid_argument("simulate_group: " + vc.reason);

  const int N = int(qs.size());
  const double eps = cfg.epsilon;
  const long long burn = cfg.burn_in < 0 ? cfg.rounds / 10 : cfg.burn_in;
  const long long measured = cfg.rounds - burn;

  // per-receiver error-adjusted engagement tables
  std::vector<Engage8> tab;
  tab.reserve(qs.size());
  for (const auto& q : qs) tab.push_back(engage_table(q, eps));

  Rng rng(cfg.seed);
  Story prev = Story::True;
  int k_prev = 0;
  long long since_fake = 1LL << 60;  // start with a spotless record
  std::vector<uint8_t> consumed(qs.size(), 0);
  std::vector<double> mass_t(N + 1, 0.0), mass_f(N + 1, 0.0);
  std::vector<double> tc(qs.size(), 0.0), fc(qs.size(), 0.0);

  for (long long t = 0; t < cfg.rounds; ++t) {
    double base = prev == Story::True ? r.alpha + r.gamma * double(k_prev) / N
                                      : r.beta + r.theta * double(k_prev) / N;
    Story story = rng.bernoulli(with_error(std::clamp(base, 0.0, 1.0), eps))
                      ? Story::True
                      : Story::Fake;
    int l = story == Story::True ? 0 : 1;
    int k = 0;
    for (size_t i = 0; i < qs.size(); ++i) {
      int lab = since_fake < qs[i].memory_len ? 1 : 0;
      double pe = tab[i].e[l][consumed[i] ? 0 : 1][lab];
      bool c = rng.bernoulli(pe);
      consumed[i] = c;
      k += c;
      if (t >= burn && c) (story == Story::True ? tc : fc)[i] += 1.0;
    }
    if (t >= burn) (story == Story::True ? mass_t : mass_f)[k] += 1.0;
    prev = story;
    k_prev = k;
    since_fake = story == Story::Fake ? 0 : since_fake + 1;
  }

  GroupSim out;
  out.dist.group_size = N;
  out.dist.mass_true.resize(N + 1);
  out.dist.mass_fake.resize(N + 1);
  for (int k = 0; k <= N; ++k) {
    out.dist.mass_true[k] = mass_t[k] / measured;
    out.dist.mass_fake[k] = mass_f[k] / measured;
    out.dist.v_tc += out.dist.mass_true[k] * double(k) / N;
    out.dist.v_fc += out.dist.mass_fake[k] * double(k) / N;
    out.dist.v_tn += out.dist.mass_true[k] * double(N - k) / N;
    out.dist.v_fn += out.dist.mass_fake[k] * double(N - k) / N;
  }
  out.tc.resize(qs.size());
  out.fc.resize(qs.size());
  for (size_t i = 0; i < qs.size(); ++i) {
    out.tc[i] = tc[i] / measured;
    out.fc[i] = fc[i] / measured;
  }
  return out;
}

Stationary simulate_group(const TransmitterStrategy& r,
                          const std::vector<ReceiverStrategy>& qs,
                          const SimConfig& cfg) {
  return simulate_group_detail(r, qs, cfg).dist;
}

}  // namespace newsgame
