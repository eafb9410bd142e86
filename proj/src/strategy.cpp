#include "newsgame/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "newsgame/stationary.hpp"

namespace newsgame {

namespace {
bool in01(double x) { return x >= 0.0 && x <= 1.0 && !std::isnan(x); }
// slack for the slope bounds, which compare against computed quantities like
// 1 - beta and would otherwise reject boundary strategies over rounding
constexpr double kEdgeTol = 1e-12;
}  // namespace

Validity validate_strategy(const TransmitterStrategy& r) {
  if (!in01(r.alpha)) return {false, "alpha outside [0,1]"};
  if (!in01(r.beta)) return {false, "beta outside [0,1]"};
  if (std::isnan(r.gamma) || r.gamma < -r.alpha - kEdgeTol ||
      r.gamma > 1 - r.alpha + kEdgeTol)
    return {false, "gamma outside [-alpha, 1-alpha]"};
  if (std::isnan(r.theta) || r.theta < -r.beta - kEdgeTol ||
      r.theta > 1 - r.beta + kEdgeTol)
    return {false, "theta outside [-beta, 1-beta]"};
  return {true, ""};
}

double transmit_prob(const TransmitterStrategy& r, Story prev, int k, int N) {
  Validity v = validate_strategy(r);
  if (!v.ok) throw std::invalid_argument("transmit_prob: " + v.reason);
  if (N < 1 || k < 0 || k > N)
    throw std::invalid_argument("transmit_prob: k outside 0..N");
  double frac = double(k) / N;
  double p = prev == Story::True ? r.alpha + r.gamma * frac : r.beta + r.theta * frac;
  return std::clamp(p, 0.0, 1.0);
}

Validity validate_receiver(const ReceiverStrategy& q) {
  if (!in01(q.a0)) return {false, "a0 outside [0,1]"};
  if (!in01(q.a1)) return {false, "a1 outside [0,1]"};
  if (!in01(q.p0)) return {false, "p0 outside [0,1]"};
  if (!in01(q.p_ct) || !in01(q.p_cf) || !in01(q.p_nt) || !in01(q.p_nf))
    return {false, "p_ij outside [0,1]"};
  if (q.memory_len < 1) return {false, "memory_len < 1"};
  return {true, ""};
}

double engage_prob(const ReceiverStrategy& q, Story current, bool consumed_prev,
                   Story label_prev) {
  Validity v = validate_receiver(q);
  if (!v.ok) throw std::invalid_argument("engage_prob: " + v.reason);
  double table = consumed_prev
                     ? (label_prev == Story::True ? q.p_ct : q.p_cf)
                     : (label_prev == Story::True ? q.p_nt : q.p_nf);
  double attentive = current == Story::True ? 1.0 : 0.0;
  return q.a0 * attentive + (1 - q.a0) * ((1 - q.a1) * q.p0 + q.a1 * table);
}

double enforced_fake_rate(const TransmitterStrategy& r, double v_tc, double v_fc) {
  Validity v = validate_strategy(r);
  if (!v.ok) throw std::invalid_argument("enforced_fake_rate: " + v.reason);
  double den = 1 - r.alpha + r.beta;
  if (den < 1e-12)
    throw DegenerateStrategyError(
        "enforced_fake_rate: 1 - alpha + beta vanishes (always-true absorbing)");
  return (1 - r.alpha) / den - r.theta * v_fc / den - r.gamma * v_tc / den;
}

double receiver_payoff(const Stationary& v, const PayoffConfig& pc) {
  if (pc.receiver_prefers == Preference::Truth)
    return pc.B * v.v_tc - pc.C * v.v_fc;
  return pc.B * v.v_fc - pc.C * v.v_tc;
}

double transmitter_payoff(const Stationary& v, const PayoffConfig& pc) {
  return pc.b_t * v.v_tc + pc.b_f * v.v_fc;
}

TransmitterStrategy mirrored(const TransmitterStrategy& r) {
  // relabelled "true" is the old "fake": the response to a previous relabelled-
  // true story is 1 - (response to a previous fake one), and vice versa
  return {1 - r.beta, 1 - r.alpha, -r.theta, -r.gamma};
}

}  // namespace newsgame
