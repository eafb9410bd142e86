#include "newsgame/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "newsgame/rng.hpp"

namespace newsgame {

namespace {
constexpr double kEqTol = 1e-12;

void require_viable(const TransmitterStrategy& r, const char* who) {
  Validity v = validate_strategy(r);
  if (!v.ok) throw std::invalid_argument(std::string(who) + ": " + v.reason);
}
}  // namespace

Coercion classify_coercion(const TransmitterStrategy& r) {
  require_viable(r, "classify_coercion");
  if (r.gamma < 0 && r.theta < 0) return Coercion::FakeCoercive;
  if (r.gamma > 0 && r.theta > 0) return Coercion::TrueCoercive;
  return Coercion::Neither;
}

std::optional<ExtortionParams> extortion_params(const TransmitterStrategy& r) {
  require_viable(r, "extortion_params");
  double d1 = 1 - r.alpha + r.beta + r.theta;
  double d2 = 1 - r.alpha + r.beta - (r.gamma - r.theta) / 2;
  if (std::abs(d1) < kEqTol || std::abs(d2) < kEqTol) return std::nullopt;
  ExtortionParams p;
  p.kappa = (1 - r.alpha - (r.gamma - r.theta) / 2) / d1;
  p.lambda = -((r.gamma - r.theta) / 2) / d1;
  p.chi = -(r.gamma + r.theta) / (2 * d2);
  return p;
}

bool is_extortioner(const TransmitterStrategy& r, ExtortionKind kind) {
  require_viable(r, "is_extortioner");
  if (kind == ExtortionKind::Fake)
    return std::abs(r.theta + r.beta) <= kEqTol &&
           r.alpha + r.beta + r.gamma <= 1 + kEqTol;
  return std::abs(r.gamma - (1 - r.alpha)) <= kEqTol &&
         r.alpha + r.beta + r.theta >= 1 - kEqTol;
}

bool is_delta_extortioner(const TransmitterStrategy& r, ExtortionKind kind,
                          double delta) {
  require_viable(r, "is_delta_extortioner");
  if (!(delta >= 0))
    throw std::invalid_argument("is_delta_extortioner: delta must be >= 0");
  if (kind == ExtortionKind::Mainstream)
    return is_delta_extortioner(mirrored(r), ExtortionKind::Fake, delta);
  // Feasibility of a viable member within the ball: beta' is pinned to the
  // interval where theta' = -beta' stays within delta of theta, and the sum
  // constraint alpha'+beta'+gamma' <= 1 is tightest with every coordinate at
  // its lower end (alpha' and gamma' interact only through gamma' >= -alpha',
  // and alpha'+gamma' is nondecreasing in alpha').
  double b_lo = std::max({0.0, r.beta - delta, -r.theta - delta});
  double b_hi = std::min({1.0, r.beta + delta, -r.theta + delta});
  if (b_lo > b_hi + kEqTol) return false;
  double a_lo = std::max(0.0, r.alpha - delta);
  double g_lo = std::max(r.gamma - delta, -a_lo);
  return a_lo + b_lo + g_lo <= 1 + kEqTol;
}

double nash_min_true_rate(double B, double C) {
  if (std::abs(B + C) < 1e-300)
    throw std::invalid_argument("nash_min_true_rate: B + C must be nonzero");
  return C / (B + C);
}

ExtortionVerification verify_extortion_bound(const TransmitterStrategy& r,
                                             ExtortionKind kind, int grid_size,
                                             int random_receivers,
                                             uint64_t seed) {
  require_viable(r, "verify_extortion_bound");
  if (grid_size < 2)
    throw std::invalid_argument("verify_extortion_bound: grid_size < 2");
  SimConfig cfg;
  cfg.epsilon = 0.0;
  ExtortionVerification out;
  out.min_margin = 1e300;
  auto probe = [&](const ReceiverStrategy& q) {
    Stationary v = exact_stationary_single(r, q, cfg);
    double margin = kind == ExtortionKind::Fake ? v.v_f() - v.v_c()
                                                : v.v_t() - v.v_c();
    if (margin < out.min_margin) {
      out.min_margin = margin;
      out.worst = q;
    }
  };
  auto tick = [&](int i) { return double(i) / (grid_size - 1); };
  for (int i0 = 0; i0 < grid_size; ++i0)
    for (int i1 = 0; i1 < grid_size; ++i1)
      for (int i2 = 0; i2 < grid_size; ++i2)
        for (int i3 = 0; i3 < grid_size; ++i3)
          for (int i4 = 0; i4 < grid_size; ++i4) {
            ReceiverStrategy q;
            q.a0 = tick(i0);
            q.a1 = 1.0;
            q.p0 = 0.5;
            q.p_ct = tick(i1);
            q.p_cf = tick(i2);
            q.p_nt = tick(i3);
            q.p_nf = tick(i4);
            probe(q);
          }
  Rng rng(seed);
  for (int i = 0; i < random_receivers; ++i) {
    ReceiverStrategy q;
    q.a0 = rng.uniform();
    q.a1 = rng.uniform();
    q.p0 = rng.uniform();
    q.p_ct = rng.uniform();
    q.p_cf = rng.uniform();
    q.p_nt = rng.uniform();
    q.p_nf = rng.uniform();
    probe(q);
  }
  out.pass = out.min_margin >= -1e-9;
  return out;
}

StrategyClass classify(const TransmitterStrategy& r, double delta) {
  require_viable(r, "classify");
  StrategyClass c;
  c.coercion = classify_coercion(r);
  if (is_extortioner(r, ExtortionKind::Fake))
    c.extortion = ExtortionClass::FakeExtortioner;
  else if (is_extortioner(r, ExtortionKind::Mainstream))
    c.extortion = ExtortionClass::MainstreamExtortioner;
  if (is_delta_extortioner(r, ExtortionKind::Fake, delta))
    c.delta_extortion = ExtortionClass::FakeExtortioner;
  else if (is_delta_extortioner(r, ExtortionKind::Mainstream, delta))
    c.delta_extortion = ExtortionClass::MainstreamExtortioner;
  c.params = extortion_params(r);
  return c;
}

const char* to_string(Coercion c) {
  switch (c) {
    case Coercion::FakeCoercive: return "fake-coercive";
    case Coercion::TrueCoercive: return "true-coercive";
    default: return "neither";
  }
}

const char* to_string(ExtortionClass e) {
  switch (e) {
    case ExtortionClass::FakeExtortioner: return "fake-extortioner";
    case ExtortionClass::MainstreamExtortioner: return "mainstream-extortioner";
    default: return "none";
  }
}

}  // namespace newsgame
