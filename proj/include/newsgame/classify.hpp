#pragma once
#include <cstdint>
#include <optional>
#include <string>

#include "newsgame/stationary.hpp"
#include "newsgame/strategy.hpp"

namespace newsgame {

enum class Coercion { FakeCoercive, TrueCoercive, Neither };

// A transmitter is coercive when it *rewards* disengagement with accuracy and
// punishes engagement (fake-coercive: gamma < 0 and theta < 0), or the
// opposite (true-coercive: gamma > 0 and theta > 0).
Coercion classify_coercion(const TransmitterStrategy& r);

// Slope/intercept form of the constraint a transmitter enforces between its
// fake-share rate and the receiver's consumption:
//   v_f - kappa + lambda * (v_tn + v_fc) = chi * (v_c - kappa + lambda * (v_tn + v_fc))
// with
//   kappa  = (1 - alpha - (gamma-theta)/2) / (1 - alpha + beta + theta)
//   lambda = -((gamma-theta)/2)            / (1 - alpha + beta + theta)
//   chi    = -(gamma+theta) / (2 * (1 - alpha + beta - (gamma-theta)/2))
struct ExtortionParams {
  double kappa = 0, lambda = 0, chi = 0;
};

// nullopt when either denominator vanishes (degenerate parameterisation).
std::optional<ExtortionParams> extortion_params(const TransmitterStrategy& r);

enum class ExtortionKind { Fake, Mainstream };

// Exact extortioners guarantee a bound for *every* receiver behaviour:
//   fake:       v_f >= v_c   iff   theta == -beta  and  alpha+beta+gamma <= 1
//   mainstream: v_t >= v_c   iff   gamma == 1-alpha and  alpha+beta+theta >= 1
// (equalities tested within 1e-12; r must be viable). The two families map to
// each other under mirrored().
bool is_extortioner(const TransmitterStrategy& r, ExtortionKind kind);

// True iff some viable exact extortioner of the given kind lies within
// max-norm distance delta of r. Closed form; delta >= 0.
bool is_delta_extortioner(const TransmitterStrategy& r, ExtortionKind kind,
                          double delta);

// Smallest receiver share rate that makes engagement profitable: C / (B + C).
// Throws std::invalid_argument when B + C == 0.
double nash_min_true_rate(double B, double C);

// Brute-force check of the extortion bound: evaluates the stationary margin
// (v_f - v_c for fake, v_t - v_c for mainstream) at eps == 0 over a grid of
// receiver strategies (a0 and the four p_ij each on grid_size points, a1 = 1)
// plus `random_receivers` draws over the full receiver cube. pass is true when
// min_margin >= -1e-9.
struct ExtortionVerification {
  bool pass = false;
  double min_margin = 0;
  ReceiverStrategy worst;  // argmin receiver
};
ExtortionVerification verify_extortion_bound(const TransmitterStrategy& r,
                                             ExtortionKind kind,
                                             int grid_size = 5,
                                             int random_receivers = 1000,
                                             uint64_t seed = 12345);

enum class ExtortionClass { FakeExtortioner, MainstreamExtortioner, None };

struct StrategyClass {
  Coercion coercion = Coercion::Neither;
  ExtortionClass extortion = ExtortionClass::None;
  ExtortionClass delta_extortion = ExtortionClass::None;
  std::optional<ExtortionParams> params;
};

// Full classification record at tolerance delta for the neighbourhood checks.
// The (measure-zero) strategies satisfying both exact conditions are reported
// as fake extortioners.
StrategyClass classify(const TransmitterStrategy& r, double delta = 0.05);

const char* to_string(Coercion c);
const char* to_string(ExtortionClass e);

}  // namespace newsgame
