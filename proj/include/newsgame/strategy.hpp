#pragma once
#include <stdexcept>
#include <string>

namespace newsgame {

enum class Story : int { True = 0, Fake = 1 };

inline Story other(Story s) { return s == Story::True ? Story::Fake : Story::True; }

// Memory-one transmitter strategy. The probability of sharing a *true* story
// next depends on the type of the previous story and on the fraction k/N of
// receivers who engaged with it:
//   previous true:  alpha + gamma * k/N
//   previous fake:  beta  + theta * k/N
// Viability requires every such value to be a probability for all k, i.e.
//   0 <= alpha <= 1,  0 <= beta <= 1,
//   -alpha <= gamma <= 1-alpha,  -beta <= theta <= 1-beta.
struct TransmitterStrategy {
  double alpha = 0, beta = 0, gamma = 0, theta = 0;
};

struct Validity {
  bool ok = true;
  std::string reason;
};

Validity validate_strategy(const TransmitterStrategy& r);

// Probability the next story is true. Throws std::invalid_argument on a
// non-viable strategy or k outside 0..N.
double transmit_prob(const TransmitterStrategy& r, Story prev, int k, int N);

// Receiver behavioural strategy. Engagement probability for a story of type l,
// given whether the receiver consumed last round (i) and the label j it
// attaches to the transmitter (the type of the previous story; with
// memory_len m > 1 the label is "fake" iff any of the last m stories were):
//   q = a0 * [l == preferred type] + (1 - a0) * ((1 - a1) * p0 + a1 * p_ij)
// a0 is attention to story accuracy, a1 attention to payoff history. For the
// canonical truth-preferring receiver the attention term fires on true
// stories; falsehood-preferring runs swap the two story types throughout
// (see dynamics.hpp), so this header always speaks the truth-preferring
// convention.
struct ReceiverStrategy {
  double a0 = 0, a1 = 0;
  double p0 = 0;
  double p_ct = 0, p_cf = 0, p_nt = 0, p_nf = 0;
  int memory_len = 1;
};

Validity validate_receiver(const ReceiverStrategy& q);

double engage_prob(const ReceiverStrategy& q, Story current, bool consumed_prev,
                   Story label_prev);

enum class Preference { Truth, Falsehood };

struct PayoffConfig {
  double B = 2;   // receiver benefit per consumed story of the preferred type
  double C = 1;   // receiver cost per consumed story of the other type
  double b_t = 1; // transmitter value of engagement with true stories
  double b_f = 1; // ... and with fake stories
  Preference receiver_prefers = Preference::Truth;
};

struct Stationary;  // stationary.hpp

// Thrown when the enforced-rate denominator 1 - alpha + beta vanishes
// (alpha == 1 and beta == 0: the strategy never leaves the "true" state).
struct DegenerateStrategyError : std::domain_error {
  using std::domain_error::domain_error;
};

// The linear constraint a transmitter imposes on its own fake-share rate for
// *any* receiver behaviour:
//   v_f = (1-alpha)/(1-alpha+beta) - theta/(1-alpha+beta) * v_fc
//                                  - gamma/(1-alpha+beta) * v_tc
// where v_tc, v_fc are the stationary consumed-true / consumed-fake rates.
double enforced_fake_rate(const TransmitterStrategy& r, double v_tc, double v_fc);

// B * (consumed preferred) - C * (consumed other)
double receiver_payoff(const Stationary& v, const PayoffConfig& pc);

// b_t * v_tc + b_f * v_fc: engagement is what the transmitter sells.
double transmitter_payoff(const Stationary& v, const PayoffConfig& pc);

// Relabel t<->f: the strategy that responds to fake stories exactly as r
// responds to true ones. Maps viable strategies to viable strategies, and is
// an involution.
TransmitterStrategy mirrored(const TransmitterStrategy& r);

}  // namespace newsgame
