#pragma once

// Two-round Burmester-Desmedt group key agreement among the system
// authorities. Participants sit on a cycle of size m >= 2 and end up sharing
// g^(a_1 a_2 + a_2 a_3 + ... + a_m a_1) without revealing their secrets.

#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <optional>
#include <vector>

#include "rbeks/pairing.hpp"

namespace rbeks {

struct BDParticipant {
  std::size_t index = 0;  // position on the cycle, 0-based
  Scalar secret;          // a_i, nonzero
};

struct SharedGroupSecret {
  G1Element value;  // g^y
};

// x_i = g^{a_i}
G1Element bd_round1(const BilinearContext& ctx, const BDParticipant& p);

// X_i = (x_{i+1} / x_{i-1})^{a_i}
G1Element bd_round2(const BDParticipant& p, const G1Element& x_prev,
                    const G1Element& x_next);

// K_i = x_{i-1}^{m a_i} * X_i^{m-1} * X_{i+1}^{m-2} * ... * X_{i+m-2}.
// Throws kMismatchedRoundData when the broadcast lists are inconsistent in
// size with each other or with the participant index.
SharedGroupSecret bd_derive(const BilinearContext& ctx, const BDParticipant& p,
                            const std::vector<G1Element>& all_round1,
                            const std::vector<G1Element>& all_round2);

// In-process broadcast channel. Round 2 posts are accepted only once every
// round 1 post has arrived; waiters block until their round is complete.
class BDMessageBoard {
 public:
  explicit BDMessageBoard(std::size_t participants);

  std::size_t size() const { return round1_.size(); }

  void post_round1(std::size_t index, G1Element x);
  void post_round2(std::size_t index, G1Element big_x);
  std::vector<G1Element> wait_round1() const;
  std::vector<G1Element> wait_round2() const;

  // Replaces a round 2 broadcast in place; used to simulate a faulty party.
  void tamper_round2(std::size_t index, G1Element big_x);

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<std::optional<G1Element>> round1_;
  std::vector<std::optional<G1Element>> round2_;
  std::size_t round1_posted_ = 0;
  std::size_t round2_posted_ = 0;
};

struct AgreementTranscript {
  std::vector<G1Element> round1;
  std::vector<G1Element> round2;
  std::vector<SharedGroupSecret> derived;  // one per participant
};

// Runs both rounds for the given secrets (one per participant, m >= 2), each
// participant on its own thread. Throws kMismatchedRoundData if the derived
// secrets disagree. `tamper`, when set, multiplies the round 2 broadcast of the
// given index by g before anyone derives.
AgreementTranscript run_group_key_agreement(
    const BilinearContext& ctx, const std::vector<Scalar>& secrets,
    std::optional<std::size_t> tamper = std::nullopt);

}  // namespace rbeks
