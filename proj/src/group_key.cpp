#include "rbeks/group_key.hpp"

#include <string>
#include <thread>

#include "rbeks/error.hpp"

namespace rbeks {

G1Element bd_round1(const BilinearContext& ctx, const BDParticipant& p) {
  return ctx.generator().pow(p.secret);
}

G1Element bd_round2(const BDParticipant& p, const G1Element& x_prev,
                    const G1Element& x_next) {
  return (x_next / x_prev).pow(p.secret);
}

SharedGroupSecret bd_derive(const BilinearContext& ctx, const BDParticipant& p,
                            const std::vector<G1Element>& all_round1,
                            const std::vector<G1Element>& all_round2) {
  const std::size_t m = all_round1.size();
  if (m < 2 || all_round2.size() != m || p.index >= m) {
    throw Error(Errc::kMismatchedRoundData,
                "round data for " + std::to_string(all_round1.size()) + "/" +
                    std::to_string(all_round2.size()) +
                    " participants does not fit index " +
                    std::to_string(p.index));
  }
  const std::size_t i = p.index;
  const G1Element& x_prev = all_round1[(i + m - 1) % m];
  G1Element key = x_prev.pow(ctx.scalar(m) * p.secret);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const G1Element& big_x = all_round2[(i + j) % m];
    key = key * big_x.pow(ctx.scalar(m - 1 - j));
  }
  return {key};
}

BDMessageBoard::BDMessageBoard(std::size_t participants)
    : round1_(participants), round2_(participants) {}

void BDMessageBoard::post_round1(std::size_t index, G1Element x) {
  std::lock_guard<std::mutex> lock(mu_);
  if (index >= round1_.size() || round1_[index]) {
    throw Error(Errc::kMismatchedRoundData,
                "duplicate or out-of-range round 1 post " + std::to_string(index));
  }
  round1_[index] = std::move(x);
  ++round1_posted_;
  cv_.notify_all();
}

void BDMessageBoard::post_round2(std::size_t index, G1Element big_x) {
  std::lock_guard<std::mutex> lock(mu_);
  if (round1_posted_ != round1_.size()) {
    throw Error(Errc::kMismatchedRoundData, "round 2 posted before round 1 closed");
  }
  if (index >= round2_.size() || round2_[index]) {
    throw Error(Errc::kMismatchedRoundData,
                "duplicate or out-of-range round 2 post " + std::to_string(index));
  }
  round2_[index] = std::move(big_x);
  ++round2_posted_;
  cv_.notify_all();
}

std::vector<G1Element> BDMessageBoard::wait_round1() const {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return round1_posted_ == round1_.size(); });
  std::vector<G1Element> out;
  for (const auto& x : round1_) out.push_back(*x);
  return out;
}

std::vector<G1Element> BDMessageBoard::wait_round2() const {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return round2_posted_ == round2_.size(); });
  std::vector<G1Element> out;
  for (const auto& x : round2_) out.push_back(*x);
  return out;
}

void BDMessageBoard::tamper_round2(std::size_t index, G1Element big_x) {
  std::lock_guard<std::mutex> lock(mu_);
  round2_.at(index) = std::move(big_x);
}

AgreementTranscript run_group_key_agreement(const BilinearContext& ctx,
                                            const std::vector<Scalar>& secrets,
                                            std::optional<std::size_t> tamper) {
  const std::size_t m = secrets.size();
  if (m < 2) {
    throw Error(Errc::kInvalidArgument,
                "group key agreement needs at least two participants");
  }
  BDMessageBoard board(m);
  std::vector<SharedGroupSecret> derived(m);
  std::mutex tamper_mu;
  std::condition_variable tamper_cv;
  bool tamper_done = !tamper.has_value();

  auto participant = [&](std::size_t i) {
    BDParticipant p{i, secrets[i]};
    board.post_round1(i, bd_round1(ctx, p));
    auto xs = board.wait_round1();
    board.post_round2(i, bd_round2(p, xs[(i + m - 1) % m], xs[(i + 1) % m]));
    auto big_xs = board.wait_round2();
    {
      std::unique_lock<std::mutex> lock(tamper_mu);
      tamper_cv.wait(lock, [&] { return tamper_done; });
    }
    big_xs = board.wait_round2();
    derived[i] = bd_derive(ctx, p, xs, big_xs);
  };

  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (std::size_t i = 0; i < m; ++i) {
    threads.emplace_back([&, i] {
      try {
        participant(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  if (tamper) {
    auto posted = board.wait_round2();
    board.tamper_round2(*tamper, posted.at(*tamper) * ctx.generator());
    std::lock_guard<std::mutex> lock(tamper_mu);
    tamper_done = true;
    tamper_cv.notify_all();
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);

  AgreementTranscript transcript{board.wait_round1(), board.wait_round2(),
                                 std::move(derived)};
  for (const auto& d : transcript.derived) {
    if (!(d.value == transcript.derived.front().value)) {
      throw Error(Errc::kMismatchedRoundData,
                  "participants derived different group secrets");
    }
  }
  return transcript;
}

}  // namespace rbeks
