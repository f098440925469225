#pragma once

#include <cstdint>

namespace rbeks {

// Per-thread tallies of the expensive group operations. Counting is compiled
// in unless RBEKS_DISABLE_OP_COUNTERS is defined.
struct OpCounts {
  std::uint64_t g1_exp = 0;
  std::uint64_t gt_exp = 0;
  std::uint64_t pairings = 0;
  std::uint64_t hashes = 0;

  friend OpCounts operator-(const OpCounts& a, const OpCounts& b) {
    return {a.g1_exp - b.g1_exp, a.gt_exp - b.gt_exp, a.pairings - b.pairings,
            a.hashes - b.hashes};
  }
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

namespace detail {
OpCounts& thread_op_counts();

#ifdef RBEKS_DISABLE_OP_COUNTERS
inline void count_g1_exp() {}
inline void count_gt_exp() {}
inline void count_pairing() {}
inline void count_hash() {}
#else
inline void count_g1_exp() { ++thread_op_counts().g1_exp; }
inline void count_gt_exp() { ++thread_op_counts().gt_exp; }
inline void count_pairing() { ++thread_op_counts().pairings; }
inline void count_hash() { ++thread_op_counts().hashes; }
#endif
}  // namespace detail

inline OpCounts current_op_counts() { return detail::thread_op_counts(); }

// Measures the operations executed on this thread since construction.
class OpCountScope {
 public:
  OpCountScope() : start_(current_op_counts()) {}
  OpCounts elapsed() const { return current_op_counts() - start_; }

 private:
  OpCounts start_;
};

}  // namespace rbeks
