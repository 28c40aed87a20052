#ifndef OPTTOPO_EVAL_COUNTER_HPP
#define OPTTOPO_EVAL_COUNTER_HPP

#include <atomic>
#include <cstdint>

namespace opttopo {

/// Shared tally of model evaluations. Incrementing is the only state change
/// an evaluation performs; the counter is atomic so enumeration loops may be
/// parallelized without changing the total.
class EvalCounter {
  public:
    EvalCounter() = default;

    void increment(std::uint64_t by = 1) { count_.fetch_add(by, std::memory_order_relaxed); }
    std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }
    void reset() { count_.store(0, std::memory_order_relaxed); }

  private:
    std::atomic<std::uint64_t> count_{0};
};

} // namespace opttopo

#endif
