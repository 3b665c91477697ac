#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aif/mlp.hpp"
#include "aif/numeric.hpp"
#include "aif/rng.hpp"

namespace aif {

// One experience tuple. `truncated` marks a step-limit cut; bootstrapped
// targets treat those as non-terminal.
struct Transition {
  Vec state;
  int action = 0;
  double reward = 0.0;
  Vec next_state;
  bool terminal = false;
  bool truncated = false;
};

// Ring buffer over transitions; oldest entries evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay: capacity 0");
    storage_.reserve(capacity);
  }

  void push(Transition t) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(t));
    } else {
      storage_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
    ++insertions_;
  }

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t insertions() const { return insertions_; }
  bool ready(std::size_t n) const { return size() >= n; }

  // n draws, uniform with replacement; deterministic given the rng state.
  // Callers gate learning on ready(batch_size); sampling itself only needs
  // a non-empty buffer.
  std::vector<Transition> sample(std::size_t n, Rng& rng) const {
    if (storage_.empty()) throw std::logic_error("replay: buffer not ready");
    std::vector<Transition> batch;
    batch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      batch.push_back(storage_[std::size_t(rng.next_index(int(size())))]);
    }
    return batch;
  }

  const Transition& at(std::size_t i) const { return storage_.at(i); }

 private:
  std::size_t capacity_;
  std::vector<Transition> storage_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::uint64_t insertions_ = 0;
};

// Frozen copy of a value network used inside bootstrap targets. Between
// syncs the parameters are bitwise constant.
struct TargetSnapshot {
  MlpParams params;
  std::int64_t last_sync_step = 0;
};

inline void target_sync(TargetSnapshot& snapshot, const MlpParams& live,
                        std::int64_t step) {
  snapshot.params = live;
  snapshot.last_sync_step = step;
}

}  // namespace aif
