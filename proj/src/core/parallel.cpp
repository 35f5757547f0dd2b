#include "brt/parallel.hpp"

namespace brt {

ThreadLimit::ThreadLimit(int threads) {
  if (threads > 0) {
    control_ = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                     static_cast<std::size_t>(threads));
    arena_ = std::make_unique<tbb::task_arena>(threads);
  }
}

ThreadLimit::~ThreadLimit() = default;

int ThreadLimit::execute(const std::function<int()>& work) {
  if (!arena_) return work();
  return arena_->execute(work);
}

}  // namespace brt
