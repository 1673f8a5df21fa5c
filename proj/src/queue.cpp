#include "aqm/queue.hpp"

#include <stdexcept>

namespace aqm {

RouterQueue::RouterQueue(std::size_t capacity, Slot start_slot)
    : capacity_(capacity), idle_since_(start_slot) {
  if (capacity == 0) {
    throw std::invalid_argument("RouterQueue: capacity must be at least 1");
  }
}

EnqueueOutcome RouterQueue::enqueue(Slot slot) {
  if (full()) {
    return EnqueueOutcome::Full;
  }
  packets_.push_back(PacketRecord{slot});
  idle_since_.reset();
  ++enqueued_total_;
  return EnqueueOutcome::Queued;
}

std::optional<Departure> RouterQueue::dequeue(Slot slot) {
  if (packets_.empty()) {
    return std::nullopt;
  }
  PacketRecord head = packets_.front();
  packets_.pop_front();
  ++dequeued_total_;
  if (packets_.empty()) {
    idle_since_ = slot;
  }
  return Departure{head, slot - head.enqueue_slot};
}

}  // namespace aqm
