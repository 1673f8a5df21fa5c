#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>

namespace aqm {

using Slot = std::uint64_t;

struct PacketRecord {
  Slot enqueue_slot = 0;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

enum class EnqueueOutcome { Queued, Full };

struct Departure {
  PacketRecord packet;
  Slot waiting = 0;  ///< dequeue slot minus enqueue slot
};

/// Bounded FIFO of unit packets in slot time.
///
/// While empty the queue remembers the slot at which it became empty, so the
/// idle duration at a later slot t is `t - idle_since()`.
class RouterQueue {
 public:
  explicit RouterQueue(std::size_t capacity, Slot start_slot = 0);

  EnqueueOutcome enqueue(Slot slot);
  std::optional<Departure> dequeue(Slot slot);

  [[nodiscard]] std::size_t occupancy() const noexcept { return packets_.size(); }
  [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
  [[nodiscard]] bool empty() const noexcept { return packets_.empty(); }
  [[nodiscard]] bool full() const noexcept { return packets_.size() >= capacity_; }
  [[nodiscard]] std::optional<Slot> idle_since() const noexcept { return idle_since_; }

  [[nodiscard]] std::uint64_t enqueued_total() const noexcept { return enqueued_total_; }
  [[nodiscard]] std::uint64_t dequeued_total() const noexcept { return dequeued_total_; }

 private:
  std::size_t capacity_;
  std::deque<PacketRecord> packets_;
  std::optional<Slot> idle_since_;
  std::uint64_t enqueued_total_ = 0;
  std::uint64_t dequeued_total_ = 0;
};

}  // namespace aqm
