#pragma once

#include <algorithm>
#include <queue>
#include <vector>

#include "nhq/core.hpp"

namespace nhq::detail {

// Sorted-ascending (dist, id) pool with a fixed capacity; once full, a new
// entry evicts the current worst iff it orders strictly before it.
class BoundedPool {
public:
  explicit BoundedPool(uint32_t cap) : cap_(cap) { items_.reserve(cap); }

  bool insert(const Neighbor& c) {
    auto it = std::lower_bound(items_.begin(), items_.end(), c, neighbor_less);
    if (items_.size() < cap_) {
      items_.insert(it, c);
      return true;
    }
    if (it == items_.end()) return false;
    items_.insert(it, c);
    items_.pop_back();
    return true;
  }

  const std::vector<Neighbor>& items() const { return items_; }
  std::vector<Neighbor> take() { return std::move(items_); }

private:
  uint32_t cap_;
  std::vector<Neighbor> items_;
};

struct NeighborGreater {
  bool operator()(const Neighbor& a, const Neighbor& b) const { return neighbor_less(b, a); }
};

// Min-heap frontier: top() is the closest unexpanded candidate.
using FrontierHeap = std::priority_queue<Neighbor, std::vector<Neighbor>, NeighborGreater>;

}  // namespace nhq::detail
