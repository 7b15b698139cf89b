#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nhq/core.hpp"

namespace nhq {

// Distance between two object ids. Builders pass a lambda over their
// ObjectSet + DistanceMode; tests can pass counting or table-backed stubs.
// Must be symmetric and non-negative.
using PairDistance = std::function<double(uint32_t, uint32_t)>;

// Candidates for vertex `owner`'s edges, sorted ascending by (dist, id),
// never containing the owner itself.
struct CandidatePool {
  uint32_t owner = 0;
  std::vector<Neighbor> candidates;  // dist = distance to owner
};

// True iff u_p lies in the landing zone of the directed edge u_i -> u_j:
// strictly closer to u_i than to u_j (open half-space), and at least as far
// from u_i as u_j is (outside the open ball through u_j). Candidates exactly
// on the bisector fail the half-space test and are rejected.
bool in_landing_zone(uint32_t u_i, uint32_t u_j, uint32_t u_p, const PairDistance& dist);

// Picks up to k edges for pool.owner. The closest candidate is always taken;
// each later candidate is taken iff it sits in the landing zone of every edge
// already chosen. Returns the chosen neighbors in the order selected, which
// is ascending (dist, id) because the pool is scanned in sorted order.
// `dist` is only consulted for candidate-to-candidate distances; distances to
// the owner are reused from the pool. At most |pool| * k evaluations.
std::vector<Neighbor> select_neighbors(const CandidatePool& pool, uint32_t k,
                                       const PairDistance& dist);

}  // namespace nhq
