#include "nhq/edge_select.hpp"

#include <string>

namespace nhq {

bool in_landing_zone(uint32_t u_i, uint32_t u_j, uint32_t u_p, const PairDistance& dist) {
  if (u_p == u_i || u_p == u_j || u_i == u_j)
    throw UsageError("in_landing_zone: vertices must be distinct");
  const double d_pi = dist(u_p, u_i);
  const double d_pj = dist(u_p, u_j);
  const double d_ij = dist(u_i, u_j);
  return d_pi < d_pj && d_pi >= d_ij;
}

std::vector<Neighbor> select_neighbors(const CandidatePool& pool, uint32_t k,
                                       const PairDistance& dist) {
  if (k == 0) throw UsageError("select_neighbors: k must be positive");
  std::vector<Neighbor> selected;
  if (pool.candidates.empty()) return selected;
  selected.reserve(k);
  for (const Neighbor& cand : pool.candidates) {
    if (selected.size() >= k) break;
    if (cand.id == pool.owner)
      throw UsageError("select_neighbors: pool contains its owner");
    bool admitted = true;
    for (const Neighbor& prior : selected) {
      // Landing zone of owner -> prior, with owner-side distances reused
      // from the pool: cand.dist = d(cand, owner), prior.dist = d(owner, prior).
      // Half-space: cand strictly closer to the owner than to prior.
      // Ball: cand no closer to the owner than prior is. The pool is sorted,
      // so the ball test only fails on exact distance ties; it is still
      // checked so duplicated distances never slip through.
      if (!(cand.dist >= prior.dist) || !(cand.dist < dist(cand.id, prior.id))) {
        admitted = false;
        break;
      }
    }
    if (admitted) selected.push_back(cand);
  }
  return selected;
}

}  // namespace nhq
