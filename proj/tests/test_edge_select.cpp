#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nhq/edge_select.hpp"
#include "test_util.hpp"

using namespace nhq;

namespace {

// Distance over a fixed 2-D point table.
struct PointTable {
  std::vector<std::pair<double, double>> pts;
  PairDistance fn() const {
    return [this](uint32_t a, uint32_t b) {
      const double dx = pts[a].first - pts[b].first;
      const double dy = pts[a].second - pts[b].second;
      return std::sqrt(dx * dx + dy * dy);
    };
  }
};

// Set-style reference: the zone of edge (i -> j) is "strictly closer to i
// than to j" minus "strictly inside the ball around i through j".
bool reference_zone(uint32_t i, uint32_t j, uint32_t p, const PairDistance& d) {
  const bool in_halfspace = d(p, i) < d(p, j);
  const bool in_ball = d(i, p) < d(i, j);
  return in_halfspace && !in_ball;
}

}  // namespace

TEST_CASE("landing zone on hand geometry") {
  // Points on a line: i = 0, j = 2, probes at 5, -3, 1 (bisector), 0.5.
  PointTable t{{{0, 0}, {2, 0}, {5, 0}, {-3, 0}, {1, 0}, {0.5, 0}}};
  const auto d = t.fn();
  CHECK_FALSE(in_landing_zone(0, 1, 2, d));  // closer to j than to i
  CHECK(in_landing_zone(0, 1, 3, d));        // beyond i, outside the ball
  CHECK_FALSE(in_landing_zone(0, 1, 4, d));  // exactly on the bisector
  CHECK_FALSE(in_landing_zone(0, 1, 5, d));  // inside the ball through j
  CHECK_THROWS_AS(in_landing_zone(0, 0, 2, d), UsageError);
  CHECK_THROWS_AS(in_landing_zone(0, 1, 1, d), UsageError);
}

TEST_CASE("landing zone agrees with the set definition on random points") {
  Rng rng = make_rng(31, RngStream::VectorGen);
  PointTable t;
  for (int i = 0; i < 40; ++i)
    t.pts.push_back({uniform_double(rng) * 10.0, uniform_double(rng) * 10.0});
  const auto d = t.fn();
  int zone_hits = 0;
  for (uint32_t i = 0; i < 40; ++i) {
    for (uint32_t j = 0; j < 40; ++j) {
      if (j == i) continue;
      for (uint32_t p = 0; p < 40; ++p) {
        if (p == i || p == j) continue;
        const bool got = in_landing_zone(i, j, p, d);
        CHECK(got == reference_zone(i, j, p, d));
        zone_hits += got;
      }
    }
  }
  CHECK(zone_hits > 0);  // the property is not vacuous on this corpus
}

TEST_CASE("selection keeps the nearest and every later pick in all prior zones") {
  Rng rng = make_rng(77, RngStream::VectorGen);
  PointTable t;
  for (int i = 0; i < 64; ++i)
    t.pts.push_back({uniform_double(rng) * 4.0, uniform_double(rng) * 4.0});
  const auto d = t.fn();

  const uint32_t owner = 0;
  CandidatePool pool{owner, {}};
  for (uint32_t v = 1; v < 64; ++v) pool.candidates.push_back({v, d(owner, v)});
  std::sort(pool.candidates.begin(), pool.candidates.end(), neighbor_less);

  const auto selected = select_neighbors(pool, 8, d);
  REQUIRE(!selected.empty());
  CHECK(selected.size() <= 8);
  CHECK(selected.front().id == pool.candidates.front().id);  // nearest always kept
  for (size_t i = 1; i < selected.size(); ++i)
    CHECK(neighbor_less(selected[i - 1], selected[i]));  // ascending order
  // Independent re-check of the pairwise property through in_landing_zone.
  for (size_t later = 1; later < selected.size(); ++later) {
    for (size_t earlier = 0; earlier < later; ++earlier) {
      CHECK(in_landing_zone(owner, selected[earlier].id, selected[later].id, d));
    }
  }
}

TEST_CASE("selection on a hand-built occlusion case") {
  // c1 at distance 1; c2 hides behind c1; c3 on the opposite side.
  PointTable t{{{0, 0}, {1, 0}, {1.1, 0.05}, {-1.2, 0}}};
  const auto d = t.fn();
  CandidatePool pool{0, {{1, d(0, 1)}, {2, d(0, 2)}, {3, d(0, 3)}}};
  std::sort(pool.candidates.begin(), pool.candidates.end(), neighbor_less);
  const auto selected = select_neighbors(pool, 3, d);
  REQUIRE(selected.size() == 2);
  CHECK(selected[0].id == 1);
  CHECK(selected[1].id == 3);
}

TEST_CASE("degree stops at k even with room left") {
  PointTable t;
  for (int i = 0; i < 20; ++i) t.pts.push_back({std::cos(i * 0.314) * 5, std::sin(i * 0.314) * 5});
  t.pts.insert(t.pts.begin(), {0.0, 0.0});  // owner at the center
  const auto d = t.fn();
  CandidatePool pool{0, {}};
  for (uint32_t v = 1; v <= 20; ++v) pool.candidates.push_back({v, d(0, v)});
  std::sort(pool.candidates.begin(), pool.candidates.end(), neighbor_less);
  const auto selected = select_neighbors(pool, 4, d);
  CHECK(selected.size() <= 4);
}

TEST_CASE("coincident candidates are rejected, equidistant distinct ones may pass") {
  // Two copies of the same point: the duplicate fails the half-space test
  // (distance to the prior pick is 0). Two distinct equidistant points on
  // opposite sides both get kept.
  PointTable t{{{0, 0}, {1, 0}, {1, 0}, {-1, 0}}};
  const auto d = t.fn();
  CandidatePool pool{0, {{1, 1.0}, {2, 1.0}, {3, 1.0}}};
  const auto selected = select_neighbors(pool, 3, d);
  REQUIRE(selected.size() == 2);
  CHECK(selected[0].id == 1);
  CHECK(selected[1].id == 3);
}

TEST_CASE("edge cases and the evaluation bound") {
  PointTable t{{{0, 0}, {1, 0}, {2, 0}}};
  const auto d = t.fn();
  CHECK(select_neighbors(CandidatePool{0, {}}, 3, d).empty());
  CHECK_THROWS_AS(select_neighbors(CandidatePool{0, {{0, 0.0}}}, 3, d), UsageError);
  CHECK_THROWS_AS(select_neighbors(CandidatePool{0, {{1, 1.0}}}, 0, d), UsageError);

  // Cross-candidate evaluations are bounded by |pool| * k.
  Rng rng = make_rng(13, RngStream::VectorGen);
  PointTable big;
  for (int i = 0; i < 101; ++i)
    big.pts.push_back({uniform_double(rng) * 3.0, uniform_double(rng) * 3.0});
  const auto bd = big.fn();
  size_t evals = 0;
  const PairDistance counted = [&](uint32_t a, uint32_t b) {
    ++evals;
    return bd(a, b);
  };
  CandidatePool pool{0, {}};
  for (uint32_t v = 1; v <= 100; ++v) pool.candidates.push_back({v, bd(0, v)});
  std::sort(pool.candidates.begin(), pool.candidates.end(), neighbor_less);
  const uint32_t k = 10;
  select_neighbors(pool, k, counted);
  CHECK(evals <= pool.candidates.size() * k);
}
