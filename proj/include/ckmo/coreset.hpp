#pragma once

#include <cstdint>
#include <vector>

#include "ckmo/model.hpp"
#include "ckmo/rng.hpp"

namespace ckmo {

struct SeedConfig {
  int max_iterations = 200;
  // A swap must beat the current cost by improvement_factor/(10p) relative,
  // p being the number of centers in play, to be taken.
  double improvement_factor = 1.0;
};

// Uncapacitated (k+m)-median over candidate centers: all facility points
// plus all client points, deduplicated.
struct SeedSolution {
  std::vector<int> centers;  // metric point ids, sorted
  std::vector<int> assign;   // per client position: index into centers
  double cost = 0.0;         // sum over clients of d(c, center)^z
};

SeedSolution seed_solution(const Instance& inst,
                           const SeedConfig& cfg = {});

struct Ring {
  int center = 0;        // index into SeedSolution::centers
  int center_point = 0;  // metric point id
  int level = 0;         // 0..psi
  double radius = 0.0;   // R * 2^level (level 0 is the innermost ball)
  std::vector<int> members;  // client positions, ascending
};

struct RingSystem {
  std::vector<Ring> rings;  // ordered by (center, level), empties dropped
  double R = 0.0;
  int psi = 0;          // effective exponent (after coverage growth)
  int psi_formula = 0;  // ceil(log2(zeta * n)) before growth
  double seed_cost = 0.0;
};

// Splits clients into per-center distance rings. Every client lands in the
// smallest closed ball (radius R * 2^j) around its seed center that
// contains it; psi grows past the formula value until that holds for all.
// seed_cost == 0 collapses to a single radius-0 ring per center.
RingSystem build_rings(const Instance& inst, const SeedSolution& seed,
                       double zeta);

struct RingSample {
  int ring_index = 0;
  std::int64_t ring_size = 0;    // N
  std::int64_t sample_size = 0;  // min(s, N)
  bool passthrough = false;      // N <= s: kept wholesale at weight 1
  std::vector<int> sampled;      // client positions, in sampling order
};

// Uniform sample without replacement of min(s, N) members; the draw is a
// pure function of `rng` and the member set (members are processed in
// ascending order regardless of how the ring was built).
RingSample sample_ring(const Ring& ring, int ring_index, std::int64_t s,
                       Rng& rng);

// Integer weights for a sample preserving the ring total exactly:
// passthrough members get 1, otherwise floor(N/s) each with the first
// N mod s sampled members (in sampling order) getting one extra.
std::vector<std::pair<int, std::int64_t>> integralize(
    const RingSample& sample);

struct RingCensus {
  int center_point = 0;
  int level = 0;
  double radius = 0.0;
  std::int64_t size = 0;
  std::int64_t sampled = 0;
  bool passthrough = false;
  int group = -1;  // >= 0 when sampling ran per (ring, group) cell
};

struct CoresetMetadata {
  double epsilon = 0.0;
  double zeta = 0.0;
  double a = 0.0;
  std::int64_t s_formula = 0;  // ceil(a * zeta^2 / eps^3 * (m + k ln n))
  std::int64_t s = 0;          // value actually used
  double R = 0.0;
  int psi = 0;
  int psi_formula = 0;
  double seed_cost = 0.0;
  std::vector<int> seed_centers;  // metric point ids
  std::vector<RingCensus> rings;
  bool sampling_occurred = false;
  std::int64_t total_weight = 0;
  int support_size = 0;
  std::uint64_t seed = 0;
};

struct CoresetConfig {
  double zeta = 5.0;  // declared seed approximation factor, >= 1
  double a = 1.0;     // sample-size constant, > 0
  std::int64_t s_override = 0;  // 0: use the formula value
  bool disable_sampling = false;  // force passthrough everywhere
  SeedConfig seed_cfg;
};

struct CoresetResult {
  WeightedClientSet weights;
  CoresetMetadata meta;
};

// Full pipeline: seed, rings, per-ring sampling with substreams derived
// from (seed, ring center, level), integral weights. Total weight always
// equals the number of clients.
CoresetResult build_coreset(const Instance& inst, double epsilon,
                            std::uint64_t seed,
                            const CoresetConfig& cfg = {});

}  // namespace ckmo
