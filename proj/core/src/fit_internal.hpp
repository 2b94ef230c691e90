#pragma once

// Helpers shared by the joint-disease fit engine and the latent-stage
// baseline (they deliberately share one code path for initialization and the
// 1-D time-shift search).

#include <functional>
#include <span>
#include <vector>

#include "dkt/dataset.hpp"

namespace dkt::detail {

// Rank-heuristic stage initialization: subjects ordered by mean normalized
// abnormality (mid-ranks on ties, so the result is invariant to row order),
// mapped affinely onto a symmetric interval wide enough to cover the
// observed within-subject time span.
std::vector<double> rank_stage_init(const CohortDataset& data);

// Grid-seeded 1-D minimization: n_seeds equispaced seeds on [lo, hi] plus any
// extra seeds, golden-section refinement around the best one.  Near-ties
// between seeds break towards tie_target; the refined point is returned only
// when it strictly improves on the winning seed.
double stage_search_1d(const std::function<double(double)>& f, double lo, double hi, int n_seeds,
                       double tie_target, std::span<const double> extra_seeds);

// Runs body(0..n-1); chunks across threads when threads > 1.  Bodies must
// write to disjoint state.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

// Family tags for deriving per-block RNG streams.
inline constexpr std::uint64_t kSeedInitTheta = 0x11;
inline constexpr std::uint64_t kSeedTheta = 0x22;
inline constexpr std::uint64_t kSeedLambda = 0x33;
inline constexpr std::uint64_t kSeedLatentTheta = 0x44;

}  // namespace dkt::detail
