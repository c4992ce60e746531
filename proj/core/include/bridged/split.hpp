#ifndef BRIDGED_SPLIT_HPP
#define BRIDGED_SPLIT_HPP

#include <string>
#include <utility>
#include <vector>

#include "bridged/types.hpp"

namespace bridged {

/// (x id, y id) of samples whose two views are known to belong together.
using Pairing = std::vector<std::pair<std::string, std::string>>;

/// How unpaired samples are distributed over the two pools.
enum class PoolPolicy {
    /// Every unpaired sample contributes its x to the input pool and its y
    /// to the output pool.
    shared,
    /// Every unpaired sample lands in exactly one pool; `minor_pool_fraction`
    /// of them go to the output-only pool (input-only pool when `inverse`).
    disjoint,
};

struct SplitOptions {
    SplitMode mode = SplitMode::transductive;
    /// Per latent group when latents exist, otherwise the total pair count.
    int pairs_per_cluster = 1;
    /// Share of the remaining samples held out as test points (inductive only).
    double holdout_fraction = 0.2;
    PoolPolicy pools = PoolPolicy::shared;
    double minor_pool_fraction = 0.1;
    bool inverse = false;
    /// Also place the paired rows in both unpaired pools.
    bool enlarge_pools = false;
};

/// Pairs every id that occurs in both sets, in x order.
Pairing pair_by_id(const PointSet& x, const PointSet& y);

/// Samples the paired set (stratified by the x-side latent label when
/// present) and removes it from the unpaired pools. Rows of x or y that take
/// part in no pairing always go to their own pool.
DataSplit make_split(const PointSet& x, const PointSet& y, const Pairing& pairing,
                     const SplitOptions& options, RngSeed seed);

}  // namespace bridged

#endif  // BRIDGED_SPLIT_HPP
