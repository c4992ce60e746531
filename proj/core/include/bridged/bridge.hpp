#ifndef BRIDGED_BRIDGE_HPP
#define BRIDGED_BRIDGE_HPP

#include <optional>
#include <string>
#include <vector>

#include "bridged/clustering.hpp"
#include "bridged/types.hpp"

namespace bridged {

/// counts(a, b) = number of pairs whose x lands in input cluster a and whose
/// y lands in output cluster b.
struct VoteMatrix {
    Eigen::MatrixXi counts;

    int input_clusters() const { return static_cast<int>(counts.rows()); }
    int output_clusters() const { return static_cast<int>(counts.cols()); }
    long total() const { return counts.cast<long>().sum(); }
    VoteMatrix transposed() const { return {counts.transpose()}; }
};

enum class BridgeMethod { majority, hungarian, margin };

std::string to_string(BridgeMethod method);
BridgeMethod parse_bridge_method(const std::string& text);

/// Marks a cluster that received no usable vote.
inline constexpr int kUnresolved = -1;

/// Cluster-to-cluster maps in both directions. `inverse` is learned from
/// the transposed votes, not by inverting `forward`.
struct Bridge {
    std::vector<int> forward;
    std::vector<int> inverse;
    BridgeMethod method = BridgeMethod::majority;
    VoteMatrix votes;

    bool resolved(int a) const { return forward[static_cast<std::size_t>(a)] != kUnresolved; }
};

VoteMatrix build_votes(const ClusterModel& x_model, const ClusterModel& y_model,
                       const PairedSet& paired);

/// argmax per row, lowest column on ties, all-zero rows unresolved.
Bridge learn_majority(const VoteMatrix& votes);

/// Maximum-total-vote perfect matching (lexicographically smallest on ties).
Bridge learn_hungarian(const VoteMatrix& votes);

/// Greedy by margin: the open row whose best remaining column beats its
/// runner-up by the most is matched first; ties go to the lower row.
/// This is one reading of "margin-based voting"; no canonical definition
/// exists.
Bridge learn_margin(const VoteMatrix& votes);

Bridge learn_bridge(const VoteMatrix& votes, BridgeMethod method);

/// Cluster -> latent map maximising agreement (Hungarian on the
/// cluster-vs-latent contingency table). Entries are latent labels.
std::vector<int> cluster_to_latent(const Labels& assignments, const Labels& latents, int clusters,
                                   int latent_classes);

/// Mass-weighted share of input clusters whose forward target matches the
/// latent-level ground truth. Unresolved clusters count as wrong.
double bridging_accuracy(const Bridge& bridge, const ClusterModel& x_model,
                         const ClusterModel& y_model, const Labels& x_latents,
                         const Labels& y_latents);

}  // namespace bridged

#endif  // BRIDGED_BRIDGE_HPP
